#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ffm {

/// The prime field F_q. Construction rejects composite or q < 2.
class FieldSpec {
  public:
    explicit FieldSpec(std::uint32_t q);

    std::uint32_t q() const noexcept { return q_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
        std::uint32_t s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept { return a >= b ? a - b : a + q_ - b; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % q_);
    }
    std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : q_ - a; }
    std::uint32_t inv(std::uint32_t a) const;

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

  private:
    std::uint32_t q_;
};

bool is_prime(std::uint64_t n) noexcept;

/// Element of A = F_q[T]. Coefficients are stored lowest degree first and
/// always trimmed, so structural equality is polynomial equality.
class FqPoly {
  public:
    static constexpr int kZeroDegree = -1;

    explicit FqPoly(FieldSpec field) : field_(field) {}
    /// Coefficients must already lie in [0, q); trailing zeros are trimmed.
    FqPoly(FieldSpec field, std::vector<std::uint32_t> coeffs);

    static FqPoly constant(FieldSpec field, std::uint32_t c);
    static FqPoly monomial(FieldSpec field, int k, std::uint32_t c = 1);
    static FqPoly T(FieldSpec field) { return monomial(field, 1); }
    /// Inverse of code(): base-q digits of `code` become the coefficients.
    static FqPoly from_code(FieldSpec field, std::uint64_t code);

    const FieldSpec& field() const noexcept { return field_; }
    std::span<const std::uint32_t> coeffs() const noexcept { return coeffs_; }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    bool is_one() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == 1; }
    bool is_monic() const noexcept { return !coeffs_.empty() && coeffs_.back() == 1; }
    std::uint32_t coeff(int k) const noexcept {
        return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(k)] : 0;
    }
    std::uint32_t leading() const noexcept { return coeffs_.empty() ? 0 : coeffs_.back(); }

    /// |f| = q^{d(f)}, 0 for f = 0. Throws DomainError if it does not fit in 64 bits.
    std::uint64_t norm() const;
    /// log|f| = d(f) log q; requires f != 0.
    double log_norm() const;
    /// Sum of c_j q^j; an injective index for polynomials of bounded degree.
    std::uint64_t code() const noexcept;

    FqPoly monic() const;
    FqPoly scaled(std::uint32_t c) const;

    FqPoly& operator+=(const FqPoly& rhs);
    FqPoly& operator-=(const FqPoly& rhs);
    friend FqPoly operator+(FqPoly lhs, const FqPoly& rhs) { return lhs += rhs; }
    friend FqPoly operator-(FqPoly lhs, const FqPoly& rhs) { return lhs -= rhs; }
    friend FqPoly operator*(const FqPoly& lhs, const FqPoly& rhs);

    friend bool operator==(const FqPoly&, const FqPoly&) = default;
    /// Ordering by (degree, coefficients from the top). Among monic polynomials
    /// of one degree this is the same order enumerate_monic produces.
    friend std::strong_ordering operator<=>(const FqPoly& a, const FqPoly& b);

  private:
    void trim() noexcept;

    FieldSpec field_;
    std::vector<std::uint32_t> coeffs_;
};

struct DivMod {
    FqPoly quotient;
    FqPoly remainder;
};

FqPoly poly_mul(const FqPoly& a, const FqPoly& b);
DivMod poly_divmod(const FqPoly& a, const FqPoly& b);
FqPoly poly_mod(const FqPoly& a, const FqPoly& b);
/// Monic gcd. Throws DomainError when both inputs are zero.
FqPoly poly_gcd(const FqPoly& a, const FqPoly& b);

struct ExtendedGcd {
    FqPoly gcd;  // monic
    FqPoly s;    // s*a + t*b = gcd
    FqPoly t;
};
ExtendedGcd poly_xgcd(const FqPoly& a, const FqPoly& b);

/// Inverse of a modulo m; throws DomainError if gcd(a, m) != 1.
FqPoly poly_inverse_mod(const FqPoly& a, const FqPoly& m);
FqPoly poly_powmod(const FqPoly& base, std::uint64_t exponent, const FqPoly& modulus);

/// Rabin's test: T^{q^n} = T mod f and gcd(T^{q^{n/l}} - T, f) = 1 for each prime l | n.
bool is_irreducible(const FqPoly& f);

/// All q^n monic polynomials of degree n; lower coefficients read as base-q
/// digits count upward (c_0 fastest).
std::vector<FqPoly> enumerate_monic(FieldSpec field, int n);
std::vector<FqPoly> enumerate_irreducible(FieldSpec field, int n);
/// Sieve over the monic polynomials of degree n: entry c is 1 when the one whose
/// lower digits read c is a product of an irreducible of degree <= n/2 and a monic
/// cofactor, i.e. reducible. Every polynomial is visited, none is tested.
std::vector<std::uint8_t> reducible_sieve(FieldSpec field, int n);
/// Unmarked entries of reducible_sieve.
std::uint64_t count_irreducible_by_sieve(FieldSpec field, int n);

int mobius(std::uint64_t n) noexcept;
/// Number of monic irreducibles of degree n, (1/n) sum_{d|n} mu(d) q^{n/d}.
std::uint64_t prime_count_exact(FieldSpec field, int n);
/// pi(n) / q^n evaluated without forming q^n, for degrees where q^n overflows.
double prime_density(FieldSpec field, int n);

/// Saturating q^n.
std::uint64_t checked_pow(std::uint64_t base, int exponent);

/// Renders as "c_k*T^k + ... + c_0", dropping zero terms and unit coefficients.
std::string to_string(const FqPoly& f);
/// Accepts the output of to_string plus bare "T", explicit "1*T^1", and
/// repeated powers (which are summed). Throws ParseError with a 0-based offset.
FqPoly parse_poly(FieldSpec field, std::string_view text);

}  // namespace ffm
