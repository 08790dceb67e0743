#include "ffm/ffpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "ffm/errors.hpp"

namespace ffm {

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

FieldSpec::FieldSpec(std::uint32_t q) : q_(q) {
    if (q < 2 || !is_prime(q)) throw DomainError("field size " + std::to_string(q) + " is not a prime");
    // products are formed in 64 bits
    if (q > (1u << 31)) throw DomainError("field size too large");
}

std::uint32_t FieldSpec::inv(std::uint32_t a) const {
    if (a % q_ == 0) throw DomainError("zero has no inverse in F_q");
    // Fermat: a^{q-2}
    std::uint64_t result = 1;
    std::uint64_t base = a % q_;
    std::uint32_t e = q_ - 2;
    while (e > 0) {
        if (e & 1u) result = result * base % q_;
        base = base * base % q_;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(result);
}

// ---------------------------------------------------------------------------

FqPoly::FqPoly(FieldSpec field, std::vector<std::uint32_t> coeffs) : field_(field), coeffs_(std::move(coeffs)) {
    for (auto c : coeffs_) {
        if (c >= field_.q()) throw DomainError("coefficient " + std::to_string(c) + " outside [0, q)");
    }
    trim();
}

void FqPoly::trim() noexcept {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

FqPoly FqPoly::constant(FieldSpec field, std::uint32_t c) { return FqPoly(field, {c % field.q()}); }

FqPoly FqPoly::monomial(FieldSpec field, int k, std::uint32_t c) {
    if (k < 0) throw DomainError("negative exponent");
    std::vector<std::uint32_t> v(static_cast<std::size_t>(k) + 1, 0);
    v.back() = c % field.q();
    return FqPoly(field, std::move(v));
}

FqPoly FqPoly::from_code(FieldSpec field, std::uint64_t code) {
    std::vector<std::uint32_t> v;
    while (code > 0) {
        v.push_back(static_cast<std::uint32_t>(code % field.q()));
        code /= field.q();
    }
    return FqPoly(field, std::move(v));
}

std::uint64_t FqPoly::norm() const {
    if (is_zero()) return 0;
    std::uint64_t n = checked_pow(field_.q(), degree());
    if (n == std::numeric_limits<std::uint64_t>::max()) throw DomainError("norm overflows 64 bits");
    return n;
}

double FqPoly::log_norm() const {
    if (is_zero()) throw DomainError("log norm of the zero polynomial");
    return degree() * std::log(static_cast<double>(field_.q()));
}

std::uint64_t FqPoly::code() const noexcept {
    std::uint64_t c = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) c = c * field_.q() + *it;
    return c;
}

FqPoly FqPoly::scaled(std::uint32_t c) const {
    FqPoly r(field_);
    c %= field_.q();
    if (c == 0) return r;
    r.coeffs_.reserve(coeffs_.size());
    for (auto a : coeffs_) r.coeffs_.push_back(field_.mul(a, c));
    return r;
}

FqPoly FqPoly::monic() const {
    if (is_zero()) throw DomainError("zero polynomial has no monic associate");
    return scaled(field_.inv(leading()));
}

FqPoly& FqPoly::operator+=(const FqPoly& rhs) {
    if (!(field_ == rhs.field_)) throw FieldMismatch();
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0);
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] = field_.add(coeffs_[i], rhs.coeffs_[i]);
    trim();
    return *this;
}

FqPoly& FqPoly::operator-=(const FqPoly& rhs) {
    if (!(field_ == rhs.field_)) throw FieldMismatch();
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0);
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] = field_.sub(coeffs_[i], rhs.coeffs_[i]);
    trim();
    return *this;
}

FqPoly operator*(const FqPoly& lhs, const FqPoly& rhs) {
    if (!(lhs.field_ == rhs.field_)) throw FieldMismatch();
    FqPoly r(lhs.field_);
    if (lhs.is_zero() || rhs.is_zero()) return r;
    const std::uint64_t q = lhs.field_.q();
    std::vector<std::uint64_t> acc(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, 0);
    for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i) {
        if (lhs.coeffs_[i] == 0) continue;
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) {
            acc[i + j] = (acc[i + j] + static_cast<std::uint64_t>(lhs.coeffs_[i]) * rhs.coeffs_[j]) % q;
        }
    }
    r.coeffs_.assign(acc.begin(), acc.end());
    r.trim();
    return r;
}

std::strong_ordering operator<=>(const FqPoly& a, const FqPoly& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    for (int k = a.degree(); k >= 0; --k) {
        if (auto c = a.coeff(k) <=> b.coeff(k); c != 0) return c;
    }
    return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------

FqPoly poly_mul(const FqPoly& a, const FqPoly& b) { return a * b; }

DivMod poly_divmod(const FqPoly& a, const FqPoly& b) {
    if (!(a.field() == b.field())) throw FieldMismatch();
    if (b.is_zero()) throw DivisionByZero();
    const FieldSpec& F = a.field();
    if (a.degree() < b.degree()) return {FqPoly(F), a};

    std::vector<std::uint32_t> rem(a.coeffs().begin(), a.coeffs().end());
    const auto bc = b.coeffs();
    const int db = b.degree();
    const std::uint32_t lead_inv = F.inv(b.leading());
    std::vector<std::uint32_t> quot(static_cast<std::size_t>(a.degree() - db) + 1, 0);
    for (int k = a.degree(); k >= db; --k) {
        std::uint32_t c = rem[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        std::uint32_t factor = F.mul(c, lead_inv);
        quot[static_cast<std::size_t>(k - db)] = factor;
        for (int j = 0; j <= db; ++j) {
            auto& slot = rem[static_cast<std::size_t>(k - db + j)];
            slot = F.sub(slot, F.mul(factor, bc[static_cast<std::size_t>(j)]));
        }
    }
    rem.resize(static_cast<std::size_t>(db));
    return {FqPoly(F, std::move(quot)), FqPoly(F, std::move(rem))};
}

FqPoly poly_mod(const FqPoly& a, const FqPoly& b) { return poly_divmod(a, b).remainder; }

FqPoly poly_gcd(const FqPoly& a, const FqPoly& b) {
    if (!(a.field() == b.field())) throw FieldMismatch();
    if (a.is_zero() && b.is_zero()) throw DomainError("gcd(0, 0) is undefined");
    FqPoly x = a, y = b;
    while (!y.is_zero()) {
        FqPoly r = poly_mod(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

ExtendedGcd poly_xgcd(const FqPoly& a, const FqPoly& b) {
    if (!(a.field() == b.field())) throw FieldMismatch();
    if (a.is_zero() && b.is_zero()) throw DomainError("gcd(0, 0) is undefined");
    const FieldSpec& F = a.field();
    FqPoly r0 = a, r1 = b;
    FqPoly s0 = FqPoly::constant(F, 1), s1(F);
    FqPoly t0(F), t1 = FqPoly::constant(F, 1);
    while (!r1.is_zero()) {
        auto [quo, rem] = poly_divmod(r0, r1);
        FqPoly s2 = s0 - quo * s1;
        FqPoly t2 = t0 - quo * t1;
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    const std::uint32_t li = F.inv(r0.leading());
    return {r0.scaled(li), s0.scaled(li), t0.scaled(li)};
}

FqPoly poly_inverse_mod(const FqPoly& a, const FqPoly& m) {
    auto g = poly_xgcd(poly_mod(a, m), m);
    if (!g.gcd.is_one()) throw DomainError("polynomial is not invertible modulo " + to_string(m));
    return poly_mod(g.s, m);
}

FqPoly poly_powmod(const FqPoly& base, std::uint64_t exponent, const FqPoly& modulus) {
    FqPoly result = poly_mod(FqPoly::constant(base.field(), 1), modulus);
    FqPoly b = poly_mod(base, modulus);
    while (exponent > 0) {
        if (exponent & 1u) result = poly_mod(result * b, modulus);
        exponent >>= 1;
        if (exponent > 0) b = poly_mod(b * b, modulus);
    }
    return result;
}

namespace {

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// T^{q^k} mod f by k successive q-th powers.
FqPoly frobenius_power_of_t(const FqPoly& f, int k) {
    FqPoly x = poly_mod(FqPoly::T(f.field()), f);
    for (int i = 0; i < k; ++i) x = poly_powmod(x, f.field().q(), f);
    return x;
}

}  // namespace

bool is_irreducible(const FqPoly& f) {
    if (f.degree() < 1) throw DomainError("irreducibility is defined for degree >= 1");
    const int n = f.degree();
    if (n == 1) return true;
    const FqPoly t = FqPoly::T(f.field());
    if (!(frobenius_power_of_t(f, n) == poly_mod(t, f))) return false;
    for (auto l : prime_divisors(static_cast<std::uint64_t>(n))) {
        FqPoly h = frobenius_power_of_t(f, n / static_cast<int>(l)) - t;
        if (h.is_zero() || !poly_gcd(h, f).is_one()) return false;
    }
    return true;
}

std::vector<FqPoly> enumerate_monic(FieldSpec field, int n) {
    if (n < 0) throw DomainError("negative degree");
    const std::uint64_t count = checked_pow(field.q(), n);
    if (count > (std::uint64_t{1} << 32)) throw DomainError("enumeration too large");
    std::vector<FqPoly> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::uint32_t> digits(static_cast<std::size_t>(n) + 1, 0);
    digits.back() = 1;
    for (std::uint64_t i = 0; i < count; ++i) {
        out.emplace_back(field, digits);
        for (int k = 0; k < n; ++k) {
            auto& d = digits[static_cast<std::size_t>(k)];
            if (++d < field.q()) break;
            d = 0;
        }
    }
    return out;
}

std::vector<FqPoly> enumerate_irreducible(FieldSpec field, int n) {
    if (n < 1) throw DomainError("irreducibles have degree >= 1");
    std::vector<FqPoly> out;
    for (auto& f : enumerate_monic(field, n)) {
        if (is_irreducible(f)) out.push_back(std::move(f));
    }
    return out;
}

std::vector<std::uint8_t> reducible_sieve(FieldSpec field, int n) {
    if (n < 1) throw DomainError("sieve needs degree >= 1");
    const std::uint32_t q = field.q();
    const std::uint64_t size = checked_pow(q, n);
    if (size > (std::uint64_t{1} << 32)) throw DomainError("enumeration too large");
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(size), 0);
    std::vector<std::uint64_t> qpow(static_cast<std::size_t>(n) + 1, 1);
    for (int j = 1; j <= n; ++j) qpow[static_cast<std::size_t>(j)] = qpow[static_cast<std::size_t>(j) - 1] * q;

    std::vector<std::uint32_t> g, prod(static_cast<std::size_t>(n) + 1);
    for (int k = 1; 2 * k <= n; ++k) {
        const int m = n - k;
        for (const auto& P : enumerate_irreducible(field, k)) {
            const auto p = P.coeffs();
            g.assign(static_cast<std::size_t>(m) + 1, 0);
            g.back() = 1;
            for (std::uint64_t i = 0; i < qpow[static_cast<std::size_t>(m)]; ++i) {
                std::fill(prod.begin(), prod.end(), 0);
                for (int a = 0; a <= k; ++a) {
                    const std::uint32_t pa = p[static_cast<std::size_t>(a)];
                    if (pa == 0) continue;
                    for (int b = 0; b <= m; ++b) prod[static_cast<std::size_t>(a + b)] += pa * g[static_cast<std::size_t>(b)];
                }
                std::uint64_t code = 0;
                for (int j = 0; j < n; ++j) code += (prod[static_cast<std::size_t>(j)] % q) * qpow[static_cast<std::size_t>(j)];
                mark[static_cast<std::size_t>(code)] = 1;
                for (int b = 0; b < m; ++b) {
                    if (++g[static_cast<std::size_t>(b)] < q) break;
                    g[static_cast<std::size_t>(b)] = 0;
                }
            }
        }
    }
    return mark;
}

std::uint64_t count_irreducible_by_sieve(FieldSpec field, int n) {
    const auto mark = reducible_sieve(field, n);
    return static_cast<std::uint64_t>(std::count(mark.begin(), mark.end(), std::uint8_t{0}));
}

int mobius(std::uint64_t n) noexcept {
    if (n == 0) return 0;
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            sign = -sign;
        }
    }
    if (n > 1) sign = -sign;
    return sign;
}

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t r = 1;
    for (int i = 0; i < exponent; ++i) {
        if (base != 0 && r > kMax / base) return kMax;
        r *= base;
    }
    return r;
}

std::uint64_t prime_count_exact(FieldSpec field, int n) {
    if (n < 1) throw DomainError("prime counts are defined for degree >= 1");
    if (checked_pow(field.q(), n) == std::numeric_limits<std::uint64_t>::max()) {
        throw DomainError("q^n overflows 64 bits");
    }
    // signed accumulation: q^n dominates, so the total stays positive
    __int128 total = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d != 0) continue;
        total += static_cast<__int128>(mobius(static_cast<std::uint64_t>(d))) *
                 static_cast<__int128>(checked_pow(field.q(), n / d));
    }
    return static_cast<std::uint64_t>(total / n);
}

double prime_density(FieldSpec field, int n) {
    if (n < 1) throw DomainError("prime counts are defined for degree >= 1");
    const double lq = std::log(static_cast<double>(field.q()));
    double total = 0.0;
    for (int d = n; d >= 1; --d) {  // smallest terms first
        if (n % d != 0) continue;
        int mu = mobius(static_cast<std::uint64_t>(d));
        if (mu == 0) continue;
        total += mu * std::exp(-(n - n / d) * lq);
    }
    return total / n;
}

// ---------------------------------------------------------------------------

std::string to_string(const FqPoly& f) {
    if (f.is_zero()) return "0";
    std::string out;
    for (int k = f.degree(); k >= 0; --k) {
        std::uint32_t c = f.coeff(k);
        if (c == 0) continue;
        if (!out.empty()) out += " + ";
        if (k == 0) {
            out += std::to_string(c);
            continue;
        }
        if (c != 1) out += std::to_string(c) + "*";
        out += "T";
        if (k > 1) out += "^" + std::to_string(k);
    }
    return out;
}

namespace {

class PolyParser {
  public:
    PolyParser(FieldSpec field, std::string_view text) : field_(field), text_(text) {}

    FqPoly parse() {
        std::vector<std::uint64_t> acc;
        skip_ws();
        if (pos_ == text_.size()) throw ParseError("empty polynomial", pos_);
        while (true) {
            auto [coeff, power] = term();
            if (acc.size() <= power) acc.resize(power + 1, 0);
            acc[power] = (acc[power] + coeff) % field_.q();
            skip_ws();
            if (pos_ == text_.size()) break;
            if (text_[pos_] != '+') throw ParseError("expected '+'", pos_);
            ++pos_;
            skip_ws();
        }
        std::vector<std::uint32_t> coeffs(acc.begin(), acc.end());
        return FqPoly(field_, std::move(coeffs));
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_digit() const { return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])); }

    std::uint64_t number() {
        if (!at_digit()) throw ParseError("expected a number", pos_);
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (at_digit()) {
            if (pos_ - start > 9) throw ParseError("number too long", start);
            v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
            ++pos_;
        }
        return v;
    }

    std::pair<std::uint64_t, std::size_t> term() {
        std::uint64_t coeff = 1;
        bool have_coeff = false;
        if (at_digit()) {
            const std::size_t at = pos_;
            coeff = number();
            if (coeff >= field_.q()) throw ParseError("coefficient outside [0, q)", at);
            have_coeff = true;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                skip_ws();
            } else {
                return {coeff, 0};
            }
        }
        if (pos_ >= text_.size() || text_[pos_] != 'T') {
            throw ParseError(have_coeff ? "expected 'T' after '*'" : "expected a coefficient or 'T'", pos_);
        }
        ++pos_;
        skip_ws();
        std::size_t power = 1;
        if (pos_ < text_.size() && text_[pos_] == '^') {
            ++pos_;
            skip_ws();
            const std::size_t at = pos_;
            auto p = number();
            if (p > 4096) throw ParseError("exponent too large", at);
            power = static_cast<std::size_t>(p);
        }
        return {coeff, power};
    }

    FieldSpec field_;
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

FqPoly parse_poly(FieldSpec field, std::string_view text) { return PolyParser(field, text).parse(); }

}  // namespace ffm
