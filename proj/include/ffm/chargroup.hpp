#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ffm/ffpoly.hpp"

namespace ffm {

struct PrimePower {
    FqPoly prime;
    int exponent;
};

/// A monic modulus Q of degree >= 2 together with its factorization.
class Modulus {
  public:
    const FqPoly& poly() const noexcept { return poly_; }
    const FieldSpec& field() const noexcept { return poly_.field(); }
    std::span<const PrimePower> factors() const noexcept { return factors_; }
    int degree() const noexcept { return poly_.degree(); }
    std::uint64_t norm() const noexcept { return norm_; }
    double log_norm() const noexcept { return poly_.log_norm(); }
    std::uint64_t phi() const noexcept { return phi_; }

  private:
    friend Modulus factor_modulus(const FqPoly& Q);
    explicit Modulus(FqPoly Q) : poly_(std::move(Q)) {}

    FqPoly poly_;
    std::vector<PrimePower> factors_;
    std::uint64_t norm_ = 0;
    std::uint64_t phi_ = 0;
};

/// Trial division by monic irreducibles in enumeration order. Factors are
/// listed in increasing order of the prime.
Modulus factor_modulus(const FqPoly& Q);
std::uint64_t euler_phi(const Modulus& m);
/// Number of primitive characters from the multiplicative formula
/// prod_{P^e || Q} (|P|^e - 2|P|^{e-1} + [e >= 2] |P|^{e-2}).
std::uint64_t primitive_count_formula(const Modulus& m);

/// Arithmetic in A/QA on residue codes (see FqPoly::code).
class ResidueRing {
  public:
    explicit ResidueRing(FqPoly modulus);

    const FqPoly& modulus() const noexcept { return modulus_; }
    std::uint64_t size() const noexcept { return size_; }
    std::uint64_t one() const noexcept { return 1; }

    std::uint64_t reduce(const FqPoly& f) const;
    FqPoly lift(std::uint64_t code) const { return FqPoly::from_code(modulus_.field(), code); }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    bool is_unit(std::uint64_t a) const;

  private:
    FqPoly modulus_;
    std::uint32_t q_;
    int degree_;
    std::uint64_t size_;
};

/// (A/QA)^* with an explicit basis g_1..g_r of orders m_1..m_r and a full
/// discrete-log table. Units are addressed by a packed index: the exponent
/// vector read as a mixed-radix number with a_r varying fastest.
class UnitGroup {
  public:
    const Modulus& modulus() const noexcept { return modulus_; }
    const ResidueRing& ring() const noexcept { return ring_; }
    std::span<const FqPoly> generators() const noexcept { return generators_; }
    std::span<const std::uint64_t> orders() const noexcept { return orders_; }
    std::size_t rank() const noexcept { return orders_.size(); }
    std::uint64_t order() const noexcept { return unit_codes_.size(); }
    /// lcm of the generator orders; character values are exponent()-th roots of unity.
    std::uint64_t exponent() const noexcept { return exponent_; }

    /// Packed index of the unit with residue `code`, or nullopt for non-units.
    std::optional<std::uint64_t> dlog_code(std::uint64_t code) const;
    std::optional<std::uint64_t> dlog(const FqPoly& f) const { return dlog_code(ring_.reduce(f)); }
    std::uint64_t unit_code(std::uint64_t packed) const { return unit_codes_.at(packed); }
    std::vector<std::uint64_t> unpack(std::uint64_t packed) const;
    std::uint64_t pack(std::span<const std::uint64_t> exponents) const;

    /// For each prime P | Q (in factor order), packed indices of the kernel of
    /// (A/QA)^* -> (A/(Q/P)A)^*.
    const std::vector<std::vector<std::uint64_t>>& reduction_kernels() const noexcept { return kernels_; }

    /// Raw table: entry c is the packed index of residue c, or -1.
    std::span<const std::int64_t> dlog_table() const noexcept { return dlog_; }

  private:
    friend UnitGroup unit_group(const Modulus& m);
    friend UnitGroup unit_group_from_json(const nlohmann::json& j, const Modulus& m);
    UnitGroup(Modulus m) : modulus_(std::move(m)), ring_(modulus_.poly()) {}
    void finish_tables();
    void build_kernels();

    Modulus modulus_;
    ResidueRing ring_;
    std::vector<FqPoly> generators_;
    std::vector<std::uint64_t> orders_;
    std::vector<std::uint64_t> strides_;
    std::vector<std::int64_t> dlog_;
    std::vector<std::uint64_t> unit_codes_;
    std::uint64_t exponent_ = 1;
    std::vector<std::vector<std::uint64_t>> kernels_;
};

/// CRT split over prime powers; on each P^e a cyclic generator of order
/// |P| - 1 and a Smith-normal-form basis of the 1 + P subgroup. The
/// exponent-vector map is checked to be a bijection onto the units.
UnitGroup unit_group(const Modulus& m);

constexpr int kUnitGroupCacheVersion = 1;
nlohmann::json unit_group_to_json(const UnitGroup& g);
/// Rebuilds from a cache entry. Checks version, (q, Q), table size, and 100
/// pseudo-random exponent vectors round-tripping through the dlog table.
/// Throws std::runtime_error on any mismatch.
UnitGroup unit_group_from_json(const nlohmann::json& j, const Modulus& m);

/// Character mod Q given by exponents (k_1..k_r): chi(g_j) = exp(2 pi i k_j / m_j).
class DirichletChar {
  public:
    DirichletChar(std::shared_ptr<const UnitGroup> group, std::vector<std::uint64_t> exponents);

    const UnitGroup& group() const noexcept { return *group_; }
    const std::shared_ptr<const UnitGroup>& group_ptr() const noexcept { return group_; }
    std::span<const std::uint64_t> exponents() const noexcept { return exponents_; }
    /// Position in the lexicographic order of all_characters (k_1 most significant).
    std::uint64_t index() const noexcept { return index_; }
    bool principal() const noexcept { return principal_; }
    bool primitive() const noexcept { return primitive_; }

    /// chi(unit) = exp(2 pi i phase / group().exponent()).
    std::uint64_t phase_of_unit(std::uint64_t packed) const;
    std::optional<std::uint64_t> phase(const FqPoly& f) const;

    DirichletChar conjugate() const;

  private:
    std::shared_ptr<const UnitGroup> group_;
    std::vector<std::uint64_t> exponents_;
    std::vector<std::uint64_t> weights_;  // k_j * (M / m_j) mod M
    std::uint64_t index_ = 0;
    bool principal_ = false;
    bool primitive_ = false;
};

std::vector<DirichletChar> all_characters(std::shared_ptr<const UnitGroup> group);
bool is_primitive(const DirichletChar& chi);
std::complex<double> char_eval(const DirichletChar& chi, const FqPoly& f);
/// exp(2 pi i p / n) with p reduced mod n first.
std::complex<double> root_of_unity(std::uint64_t n, std::uint64_t p);

}  // namespace ffm
