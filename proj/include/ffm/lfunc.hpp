#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "ffm/chargroup.hpp"
#include "ffm/primesums.hpp"
#include "ffm/shifts.hpp"

namespace ffm {

using cplx = std::complex<double>;

/// L(u, chi) = sum_n c_n u^n for a non-principal character, c_n summed over
/// monic f of degree n for n = 0 .. d(Q)-1. `probe` holds c_n for
/// n = d(Q), d(Q)+1, ... when requested; those vanish exactly in theory.
struct LPolynomial {
    std::uint64_t char_index = 0;
    std::uint32_t q = 0;
    std::vector<cplx> coeffs;
    std::vector<cplx> probe;

    int degree_bound() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    LPolynomial conjugated() const;
};

/// Direct route: enumerate monic f by degree and evaluate the character.
LPolynomial l_polynomial(const DirichletChar& chi, int probe_degrees = 0);

/// Batch route: counts of monic polynomials per unit class are gathered once
/// per modulus and each character applied to the counts.
class LBatch {
  public:
    LBatch(std::shared_ptr<const UnitGroup> group, int probe_degrees = 0);
    LPolynomial compute(const DirichletChar& chi) const;

  private:
    struct ClassCount {
        std::uint64_t unit;
        std::uint64_t count;
    };
    std::shared_ptr<const UnitGroup> group_;
    std::vector<std::vector<ClassCount>> counts_;  // per degree n
    int degree_;
};

cplx l_eval_u(const LPolynomial& L, cplx u);
/// Reduces t into [0, 2 pi / log q).
double reduce_shift(double t, std::uint32_t q);
/// u = q^{-1/2 - it}, the point where L(u) equals L(1/2 + it, chi).
cplx critical_point(double t, std::uint32_t q);
/// L(1/2 + it, chi), t reduced by the period first.
cplx l_value(const LPolynomial& L, double t);
double log_abs_l_value(const LPolynomial& L, double t);

/// zeta_A(s) = 1 / (1 - q^{1-s}); throws PoleError when q^{1-s} = 1.
cplx zeta_A(std::uint32_t q, cplx s);

/// alpha_i with L(u) = prod (1 - alpha_i u), from the companion matrix of the
/// reversed polynomial. Leading coefficients below 1e-9 are trimmed first;
/// a constant polynomial gives an empty list.
std::vector<cplx> l_inverse_roots(const LPolynomial& L);
/// Re-expands prod (1 - alpha_i u).
std::vector<cplx> expand_from_inverse_roots(const std::vector<cplx>& roots);

/// Right-hand side of the pointwise bound
///   m/h + (1/h) Re sum_{j>=1, j d(P) <= h} chi(P^j) (h - j d(P)) / (j |P|^{j(1/2 + it + 1/(h log q))})
/// with m = d(Q) - 1. Requires a primitive character and 1 <= h <= m.
double log_l_bound_pointwise(const DirichletChar& chi, const PrimeTable& primes, double t, int h);

struct BoundDefect {
    double bound;        // the bound without its O(1) term
    double log_abs_l;    // the quantity being bounded
    double defect;       // log_abs_l - bound
};

/// Prime sum with cutoff x = q^h, second-order prime squares, plus
/// log|Q| / log x, compared against log|L(1/2+it)|.
BoundDefect log_l_bound_simplified(const DirichletChar& chi, const LPolynomial& L, const PrimeTable& primes,
                                   double t, NormCutoff x);

/// h(f) = (1/2) sum_j a_j |f|^{-i t_j}.
cplx h_weight(const FqPoly& f, const ShiftSpec& shifts);
cplx h_weight_of_degree(int degree, std::uint32_t q, const ShiftSpec& shifts);

/// Weighted bound for sum_j a_j log|L(1/2 + i t_j)| with a = sum a_j + 10.
BoundDefect shifted_log_bound(const DirichletChar& chi, const LPolynomial& L, const PrimeTable& primes,
                              const ShiftSpec& shifts, NormCutoff x);

/// log|L(1/2+it)| log log|Q| / log|Q|; the constant C in |L| << exp(C log|Q| / log log|Q|).
double single_bound_constant(const LPolynomial& L, const Modulus& m, double t);

/// All primitive characters of one modulus with their L-polynomials, in
/// canonical character order.
struct PrimitiveFamily {
    std::shared_ptr<const UnitGroup> group;
    std::vector<DirichletChar> characters;
    std::vector<LPolynomial> lpolys;

    const Modulus& modulus() const { return group->modulus(); }
    std::size_t size() const noexcept { return characters.size(); }
};

PrimitiveFamily primitive_family(std::shared_ptr<const UnitGroup> group, int probe_degrees = 0);

}  // namespace ffm
