#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ffm/lfunc.hpp"
#include "ffm/primesums.hpp"
#include "ffm/shifts.hpp"

namespace ffm {

/// sum over primitive chi of prod_j |L(1/2 + i t_j, chi)|^{a_j}, pairwise-summed
/// in canonical character order. Throws DomainError for an empty family.
double shifted_moment(const PrimitiveFamily& family, const ShiftSpec& shifts);

/// phi(Q) (log|Q|)^{sum a_j^2 / 4} prod_{j<l} |zeta_A(1 + i(t_j - t_l) + 1/log|Q|)|^{a_j a_l / 2}
double moment_rhs_zeta(const Modulus& m, const ShiftSpec& shifts);
/// Same shape with each zeta factor replaced by min(log|Q|, 1/theta_bar(log q (t_j - t_l))),
/// and log|Q| when theta_bar vanishes.
double moment_rhs_min(const Modulus& m, const ShiftSpec& shifts);

struct MomentReport {
    std::string modulus;
    std::uint32_t q = 0;
    int degree = 0;
    std::uint64_t phi = 0;
    std::uint64_t n_primitive = 0;
    double lhs = 0;
    double rhs_zeta = 0;
    double rhs_min = 0;
    double ratio_zeta = 0;
    double ratio_min = 0;
    /// log(lhs / phi(Q)) / log log|Q|: the exponent in the crude phi(Q)(log|Q|)^{O(1)} bound.
    double crude_exponent = 0;
};
MomentReport moment_report(const PrimitiveFamily& family, const ShiftSpec& shifts);

/// sum over monic f with |f| <= Y of chi(f), by direct enumeration.
cplx char_sum(const DirichletChar& chi, NormCutoff Y);
/// The same sum read off the L-polynomial: sum_{n <= log_q Y} c_n.
cplx char_sum_from_lpoly(const LPolynomial& L, NormCutoff Y);

struct RatioReport {
    double moment = 0;
    double normaliser = 0;
    double ratio = 0;
};

/// S_m(Q, Y) = sum over primitive chi of |sum_{|f|<=Y} chi(f)|^{2m}, normalised by
/// phi(Q) Y^m (log|Q|)^{(m-1)^2}.
RatioReport charsum_moment(const PrimitiveFamily& family, double m, NormCutoff Y);

struct PerronResult {
    cplx quadrature;
    cplx direct;
    double aliasing_bound;  // r^M / (1 - r) * sum |c_n|
};
/// (1 / 2 pi i) \oint_{|u|=r} L(u) du / ((1 - u) u^{N+1}) by the M-point rule on the
/// circle, next to the direct partial sum sum_{n<=N} c_n. Requires 0 < r < 1 and
/// M >= 4 (d(Q) + N + 2).
PerronResult perron_partial_sum(const LPolynomial& L, int N, double r, int M);

enum class QuadratureRule {
    /// Gauss-Legendre panels split at the zeros of L on the circle.
    kink_aware,
    trapezoid,
};

/// \int_0^{2 pi} |L(e^{it} / sqrt q)| dt.
double circle_integral(const LPolynomial& L, int quad_points, QuadratureRule rule = QuadratureRule::kink_aware);

/// sum over primitive chi of (\int |L(e^{it}/sqrt q)| dt)^{2m}, normalised by
/// phi(Q) (log|Q|)^{(m-1)^2}. Requires m > 2 and quad_points >= 256.
RatioReport integral_moment(const PrimitiveFamily& family, double m, int quad_points,
                            QuadratureRule rule = QuadratureRule::kink_aware);

}  // namespace ffm
