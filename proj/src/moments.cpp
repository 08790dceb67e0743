#include "ffm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "ffm/errors.hpp"
#include "ffm/summation.hpp"

namespace ffm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_family(const PrimitiveFamily& family) {
    if (family.size() == 0) throw DomainError("modulus has no primitive characters");
}

double log_q_of(std::uint32_t q) { return std::log(static_cast<double>(q)); }

}  // namespace

double shifted_moment(const PrimitiveFamily& family, const ShiftSpec& shifts) {
    require_family(family);
    std::vector<double> terms;
    terms.reserve(family.size());
    for (const auto& L : family.lpolys) {
        double prod = 1.0;
        for (const auto& [a, t] : shifts.pairs()) prod *= std::pow(std::abs(l_value(L, t)), a);
        terms.push_back(prod);
    }
    return pairwise_sum_real(terms);
}

double moment_rhs_zeta(const Modulus& m, const ShiftSpec& shifts) {
    const double lQ = m.log_norm();
    const std::uint32_t q = m.field().q();
    const auto p = shifts.pairs();
    double log_rhs = std::log(static_cast<double>(m.phi())) + shifts.exponent_square_sum() / 4.0 * std::log(lQ);
    for (std::size_t j = 0; j < p.size(); ++j) {
        for (std::size_t l = j + 1; l < p.size(); ++l) {
            const cplx s{1.0 + 1.0 / lQ, p[j].t - p[l].t};
            log_rhs += p[j].a * p[l].a / 2.0 * std::log(std::abs(zeta_A(q, s)));
        }
    }
    return std::exp(log_rhs);
}

double moment_rhs_min(const Modulus& m, const ShiftSpec& shifts) {
    const double lQ = m.log_norm();
    const double lq = log_q_of(m.field().q());
    const auto p = shifts.pairs();
    double log_rhs = std::log(static_cast<double>(m.phi())) + shifts.exponent_square_sum() / 4.0 * std::log(lQ);
    for (std::size_t j = 0; j < p.size(); ++j) {
        for (std::size_t l = j + 1; l < p.size(); ++l) {
            const double tb = theta_bar(lq * (p[j].t - p[l].t));
            const double factor = tb == 0.0 ? lQ : std::min(lQ, 1.0 / tb);
            log_rhs += p[j].a * p[l].a / 2.0 * std::log(factor);
        }
    }
    return std::exp(log_rhs);
}

MomentReport moment_report(const PrimitiveFamily& family, const ShiftSpec& shifts) {
    const Modulus& m = family.modulus();
    MomentReport r;
    r.modulus = to_string(m.poly());
    r.q = m.field().q();
    r.degree = m.degree();
    r.phi = m.phi();
    r.n_primitive = family.size();
    r.lhs = shifted_moment(family, shifts);
    r.rhs_zeta = moment_rhs_zeta(m, shifts);
    r.rhs_min = moment_rhs_min(m, shifts);
    r.ratio_zeta = r.lhs / r.rhs_zeta;
    r.ratio_min = r.lhs / r.rhs_min;
    r.crude_exponent = std::log(r.lhs / static_cast<double>(m.phi())) / std::log(m.log_norm());
    return r;
}

// ---------------------------------------------------------------------------

cplx char_sum(const DirichletChar& chi, NormCutoff Y) {
    const FieldSpec F = chi.group().modulus().field();
    std::vector<cplx> terms;
    for (int n = 0; n <= Y.log_q(); ++n) {
        for (const auto& f : enumerate_monic(F, n)) terms.push_back(char_eval(chi, f));
    }
    return pairwise_sum_complex(terms);
}

cplx char_sum_from_lpoly(const LPolynomial& L, NormCutoff Y) {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(Y.log_q()) + 1, L.coeffs.size());
    return pairwise_sum_complex(std::span<const cplx>(L.coeffs.data(), n));
}

RatioReport charsum_moment(const PrimitiveFamily& family, double m, NormCutoff Y) {
    require_family(family);
    if (!(m >= 0.0)) throw DomainError("moment exponent must be >= 0");
    std::vector<double> terms;
    for (const auto& L : family.lpolys) terms.push_back(std::pow(std::abs(char_sum_from_lpoly(L, Y)), 2.0 * m));
    RatioReport r;
    r.moment = pairwise_sum_real(terms);
    const Modulus& mod = family.modulus();
    const double lY = Y.log_value(mod.field());
    r.normaliser = static_cast<double>(mod.phi()) * std::exp(m * lY) * std::pow(mod.log_norm(), (m - 1.0) * (m - 1.0));
    r.ratio = r.moment / r.normaliser;
    return r;
}

PerronResult perron_partial_sum(const LPolynomial& L, int N, double r, int M) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("contour radius must lie in (0, 1)");
    if (N < 0) throw DomainError("N must be >= 0");
    const int dQ = static_cast<int>(L.coeffs.size());
    if (M < 4 * (dQ + N + 2)) throw DomainError("too few sample points on the contour");

    // (1/2 pi i) \oint g(u) du / u^{N+1} = mean over the circle of g(u) / u^N
    std::vector<cplx> samples(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
        const cplx u = std::polar(r, kTwoPi * k / M);
        samples[static_cast<std::size_t>(k)] = l_eval_u(L, u) / ((1.0 - u) * std::pow(u, N));
    }
    PerronResult out;
    out.quadrature = pairwise_sum_complex(samples) / static_cast<double>(M);
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(N) + 1, L.coeffs.size());
    out.direct = pairwise_sum_complex(std::span<const cplx>(L.coeffs.data(), n));
    double l1 = 0.0;
    for (const auto& c : L.coeffs) l1 += std::abs(c);
    out.aliasing_bound = std::pow(r, M) / (1.0 - r) * l1;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double abs_on_circle(const LPolynomial& L, double t) {
    return std::abs(l_eval_u(L, std::polar(1.0 / std::sqrt(static_cast<double>(L.q)), t)));
}

// angles t in [0, 2 pi) with L(e^{it}/sqrt q) = 0: inverse roots alpha with
// |alpha| = sqrt q vanish at t = -arg(alpha)
std::vector<double> zeros_on_circle(const LPolynomial& L) {
    const double sq = std::sqrt(static_cast<double>(L.q));
    std::vector<double> out;
    for (const auto& a : l_inverse_roots(L)) {
        if (std::fabs(std::abs(a) - sq) > 1e-6) continue;
        double t = std::fmod(-std::arg(a), kTwoPi);
        if (t < 0) t += kTwoPi;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return y - x < 1e-12; }), out.end());
    if (out.size() > 1 && kTwoPi - out.back() + out.front() < 1e-12) out.pop_back();
    return out;
}

}  // namespace

double circle_integral(const LPolynomial& L, int quad_points, QuadratureRule rule) {
    if (quad_points < 1) throw DomainError("need at least one quadrature point");
    const auto f = [&](double t) { return abs_on_circle(L, t); };
    std::vector<double> zeros;
    if (rule == QuadratureRule::kink_aware) zeros = zeros_on_circle(L);

    if (zeros.empty()) {
        // smooth periodic integrand: the trapezoid rule is spectrally accurate
        std::vector<double> v(static_cast<std::size_t>(quad_points));
        for (int k = 0; k < quad_points; ++k) v[static_cast<std::size_t>(k)] = f(kTwoPi * k / quad_points);
        return pairwise_sum_real(v) * kTwoPi / quad_points;
    }

    constexpr int kPanelPoints = 20;
    using Rule = boost::math::quadrature::gauss<double, kPanelPoints>;
    std::vector<double> pieces;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        const double a = zeros[i];
        const double b = i + 1 < zeros.size() ? zeros[i + 1] : zeros.front() + kTwoPi;
        const double len = b - a;
        const int panels =
            std::max(1, static_cast<int>(std::ceil(quad_points * len / kTwoPi / kPanelPoints)));
        for (int p = 0; p < panels; ++p) {
            const double lo = a + len * p / panels;
            const double hi = a + len * (p + 1) / panels;
            pieces.push_back(Rule::integrate(f, lo, hi));
        }
    }
    return pairwise_sum_real(pieces);
}

RatioReport integral_moment(const PrimitiveFamily& family, double m, int quad_points, QuadratureRule rule) {
    require_family(family);
    if (!(m > 2.0)) throw DomainError("integral moment is reported for m > 2");
    if (quad_points < 256) throw DomainError("integral moment needs at least 256 quadrature points");
    std::vector<double> terms;
    for (const auto& L : family.lpolys) terms.push_back(std::pow(circle_integral(L, quad_points, rule), 2.0 * m));
    RatioReport r;
    r.moment = pairwise_sum_real(terms);
    const Modulus& mod = family.modulus();
    r.normaliser = static_cast<double>(mod.phi()) * std::pow(mod.log_norm(), (m - 1.0) * (m - 1.0));
    r.ratio = r.moment / r.normaliser;
    return r;
}

}  // namespace ffm
