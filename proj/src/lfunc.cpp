#include "ffm/lfunc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "ffm/errors.hpp"
#include "ffm/summation.hpp"

namespace ffm {

LPolynomial LPolynomial::conjugated() const {
    LPolynomial out = *this;
    for (auto& c : out.coeffs) c = std::conj(c);
    for (auto& c : out.probe) c = std::conj(c);
    return out;
}

namespace {

void require_nonprincipal(const DirichletChar& chi) {
    if (chi.principal()) throw DomainError("L-polynomial of the principal character is not a polynomial");
}

void require_primitive(const DirichletChar& chi) {
    if (chi.principal() || !chi.primitive()) throw DomainError("bound requires a non-principal primitive character");
}

double log_q_of(std::uint32_t q) { return std::log(static_cast<double>(q)); }

}  // namespace

LPolynomial l_polynomial(const DirichletChar& chi, int probe_degrees) {
    require_nonprincipal(chi);
    if (probe_degrees < 0) throw DomainError("negative probe count");
    const Modulus& m = chi.group().modulus();
    const FieldSpec F = m.field();
    LPolynomial L;
    L.char_index = chi.index();
    L.q = F.q();
    const int top = m.degree() - 1 + probe_degrees;
    for (int n = 0; n <= top; ++n) {
        std::vector<cplx> terms;
        for (const auto& f : enumerate_monic(F, n)) terms.push_back(char_eval(chi, f));
        const cplx c = pairwise_sum_complex(terms);
        (n < m.degree() ? L.coeffs : L.probe).push_back(c);
    }
    return L;
}

LBatch::LBatch(std::shared_ptr<const UnitGroup> group, int probe_degrees) : group_(std::move(group)) {
    if (probe_degrees < 0) throw DomainError("negative probe count");
    const Modulus& m = group_->modulus();
    const FieldSpec F = m.field();
    const ResidueRing& ring = group_->ring();
    degree_ = m.degree();
    for (int n = 0; n < degree_ + probe_degrees; ++n) {
        std::vector<ClassCount> counts;
        if (n < degree_) {
            // each monic f of degree n < d(Q) is its own residue; keep enumeration order
            const std::uint64_t base = checked_pow(F.q(), n);
            for (std::uint64_t k = 0; k < base; ++k) {
                if (auto u = group_->dlog_code(base + k)) counts.push_back({*u, 1});
            }
        } else {
            std::map<std::uint64_t, std::uint64_t> tally;
            for (const auto& f : enumerate_monic(F, n)) {
                if (auto u = group_->dlog_code(ring.reduce(f))) ++tally[*u];
            }
            for (auto [u, c] : tally) counts.push_back({u, c});
        }
        counts_.push_back(std::move(counts));
    }
}

LPolynomial LBatch::compute(const DirichletChar& chi) const {
    require_nonprincipal(chi);
    if (chi.group_ptr() != group_ && &chi.group() != group_.get()) {
        if (!(chi.group().modulus().poly() == group_->modulus().poly())) {
            throw DomainError("character belongs to a different modulus");
        }
    }
    const std::uint64_t M = group_->exponent();
    LPolynomial L;
    L.char_index = chi.index();
    L.q = group_->modulus().field().q();
    std::vector<cplx> terms;
    for (std::size_t n = 0; n < counts_.size(); ++n) {
        terms.clear();
        for (const auto& [u, c] : counts_[n]) {
            const cplx z = root_of_unity(M, chi.phase_of_unit(u));
            terms.push_back(c == 1 ? z : static_cast<double>(c) * z);
        }
        const cplx value = pairwise_sum_complex(terms);
        (static_cast<int>(n) < degree_ ? L.coeffs : L.probe).push_back(value);
    }
    return L;
}

// ---------------------------------------------------------------------------

cplx l_eval_u(const LPolynomial& L, cplx u) {
    cplx acc{0.0, 0.0};
    for (auto it = L.coeffs.rbegin(); it != L.coeffs.rend(); ++it) acc = acc * u + *it;
    return acc;
}

double reduce_shift(double t, std::uint32_t q) {
    const double period = 2.0 * std::numbers::pi / log_q_of(q);
    double r = std::fmod(t, period);
    if (r < 0) r += period;
    if (r >= period) r -= period;
    return r;
}

cplx critical_point(double t, std::uint32_t q) {
    const double lq = log_q_of(q);
    const double theta = -reduce_shift(t, q) * lq;
    return std::polar(1.0 / std::sqrt(static_cast<double>(q)), theta);
}

cplx l_value(const LPolynomial& L, double t) { return l_eval_u(L, critical_point(t, L.q)); }

double log_abs_l_value(const LPolynomial& L, double t) { return std::log(std::abs(l_value(L, t))); }

cplx zeta_A(std::uint32_t q, cplx s) {
    const cplx w = std::exp((1.0 - s) * log_q_of(q));
    const cplx denom = 1.0 - w;
    if (std::abs(denom) < 1e-14) throw PoleError("zeta_A has a pole at this point");
    return 1.0 / denom;
}

std::vector<cplx> l_inverse_roots(const LPolynomial& L) {
    int D = L.degree_bound();
    while (D > 0 && std::abs(L.coeffs[static_cast<std::size_t>(D)]) < 1e-9) --D;
    if (D <= 0) return {};
    // roots of u^D L(1/u) = u^D + c_1 u^{D-1} + ... + c_D, which are the alpha_i
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(D, D);
    for (int j = 0; j < D; ++j) C(0, j) = -L.coeffs[static_cast<std::size_t>(j + 1)] / L.coeffs[0];
    for (int i = 1; i < D; ++i) C(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(C, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solver failed");
    std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + D);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

std::vector<cplx> expand_from_inverse_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (const auto& a : roots) {
        c.push_back(0.0);
        for (std::size_t k = c.size() - 1; k > 0; --k) c[k] -= a * c[k - 1];
    }
    return c;
}

// ---------------------------------------------------------------------------
// explicit bounds

double log_l_bound_pointwise(const DirichletChar& chi, const PrimeTable& primes, double t, int h) {
    require_primitive(chi);
    const Modulus& m = chi.group().modulus();
    const int mdeg = m.degree() - 1;
    if (h < 1 || h > mdeg) throw DomainError("h must lie in 1..d(Q)-1");
    if (h > primes.listed_degree()) throw DomainError("prime table does not list enough degrees");
    const std::uint32_t q = m.field().q();
    const double lq = log_q_of(q);
    const double ts = reduce_shift(t, q);
    const std::uint64_t M = chi.group().exponent();

    std::vector<cplx> terms;
    for (int n = 1; n <= h; ++n) {
        for (const auto& P : primes.primes(n)) {
            auto ph = chi.phase(P);
            if (!ph) continue;
            for (int j = 1; j * n <= h; ++j) {
                const int jn = j * n;
                // |P|^{j(1/2 + it + 1/(h log q))} = q^{jn/2} e^{jn/h} e^{i t jn log q}
                const double mag = static_cast<double>(h - jn) / j * std::exp(-0.5 * jn * lq - static_cast<double>(jn) / h);
                const cplx value = root_of_unity(M, (*ph % M) * static_cast<std::uint64_t>(j)) *
                                   std::polar(mag, -ts * jn * lq);
                terms.push_back(value);
            }
        }
    }
    const double s = pairwise_sum_complex(terms).real();
    return static_cast<double>(mdeg) / h + s / h;
}

BoundDefect log_l_bound_simplified(const DirichletChar& chi, const LPolynomial& L, const PrimeTable& primes,
                                   double t, NormCutoff x) {
    require_primitive(chi);
    const Modulus& m = chi.group().modulus();
    const int h = x.log_q();
    if (h < 1) throw DomainError("cutoff must be at least q");
    if (h > primes.listed_degree()) throw DomainError("prime table does not list enough degrees");
    const std::uint32_t q = m.field().q();
    const double lq = log_q_of(q);
    const double ts = reduce_shift(t, q);
    const std::uint64_t M = chi.group().exponent();

    std::vector<cplx> first, second;
    for (int n = 1; n <= h; ++n) {
        for (const auto& P : primes.primes(n)) {
            auto ph = chi.phase(P);
            if (!ph) continue;
            const cplx z = root_of_unity(M, *ph);
            // chi(P) / |P|^{1/2 + it + 1/log x} * log(x/|P|) / log x
            const double mag = std::exp(-0.5 * n * lq - static_cast<double>(n) / h) * (h - n) / h;
            first.push_back(z * std::polar(mag, -ts * n * lq));
            if (2 * n <= h) {
                // (1/2) chi(P^2) / |P|^{1 + 2it}
                const cplx z2 = root_of_unity(M, 2 * (*ph % M));
                second.push_back(0.5 * z2 * std::polar(std::exp(-n * lq), -2.0 * ts * n * lq));
            }
        }
    }
    const double bound = (pairwise_sum_complex(first) + pairwise_sum_complex(second)).real() +
                         static_cast<double>(m.degree()) / h;
    const double lhs = log_abs_l_value(L, t);
    return {bound, lhs, lhs - bound};
}

cplx h_weight_of_degree(int degree, std::uint32_t q, const ShiftSpec& shifts) {
    const double lnorm = degree * log_q_of(q);
    cplx acc{0.0, 0.0};
    for (const auto& [a, t] : shifts.pairs()) acc += std::polar(a, -t * lnorm);
    return 0.5 * acc;
}

cplx h_weight(const FqPoly& f, const ShiftSpec& shifts) {
    if (f.is_zero()) throw DomainError("h(f) is undefined for f = 0");
    return h_weight_of_degree(f.degree(), f.field().q(), shifts);
}

BoundDefect shifted_log_bound(const DirichletChar& chi, const LPolynomial& L, const PrimeTable& primes,
                              const ShiftSpec& shifts, NormCutoff x) {
    require_primitive(chi);
    const Modulus& m = chi.group().modulus();
    const int h = x.log_q();
    if (h < 1) throw DomainError("cutoff must be at least q");
    if (h > primes.listed_degree()) throw DomainError("prime table does not list enough degrees");
    const std::uint32_t q = m.field().q();
    const double lq = log_q_of(q);
    const std::uint64_t M = chi.group().exponent();

    std::vector<cplx> first, second;
    for (int n = 1; n <= h; ++n) {
        const cplx hp = h_weight_of_degree(n, q, shifts);
        const cplx hp2 = h_weight_of_degree(2 * n, q, shifts);
        for (const auto& P : primes.primes(n)) {
            auto ph = chi.phase(P);
            if (!ph) continue;
            const cplx z = root_of_unity(M, *ph);
            const double mag = std::exp(-0.5 * n * lq - static_cast<double>(n) / h) * (h - n) / h;
            first.push_back(hp * z * mag);
            if (2 * n <= h) {
                const cplx z2 = root_of_unity(M, 2 * (*ph % M));
                second.push_back(hp2 * z2 * std::exp(-n * lq));
            }
        }
    }
    const double a = shifts.exponent_sum() + 10.0;
    const double bound = 2.0 * pairwise_sum_complex(first).real() + pairwise_sum_complex(second).real() +
                         a * static_cast<double>(m.degree()) / h;
    double lhs = 0.0;
    for (const auto& [aj, tj] : shifts.pairs()) lhs += aj * log_abs_l_value(L, tj);
    return {bound, lhs, lhs - bound};
}

double single_bound_constant(const LPolynomial& L, const Modulus& m, double t) {
    const double lQ = m.log_norm();
    return log_abs_l_value(L, t) * std::log(lQ) / lQ;
}

PrimitiveFamily primitive_family(std::shared_ptr<const UnitGroup> group, int probe_degrees) {
    PrimitiveFamily fam;
    fam.group = group;
    LBatch batch(group, probe_degrees);
    for (auto& chi : all_characters(group)) {
        if (!chi.primitive()) continue;
        fam.lpolys.push_back(batch.compute(chi));
        fam.characters.push_back(std::move(chi));
    }
    return fam;
}

}  // namespace ffm
