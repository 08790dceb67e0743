#include "ffm/primesums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ffm/errors.hpp"
#include "ffm/shifts.hpp"
#include "ffm/summation.hpp"

namespace ffm {

NormCutoff::NormCutoff(int h) : h_(h) {
    if (h < 0) throw DomainError("cutoff exponent must be >= 0");
}

NormCutoff NormCutoff::from_value(FieldSpec field, double x) {
    if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("cutoff must be a power of q");
    const double lq = std::log(static_cast<double>(field.q()));
    const double h = std::round(std::log(x) / lq);
    if (std::fabs(std::pow(static_cast<double>(field.q()), h) - x) > 1e-9 * x) {
        throw DomainError("cutoff " + std::to_string(x) + " is not a power of q");
    }
    return NormCutoff(static_cast<int>(h));
}

double NormCutoff::log_value(FieldSpec field) const { return h_ * std::log(static_cast<double>(field.q())); }

// ---------------------------------------------------------------------------

PrimeTable::PrimeTable(FieldSpec field, int max_degree, int listed_degree)
    : field_(field), max_degree_(max_degree) {
    if (max_degree < 0 || listed_degree < 0 || listed_degree > max_degree) {
        throw DomainError("prime table degrees out of range");
    }
    density_.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
    counts_.assign(static_cast<std::size_t>(max_degree) + 1, 0);
    for (int n = 1; n <= max_degree; ++n) {
        density_[static_cast<std::size_t>(n)] = prime_density(field, n);
        if (checked_pow(field.q(), n) != std::numeric_limits<std::uint64_t>::max()) {
            counts_[static_cast<std::size_t>(n)] = prime_count_exact(field, n);
        }
    }
    primes_.resize(static_cast<std::size_t>(listed_degree) + 1);
    for (int n = 1; n <= listed_degree; ++n) primes_[static_cast<std::size_t>(n)] = enumerate_irreducible(field, n);
}

std::uint64_t PrimeTable::count(int n) const {
    if (n < 1 || n > max_degree_) throw DomainError("degree outside the prime table");
    if (checked_pow(field_.q(), n) == std::numeric_limits<std::uint64_t>::max()) {
        throw DomainError("pi(n) overflows 64 bits");
    }
    return counts_[static_cast<std::size_t>(n)];
}

double PrimeTable::density(int n) const {
    if (n < 1 || n > max_degree_) throw DomainError("degree outside the prime table");
    return density_[static_cast<std::size_t>(n)];
}

std::span<const FqPoly> PrimeTable::primes(int n) const {
    if (n < 1 || n > listed_degree()) throw DomainError("primes of degree " + std::to_string(n) + " are not listed");
    return primes_[static_cast<std::size_t>(n)];
}

// ---------------------------------------------------------------------------

namespace {

void require_cutoff(const PrimeTable& table, NormCutoff x) {
    if (x.log_q() > table.max_degree()) throw DomainError("cutoff exceeds the prime table");
}

double log_q(const PrimeTable& t) { return std::log(static_cast<double>(t.field().q())); }

}  // namespace

EstimateDefect logp_sum(const PrimeTable& table, NormCutoff x) {
    require_cutoff(table, x);
    const double lq = log_q(table);
    std::vector<double> terms;
    for (int n = 1; n <= x.log_q(); ++n) terms.push_back(table.density(n) * n * lq);
    const double value = pairwise_sum_real(terms);
    const double estimate = x.log_value(table.field());
    return {value, estimate, value - estimate};
}

double recip_sum(const PrimeTable& table, NormCutoff x) {
    require_cutoff(table, x);
    if (x.log_q() < 1) throw DomainError("reciprocal prime sum needs x >= q");
    std::vector<double> terms;
    for (int n = 1; n <= x.log_q(); ++n) terms.push_back(table.density(n));
    return pairwise_sum_real(terms);
}

MertensFit fit_mertens_constant(const PrimeTable& table, int h_min, int h_max) {
    if (h_min < 1 || h_max <= h_min) throw DomainError("fit range needs 1 <= h_min < h_max");
    std::vector<double> xs, ys;
    for (int h = h_min; h <= h_max; ++h) {
        const double lx = NormCutoff(h).log_value(table.field());
        xs.push_back(1.0 / lx);
        ys.push_back(recip_sum(table, NormCutoff(h)) - std::log(lx));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    MertensFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.b = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < xs.size(); ++i) fit.residual_times_log.push_back((ys[i] - fit.b) / xs[i]);
    return fit;
}

double mertens_cos_sum(const PrimeTable& table, NormCutoff x, double alpha) {
    require_cutoff(table, x);
    const double lq = log_q(table);
    std::vector<double> terms;
    for (int n = 1; n <= x.log_q(); ++n) terms.push_back(std::cos(alpha * n * lq) * table.density(n));
    return pairwise_sum_real(terms);
}

double F_sum(int h, double theta) {
    if (h < 1) throw DomainError("F(h, theta) needs h >= 1");
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(h));
    for (int n = 1; n <= h; ++n) terms.push_back(std::cos(n * theta) / n);
    return pairwise_sum_real(terms);
}

double zeta_log_estimate(FieldSpec field, NormCutoff x, double alpha) {
    if (x.log_q() < 1) throw DomainError("zeta estimate needs x >= q");
    // |zeta_A(1 + 1/log x + i alpha)| = 1 / |1 - e^{-1/h} e^{-i alpha log q}|
    const double lq = std::log(static_cast<double>(field.q()));
    const double r = std::exp(-1.0 / x.log_q());
    const double phase = alpha * lq;
    const double mod2 = 1.0 - 2.0 * r * std::cos(phase) + r * r;
    return -0.5 * std::log(mod2);
}

double log_min_estimate(FieldSpec field, NormCutoff x, double alpha) {
    const double lx = x.log_value(field);
    const double tb = theta_bar(alpha * std::log(static_cast<double>(field.q())));
    if (tb == 0.0) return std::log(lx);
    return std::log(std::min(lx, 1.0 / tb));
}

double log_min_h(int h, double theta) {
    const double tb = theta_bar(theta);
    if (tb == 0.0) return std::log(static_cast<double>(h));
    return std::log(std::min(static_cast<double>(h), 1.0 / tb));
}

double tail_remainder_bound(int h, int truncation_degree) {
    if (h < 1) throw DomainError("tail bound needs h >= 1");
    const double next = truncation_degree + 1.0;
    return std::exp(-next / h) / (next * (1.0 - std::exp(-1.0 / h)));
}

PrimePowerTail prime_power_tail(const PrimeTable& table, NormCutoff x, int truncation_degree) {
    const int h = x.log_q();
    if (h < 1) throw DomainError("prime power tail needs x >= q");
    if (truncation_degree < 0) truncation_degree = 8 * h;
    if (truncation_degree < h) throw DomainError("truncation below the cutoff degree");
    if (truncation_degree > table.max_degree()) throw DomainError("truncation exceeds the prime table");
    // |P|^{-1/log x} = e^{-d(P)/h}
    std::vector<double> head, tail;
    for (int n = 1; n <= h; ++n) head.push_back(table.density(n) * -std::expm1(-static_cast<double>(n) / h));
    for (int n = h + 1; n <= truncation_degree; ++n) tail.push_back(table.density(n) * std::exp(-static_cast<double>(n) / h));
    PrimePowerTail out;
    out.head = pairwise_sum_real(head);
    out.tail = pairwise_sum_real(tail);
    out.truncation_degree = truncation_degree;
    out.remainder_bound = tail_remainder_bound(h, truncation_degree);
    return out;
}

}  // namespace ffm
