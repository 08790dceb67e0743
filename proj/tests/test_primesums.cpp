#include <doctest.h>

#include <cmath>

#include <numbers>

#include "ffm/errors.hpp"
#include "ffm/primesums.hpp"

using namespace ffm;

namespace {

// sums taken prime by prime over enumerated irreducibles, largest degree first
double recip_by_enumeration(FieldSpec F, int h, double alpha) {
    double acc = 0;
    for (int n = h; n >= 1; --n) {
        for (const auto& P : enumerate_irreducible(F, n)) {
            acc += std::cos(alpha * P.log_norm()) / static_cast<double>(P.norm());
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("norm cutoffs are powers of q") {
    FieldSpec F(3);
    CHECK(NormCutoff::from_value(F, 81.0).log_q() == 4);
    CHECK(NormCutoff::from_value(F, 1.0).log_q() == 0);
    CHECK_THROWS_AS(NormCutoff::from_value(F, 80.0), DomainError);
    CHECK_THROWS_AS(NormCutoff::from_value(F, 0.5), DomainError);
    CHECK_THROWS_AS(NormCutoff(-1), DomainError);
}

TEST_CASE("prime table") {
    const PrimeTable t(FieldSpec(2), 30, 6);
    CHECK(t.count(4) == 3);
    CHECK(t.primes(3).size() == 2);
    CHECK(t.density(30) == doctest::Approx(prime_density(FieldSpec(2), 30)));
    CHECK_THROWS_AS(t.primes(7), DomainError);
    CHECK_THROWS_AS(t.count(31), DomainError);
}

TEST_CASE("log-weighted prime sum") {
    const PrimeTable t2(FieldSpec(2), 12, 0);
    const auto e = logp_sum(t2, NormCutoff(1));
    CHECK(e.value == doctest::Approx(std::log(2.0)));
    CHECK(e.defect == doctest::Approx(0.0));
    CHECK(logp_sum(t2, NormCutoff(0)).value == 0.0);
    for (std::uint32_t q : {2u, 3u, 5u}) {
        const PrimeTable t(FieldSpec(q), 12, 0);
        for (int h = 0; h <= 12; ++h) CHECK(std::fabs(logp_sum(t, NormCutoff(h)).defect) <= 2.0);
    }
    CHECK_THROWS_AS(logp_sum(t2, NormCutoff(13)), DomainError);
}

TEST_CASE("reciprocal prime sum and the fitted constant") {
    const PrimeTable t(FieldSpec(2), 12, 8);
    CHECK(recip_sum(t, NormCutoff(1)) == doctest::Approx(1.0));
    CHECK(recip_sum(t, NormCutoff(2)) == doctest::Approx(1.25));
    CHECK_THROWS_AS(recip_sum(t, NormCutoff(0)), DomainError);
    for (int h = 1; h <= 8; ++h) CHECK(recip_sum(t, NormCutoff(h)) == doctest::Approx(recip_by_enumeration(FieldSpec(2), h, 0.0)).epsilon(1e-12));

    const auto fit = fit_mertens_constant(t, 2, 12);
    REQUIRE(fit.residual_times_log.size() == 11);
    for (double r : fit.residual_times_log) CHECK(std::isfinite(r));
    // least squares: residuals y - b - slope / log x are orthogonal to 1 and to 1 / log x
    double s0 = 0, s1 = 0;
    for (int h = 2; h <= 12; ++h) {
        const double inv = 1 / (h * std::log(2.0));
        const double resid = (fit.residual_times_log[static_cast<std::size_t>(h - 2)] - fit.slope) * inv;
        s0 += resid;
        s1 += resid * inv;
    }
    CHECK(std::fabs(s0) < 1e-12);
    CHECK(std::fabs(s1) < 1e-12);
}

TEST_CASE("cosine prime sum") {
    const PrimeTable t(FieldSpec(2), 12, 8);
    for (int h = 1; h <= 12; ++h) CHECK(mertens_cos_sum(t, NormCutoff(h), 0.0) == doctest::Approx(recip_sum(t, NormCutoff(h))));
    CHECK(mertens_cos_sum(t, NormCutoff(2), std::numbers::pi / std::log(2.0)) == doctest::Approx(-0.75));
    for (double a : {0.3, 1.9, 4.4}) {
        CHECK(mertens_cos_sum(t, NormCutoff(8), a) == doctest::Approx(recip_by_enumeration(FieldSpec(2), 8, a)).epsilon(1e-12));
    }
}

TEST_CASE("F(h, theta)") {
    double H = 0;
    for (int n = 1; n <= 50; ++n) H += 1.0 / n;
    CHECK(F_sum(50, 0.0) == doctest::Approx(H));
    CHECK(F_sum(2, std::numbers::pi) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(F_sum(0, 1.0), DomainError);
    for (double th : {0.0, 0.4, 2.9, 5.5}) {
        for (int h = 2; h <= 200; h += 17) CHECK(std::fabs(F_sum(h, th) - F_sum(h - 1, th) - std::cos(h * th) / h) < 1e-15);
    }
    CHECK(log_min_h(10, 0.0) == doctest::Approx(std::log(10.0)));
    CHECK(log_min_h(10, 0.5) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("zeta and log-min estimates") {
    FieldSpec F(3);
    CHECK(zeta_log_estimate(F, NormCutoff(4), 0.0) == doctest::Approx(std::log(1 / (1 - std::exp(-0.25)))));
    CHECK(zeta_log_estimate(F, NormCutoff(4), 0.0) == doctest::Approx(1.5088).epsilon(1e-4));
    const double alpha = std::numbers::pi / std::log(3.0);
    CHECK(zeta_log_estimate(F, NormCutoff(4), alpha) == doctest::Approx(std::log(1 / (1 + std::exp(-0.25)))));
    CHECK(log_min_estimate(F, NormCutoff(4), 0.0) == doctest::Approx(std::log(4 * std::log(3.0))));
    CHECK(log_min_estimate(F, NormCutoff(4), alpha) == doctest::Approx(std::log(1 / std::numbers::pi)));
}

TEST_CASE("sums are insensitive to summation order") {
    const PrimeTable t(FieldSpec(5), 12, 0);
    for (double a : {0.0, 0.7, 3.3}) {
        double reversed = 0;
        for (int n = 12; n >= 1; --n) reversed += std::cos(a * n * std::log(5.0)) * t.density(n);
        CHECK(std::fabs(mertens_cos_sum(t, NormCutoff(12), a) - reversed) < 1e-12);
    }
}

TEST_CASE("prime-power tail") {
    const PrimeTable t(FieldSpec(2), 80, 0);
    const auto one = prime_power_tail(t, NormCutoff(1));
    CHECK(one.head == doctest::Approx(2 * (0.5 - std::pow(2.0, -(1 + 1 / std::log(2.0))))));
    CHECK(one.truncation_degree == 8);
    for (int h = 1; h <= 10; ++h) {
        const auto v = prime_power_tail(t, NormCutoff(h));
        CHECK(v.remainder_bound < 1e-3 * v.total());
        CHECK(v.total() < 2.0);
        // a longer truncation stays within the reported remainder
        const auto longer = prime_power_tail(t, NormCutoff(h), std::min(80, 8 * h + 20));
        CHECK(longer.total() - v.total() <= v.remainder_bound);
        CHECK(longer.total() >= v.total());
    }
    for (int T = 4; T < 40; ++T) CHECK(tail_remainder_bound(3, T + 1) < tail_remainder_bound(3, T));
    CHECK_THROWS_AS(prime_power_tail(t, NormCutoff(11)), DomainError);
}
