#include <doctest.h>

#include <cmath>

#include <numbers>
#include <random>

#include "ffm/errors.hpp"
#include "ffm/moments.hpp"
#include "helpers.hpp"

using namespace ffm;
using ffm::test::group_of;
using ffm::test::P;

namespace {

ShiftSpec spec(std::vector<double> a, std::vector<double> t) { return ShiftSpec(a, t); }

ShiftSpec random_spec(std::mt19937_64& rng, int size, double period) {
    std::uniform_real_distribution<double> A(0.5, 2.0), T(0.0, period);
    std::vector<Shift> pairs;
    for (int j = 0; j < size; ++j) pairs.push_back({A(rng), T(rng)});
    return ShiftSpec(pairs);
}

}  // namespace

TEST_CASE("theta bar") {
    CHECK(theta_bar(2 * std::numbers::pi) == doctest::Approx(0.0));
    CHECK(theta_bar(std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(theta_bar(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
    CHECK(theta_bar(-7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
    CHECK(theta_bar(0.0) == 0.0);
}

TEST_CASE("shift specs are validated") {
    CHECK_THROWS_AS(spec({1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(spec({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(spec({1.0, -1.0}, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(spec({1.0, 0.0}, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(spec({1.0, 1.0}, {0.0}), DomainError);
    const auto s = spec({1.0, 2.0}, {0.5, -0.5});
    CHECK(s.exponent_sum() == 3.0);
    CHECK(s.exponent_square_sum() == 5.0);
    CHECK(s.negated().pairs()[0].t == -0.5);
}

TEST_CASE("shifted moment mod T^2 over F_3") {
    const auto fam = primitive_family(group_of(3, "T^2"));
    const double expect = 4 + 2 * std::pow(1 - 1 / std::sqrt(3.0), 2);
    CHECK(std::fabs(shifted_moment(fam, spec({1, 1}, {0, 0})) - expect) < 1e-8);
    CHECK(shifted_moment(fam, spec({1, 1}, {0, 0})) == doctest::Approx(4.35727).epsilon(1e-5));
    // exponents (2, 2) at equal shifts give the fourth power moment
    double fourth = 0;
    for (const auto& L : fam.lpolys) fourth += std::pow(std::abs(l_value(L, 0.3)), 4);
    CHECK(shifted_moment(fam, spec({2, 2}, {0.3, 0.3})) == doctest::Approx(fourth));
}

TEST_CASE("empty families are rejected") {
    // q = 2, Q = T(T+1): phi = 1, no primitive characters
    const auto fam = primitive_family(group_of(2, "T^2 + T"));
    CHECK(fam.size() == 0);
    CHECK_THROWS_AS(shifted_moment(fam, spec({1, 1}, {0, 0})), DomainError);
}

TEST_CASE("bound right-hand sides") {
    const auto m = factor_modulus(P(3, "T^2"));
    const double lQ = 2 * std::log(3.0);
    const double z = 1 / (1 - std::exp(-0.5));
    CHECK(z == doctest::Approx(2.5415).epsilon(1e-4));
    const auto eq = spec({1, 1}, {0, 0});
    CHECK(moment_rhs_zeta(m, eq) == doctest::Approx(6 * std::pow(lQ, 0.5) * std::pow(z, 0.5)));
    CHECK(moment_rhs_min(m, eq) == doctest::Approx(6 * std::pow(lQ, 0.5) * std::pow(lQ, 0.5)));
    const auto half = spec({1, 1}, {0, std::numbers::pi / std::log(3.0)});
    CHECK(moment_rhs_min(m, half) == doctest::Approx(6 * std::pow(lQ, 0.5) * std::pow(std::min(lQ, 1 / std::numbers::pi), 0.5)));

    // 2k = 4 has k(2k - 1) = 6 pair factors: with every shift equal each is
    // zeta(1 + 1/log|Q|)^{a_j a_l / 2}
    const auto four = spec({1, 2, 0.5, 1.5}, {0.2, 0.2, 0.2, 0.2});
    const double pair_weight = (1 * 2 + 1 * 0.5 + 1 * 1.5 + 2 * 0.5 + 2 * 1.5 + 0.5 * 1.5) / 2;
    CHECK(moment_rhs_zeta(m, four) == doctest::Approx(6 * std::pow(lQ, four.exponent_square_sum() / 4) * std::pow(z, pair_weight)));
}

TEST_CASE("moment symmetries") {
    const auto g = group_of(3, "T^4 + T + 2");
    const auto fam = primitive_family(g);
    const auto m = g->modulus();
    const double period = 2 * std::numbers::pi / std::log(3.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const auto s = random_spec(rng, 4, period);
        const double v = shifted_moment(fam, s);
        CHECK(shifted_moment(fam, s.negated()) == doctest::Approx(v).epsilon(1e-9));
        ShiftSpec moved(std::vector<Shift>{{s.pairs()[0].a, s.pairs()[0].t + period}, {s.pairs()[1].a, s.pairs()[1].t},
                                           {s.pairs()[2].a, s.pairs()[2].t - 2 * period}, {s.pairs()[3].a, s.pairs()[3].t}});
        CHECK(shifted_moment(fam, moved) == doctest::Approx(v).epsilon(1e-9));
        CHECK(moment_rhs_min(m, moved) == doctest::Approx(moment_rhs_min(m, s)).epsilon(1e-9));
        CHECK(moment_rhs_zeta(m, moved) == doctest::Approx(moment_rhs_zeta(m, s)).epsilon(1e-9));
        CHECK(moment_rhs_zeta(m, s.translated(0.37)) == doctest::Approx(moment_rhs_zeta(m, s)).epsilon(1e-12));
    }
}

TEST_CASE("Hoelder sanity on random specs") {
    // sum prod |L_j|^{a_j} <= prod_j (sum |L_j|^{A})^{a_j / A} with A = sum a_j
    const auto fam = primitive_family(group_of(3, "T^3 + 2*T + 2"));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto s = random_spec(rng, 4, 5.0);
        const double A = s.exponent_sum();
        double rhs = 1;
        for (const auto& [a, t] : s.pairs()) rhs *= std::pow(shifted_moment(fam, spec({A / 2, A / 2}, {t, t})), a / A);
        CHECK(shifted_moment(fam, s) <= rhs * (1 + 1e-12));
    }
}

TEST_CASE("moment report") {
    const auto fam = primitive_family(group_of(3, "T^2"));
    const auto r = moment_report(fam, spec({1, 1}, {0, 0}));
    CHECK(r.modulus == "T^2");
    CHECK(r.phi == 6);
    CHECK(r.n_primitive == 4);
    CHECK(r.ratio_zeta == doctest::Approx(r.lhs / r.rhs_zeta));
    CHECK(r.crude_exponent == doctest::Approx(std::log(r.lhs / 6) / std::log(2 * std::log(3.0))));
}

TEST_CASE("character sums") {
    const auto g = group_of(3, "T^2");
    const auto c1 = ffm::test::t_squared_char(g, 1), c2 = ffm::test::t_squared_char(g, 2);
    CHECK(std::abs(char_sum(c1, NormCutoff(0)) - 1.0) < 1e-15);
    CHECK(std::abs(char_sum(c1, NormCutoff(1)) - cplx(1, std::sqrt(3.0))) < 1e-12);
    CHECK(std::abs(char_sum(c2, NormCutoff(1))) < 1e-12);
    const auto fam = primitive_family(g);
    CHECK(std::fabs(charsum_moment(fam, 1.0, NormCutoff(1)).moment - 8.0) < 1e-8);
    CHECK(charsum_moment(fam, 0.0, NormCutoff(1)).moment == doctest::Approx(4.0));

    const auto big = group_of(5, "T^3 + T^2 + 1");
    for (const auto& chi : all_characters(big)) {
        if (chi.principal()) continue;
        const auto L = l_polynomial(chi);
        for (int N = 0; N <= 4; ++N) CHECK(std::abs(char_sum(chi, NormCutoff(N)) - char_sum_from_lpoly(L, NormCutoff(N))) < 1e-9);
    }
}

TEST_CASE("Perron partial sums") {
    const auto g = group_of(3, "T^2");
    const auto L1 = l_polynomial(ffm::test::t_squared_char(g, 1));
    const auto one = perron_partial_sum(L1, 1, 0.5, 64);
    CHECK(std::abs(one.quadrature - cplx(1, std::sqrt(3.0))) < 1e-8);
    CHECK(std::abs(perron_partial_sum(L1, 0, 0.5, 64).quadrature - 1.0) < 1e-8);
    CHECK_THROWS_AS(perron_partial_sum(L1, 1, 1.0, 64), DomainError);
    CHECK_THROWS_AS(perron_partial_sum(L1, 1, 0.5, 19), DomainError);

    const auto big = group_of(3, "T^5 + T + 1");
    for (const auto& chi : all_characters(big)) {
        if (!chi.primitive()) continue;
        const auto L = l_polynomial(chi);
        for (int N = 0; N <= 6; ++N) {
            const auto r = perron_partial_sum(L, N, 0.5, 64 * (N + 5));
            CHECK(std::abs(r.quadrature - r.direct) < 1e-8);
            if (N >= 4) CHECK(std::abs(r.direct - char_sum(chi, NormCutoff(N))) < 1e-9);
        }
    }
}

TEST_CASE("circle integrals") {
    const auto g = group_of(3, "T^2");
    const auto L1 = l_polynomial(ffm::test::t_squared_char(g, 1));
    CHECK(std::fabs(circle_integral(L1, 1024) - 8.0) < 1e-6);
    // the plain trapezoid rule only converges quadratically across the kink
    CHECK(std::fabs(circle_integral(L1, 1024, QuadratureRule::trapezoid) - 8.0) > 1e-6);
    // zero-free: both rules agree and doubling the grid changes nothing
    const auto L2 = l_polynomial(ffm::test::t_squared_char(g, 2));
    CHECK(std::fabs(circle_integral(L2, 512) - circle_integral(L2, 1024)) < 1e-8);

    const auto big = primitive_family(group_of(3, "T^4 + 2*T^2 + 1"));
    for (const auto& L : big.lpolys) {
        CHECK(std::fabs(circle_integral(L, 512) - circle_integral(L, 1024)) < 1e-8);
        // against a fine midpoint rule
        double acc = 0;
        const int n = 400000;
        for (int k = 0; k < n; ++k) acc += std::abs(l_eval_u(L, std::polar(1 / std::sqrt(3.0), 2 * std::numbers::pi * (k + 0.5) / n)));
        CHECK(circle_integral(L, 1024) == doctest::Approx(acc * 2 * std::numbers::pi / n).epsilon(1e-8));
    }
    CHECK_THROWS_AS(integral_moment(big, 2.0, 1024), DomainError);
    CHECK_THROWS_AS(integral_moment(big, 2.5, 128), DomainError);
    const auto r = integral_moment(big, 2.5, 1024);
    CHECK(r.ratio == doctest::Approx(r.moment / r.normaliser));
}
