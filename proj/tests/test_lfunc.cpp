#include <doctest.h>

#include <cmath>

#include <algorithm>
#include <numbers>
#include <random>

#include "ffm/errors.hpp"
#include "ffm/lfunc.hpp"
#include "helpers.hpp"

using namespace ffm;
using ffm::test::group_of;
using ffm::test::P;

namespace {

const double kSqrt3 = std::sqrt(3.0);

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

// Dirichlet series partial sum sum_{d(f) <= D} chi(f) |f|^{-s}, straight from
// the definition
cplx dirichlet_partial(const DirichletChar& chi, cplx s, int D) {
    const auto F = chi.group().modulus().field();
    cplx acc = 0;
    for (int n = 0; n <= D; ++n) {
        for (const auto& f : enumerate_monic(F, n)) acc += char_eval(chi, f) * std::pow(static_cast<double>(f.norm()), -s);
    }
    return acc;
}

}  // namespace

TEST_CASE("L-polynomials mod T^2 over F_3") {
    const auto g = group_of(3, "T^2");
    const auto L1 = l_polynomial(ffm::test::t_squared_char(g, 1));
    REQUIRE(L1.coeffs.size() == 2);
    CHECK(close(L1.coeffs[0], 1.0, 1e-15));
    CHECK(close(L1.coeffs[1], cplx(0, kSqrt3), 1e-12));
    const auto L2 = l_polynomial(ffm::test::t_squared_char(g, 2));
    CHECK(close(L2.coeffs[1], -1.0, 1e-12));

    const auto fam = primitive_family(g);
    REQUIRE(fam.size() == 4);
    std::vector<cplx> c1;
    for (const auto& L : fam.lpolys) {
        CHECK(close(L.coeffs[0], 1.0, 1e-12));
        c1.push_back(L.coeffs[1]);
    }
    std::sort(c1.begin(), c1.end(), [](cplx a, cplx b) { return std::pair(a.real(), a.imag()) < std::pair(b.real(), b.imag()); });
    CHECK(close(c1[0], -1.0, 1e-9));
    CHECK(close(c1[1], -1.0, 1e-9));
    CHECK(close(c1[2], cplx(0, -kSqrt3), 1e-9));
    CHECK(close(c1[3], cplx(0, kSqrt3), 1e-9));

    CHECK_THROWS_AS(l_polynomial(all_characters(g).front()), DomainError);
}

TEST_CASE("direct and batch routes agree") {
    for (const char* Qs : {"T^3 + T", "T^4", "T^4 + T^3 + 2*T + 1"}) {
        const auto g = group_of(3, Qs);
        LBatch batch(g, 2);
        for (const auto& chi : all_characters(g)) {
            if (chi.principal()) continue;
            const auto a = l_polynomial(chi, 2);
            const auto b = batch.compute(chi);
            REQUIRE(a.coeffs.size() == b.coeffs.size());
            for (std::size_t k = 0; k < a.coeffs.size(); ++k) CHECK(std::abs(a.coeffs[k] - b.coeffs[k]) < 1e-10);
            for (std::size_t k = 0; k < a.probe.size(); ++k) CHECK(std::abs(a.probe[k] - b.probe[k]) < 1e-9);
        }
    }
}

TEST_CASE("coefficients vanish past d(Q) - 1 and stay below q^n") {
    const auto g = group_of(2, "T^5 + T^2");
    for (const auto& chi : all_characters(g)) {
        if (chi.principal()) continue;
        const auto L = l_polynomial(chi, 2);
        for (const auto& p : L.probe) CHECK(std::abs(p) < 1e-6);
        for (std::size_t n = 0; n < L.coeffs.size(); ++n) CHECK(std::abs(L.coeffs[n]) <= std::pow(2.0, n) + 1e-12);
    }
}

TEST_CASE("evaluation examples") {
    const auto g = group_of(3, "T^2");
    const auto L1 = l_polynomial(ffm::test::t_squared_char(g, 1));
    CHECK(close(l_eval_u(L1, 0.0), 1.0, 1e-15));
    CHECK(close(l_eval_u(L1, 1.0 / kSqrt3), cplx(1, 1), 1e-12));
    CHECK(std::norm(l_value(L1, 0.0)) == doctest::Approx(2.0));
    CHECK(close(critical_point(0.0, 3), 1.0 / kSqrt3, 1e-15));
}

TEST_CASE("polynomial evaluation equals the Dirichlet series partial sum") {
    const auto g = group_of(5, "T^3 + 2");
    for (const auto& chi : all_characters(g)) {
        if (chi.principal()) continue;
        const auto L = l_polynomial(chi);
        for (cplx s : {cplx(0.5, 0.0), cplx(0.5, 1.3), cplx(2.0, -0.4), cplx(-0.3, 0.2)}) {
            const cplx u = std::pow(5.0, -s);
            CHECK(close(l_eval_u(L, u), dirichlet_partial(chi, s, L.degree_bound()), 1e-10 * std::max(1.0, std::abs(l_eval_u(L, u)))));
        }
    }
}

TEST_CASE("values are periodic in t and the circle parametrisation is consistent") {
    const auto g = group_of(3, "T^3 + T^2 + 2");
    const double period = 2 * std::numbers::pi / std::log(3.0);
    for (const auto& chi : all_characters(g)) {
        if (!chi.primitive()) continue;
        const auto L = l_polynomial(chi);
        for (double t : {0.0, 0.3, 1.7, -2.2}) {
            CHECK(close(l_value(L, t), l_value(L, t + period), 1e-12));
            CHECK(close(l_value(L, t), l_value(L, t - 3 * period), 1e-12));
            // L(e^{i theta}/sqrt q) = L(1/2 - i theta / log q)
            const double theta = -t * std::log(3.0);
            CHECK(close(l_eval_u(L, std::polar(1 / std::sqrt(3.0), theta)), l_value(L, t), 1e-12));
        }
        CHECK(reduce_shift(7 * period + 0.25, 3) == doctest::Approx(0.25));
        CHECK(reduce_shift(-0.25, 3) == doctest::Approx(period - 0.25));
    }
}

TEST_CASE("zeta of F_q[T]") {
    CHECK(close(zeta_A(2, 2.0), 2.0, 1e-15));
    CHECK(zeta_A(3, 1.0 + 1.0 / (4 * std::log(3.0))).real() == doctest::Approx(1 / (1 - std::exp(-0.25))));
    CHECK(zeta_A(3, 1.0 + 1.0 / (4 * std::log(3.0))).real() == doctest::Approx(4.5208).epsilon(1e-4));
    CHECK_THROWS_AS(zeta_A(3, 1.0), PoleError);
    CHECK_THROWS_AS(zeta_A(3, cplx(1.0, 2 * std::numbers::pi / std::log(3.0))), PoleError);
    // Euler-product check at s = 2 through the prime counts
    double log_prod = 0;
    for (int n = 1; n <= 40; ++n) log_prod -= prime_density(FieldSpec(3), n) * std::pow(3.0, n) * std::log1p(-std::pow(3.0, -2.0 * n));
    CHECK(std::log(zeta_A(3, 2.0).real()) == doctest::Approx(log_prod).epsilon(1e-12));
}

TEST_CASE("inverse roots") {
    LPolynomial a{0, 3, {1.0, cplx(0, kSqrt3)}, {}};
    auto r = l_inverse_roots(a);
    REQUIRE(r.size() == 1);
    CHECK(close(r[0], cplx(0, -kSqrt3), 1e-12));
    LPolynomial b{0, 3, {1.0, -1.0}, {}};
    r = l_inverse_roots(b);
    REQUIRE(r.size() == 1);
    CHECK(close(r[0], 1.0, 1e-12));
    LPolynomial c{0, 3, {1.0}, {}};
    CHECK(l_inverse_roots(c).empty());

    const auto g = group_of(3, "T^4 + T + 2");
    for (const auto& chi : all_characters(g)) {
        if (!chi.primitive()) continue;
        const auto L = l_polynomial(chi);
        const auto roots = l_inverse_roots(L);
        const auto back = expand_from_inverse_roots(roots);
        REQUIRE(back.size() <= L.coeffs.size());
        for (std::size_t n = 0; n < L.coeffs.size(); ++n) {
            const cplx e = n < back.size() ? back[n] : 0.0;
            CHECK(std::abs(e - L.coeffs[n]) < 1e-8);
        }
        for (const auto& al : roots) {
            const double m = std::abs(al);
            CHECK(std::min(std::fabs(m - std::sqrt(3.0)), std::fabs(m - 1.0)) < 1e-6);
        }
    }
}

TEST_CASE("conjugate character has conjugate coefficients") {
    const auto g = group_of(5, "T^3 + T^2");
    for (const auto& chi : all_characters(g)) {
        if (chi.principal()) continue;
        const auto L = l_polynomial(chi);
        const auto Lc = l_polynomial(chi.conjugate());
        const auto expect = L.conjugated();
        for (std::size_t n = 0; n < L.coeffs.size(); ++n) CHECK(std::abs(Lc.coeffs[n] - expect.coeffs[n]) < 1e-10);
        for (double th : {0.1, 1.0, 2.5}) {
            const double r = 1 / std::sqrt(5.0);
            CHECK(std::fabs(std::abs(l_eval_u(L, std::polar(r, th))) - std::abs(l_eval_u(Lc, std::polar(r, -th)))) < 1e-10);
        }
    }
}

TEST_CASE("pointwise bound: hand example and exhaustive small family") {
    const auto g = group_of(3, "T^2");
    const PrimeTable primes(FieldSpec(3), 4, 4);
    const auto chi = ffm::test::t_squared_char(g, 1);
    CHECK(log_l_bound_pointwise(chi, primes, 0.0, 1) == doctest::Approx(1.0));
    CHECK(log_abs_l_value(l_polynomial(chi), 0.0) == doctest::Approx(0.5 * std::log(2.0)));
    CHECK_THROWS_AS(log_l_bound_pointwise(chi, primes, 0.0, 2), DomainError);
    CHECK_THROWS_AS(log_l_bound_pointwise(all_characters(g).front(), primes, 0.0, 1), DomainError);

    for (const auto& Q : enumerate_monic(FieldSpec(3), 4)) {
        const auto gq = std::make_shared<const UnitGroup>(unit_group(factor_modulus(Q)));
        const auto fam = primitive_family(gq);
        for (std::size_t k = 0; k < fam.size(); ++k) {
            for (int h = 1; h <= 3; ++h) {
                for (double t : {0.0, 0.77, 2.1}) {
                    REQUIRE(log_abs_l_value(fam.lpolys[k], t) <= log_l_bound_pointwise(fam.characters[k], primes, t, h) + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("simplified bound at x = q is d(Q)") {
    const auto g = group_of(3, "T^3 + T^2 + 2");
    const PrimeTable primes(FieldSpec(3), 3, 3);
    for (const auto& chi : all_characters(g)) {
        if (!chi.primitive()) continue;
        const auto b = log_l_bound_simplified(chi, l_polynomial(chi), primes, 0.4, NormCutoff(1));
        CHECK(b.bound == doctest::Approx(3.0));
        CHECK(b.defect == doctest::Approx(b.log_abs_l - 3.0));
    }
}

TEST_CASE("h weights") {
    const ShiftSpec zero{std::vector<Shift>{{1.0, 0.0}, {2.5, 0.0}}};
    CHECK(close(h_weight(P(3, "T^2 + 1"), zero), 1.75, 1e-15));
    const ShiftSpec spread{std::vector<Shift>{{1.0, 0.3}, {2.0, 1.1}, {0.5, 2.0}, {1.5, 0.0}}};
    CHECK(close(h_weight(P(3, "2"), spread), 2.5, 1e-15));
    const ShiftSpec half{std::vector<Shift>{{1.0, 0.0}, {1.0, std::numbers::pi / std::log(3.0)}}};
    CHECK(close(h_weight(P(3, "T + 1"), half), 0.0, 1e-15));
    CHECK_THROWS_AS(h_weight(FqPoly(FieldSpec(3)), zero), DomainError);
}

TEST_CASE("shifted bound with equal zero shifts doubles the simplified prime sums") {
    const auto g = group_of(3, "T^4 + 2");
    const PrimeTable primes(FieldSpec(3), 3, 3);
    const ShiftSpec ones{std::vector<Shift>{{1.0, 0.0}, {1.0, 0.0}}};
    for (const auto& chi : all_characters(g)) {
        if (!chi.primitive()) continue;
        const auto L = l_polynomial(chi);
        for (int h = 1; h <= 3; ++h) {
            const auto s = log_l_bound_simplified(chi, L, primes, 0.0, NormCutoff(h));
            const auto w = shifted_log_bound(chi, L, primes, ones, NormCutoff(h));
            // h = 1 on every prime power and a = 12
            const double prime_part = s.bound - 4.0 / h;
            CHECK(w.bound == doctest::Approx(2 * prime_part + 12.0 * 4 / h));
            CHECK(w.log_abs_l == doctest::Approx(2 * s.log_abs_l));
        }
    }
}
