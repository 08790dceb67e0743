#include "ffm/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <concepts>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include "ffm/errors.hpp"
#include "ffm/moments.hpp"
#include "ffm/primesums.hpp"
#include "ffm/summation.hpp"

namespace ffm {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || stop.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    stop = true;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// workspace

namespace {

ExperimentConfig apply_options(ExperimentConfig c, const RunOptions& o) {
    if (o.budget) c.budget.max_phi = *o.budget;
    if (!o.cache_dir.empty()) c.cache_dir = o.cache_dir;
    if (!o.fixtures_path.empty()) c.fixtures = o.fixtures_path;
    if (o.jobs < 1) throw ConfigError("--jobs must be >= 1");
    return c;
}

}  // namespace

Workspace::Workspace(ExperimentConfig config, RunOptions options)
    : config_(apply_options(std::move(config), options)),
      options_(std::move(options)),
      cache_(config_.cache_dir),
      fixtures_(Fixtures::load(config_.fixtures)),
      fixtures_path_(config_.fixtures),
      moduli_(config_moduli(config_)),
      shifts_(config_shift_specs(config_)) {}

std::vector<int> Workspace::degrees() const {
    std::vector<int> out;
    for (const auto& Q : moduli_) out.push_back(Q.degree());
    return out;
}

void Workspace::build_groups() {
    if (groups_built_) return;
    groups_.assign(moduli_.size(), nullptr);
    group_hits_.assign(moduli_.size(), 0);
    parallel_for(moduli_.size(), options_.jobs, [&](std::size_t i) {
        bool hit = false;
        groups_[i] = cache_.unit_group(factor_modulus(moduli_[i]), &hit);
        group_hits_[i] = hit;
    });
    groups_built_ = true;
}

void Workspace::build_families() {
    if (families_built_) return;
    build_groups();
    families_.assign(moduli_.size(), PrimitiveFamily{});
    family_hits_.assign(moduli_.size(), 0);
    parallel_for(moduli_.size(), options_.jobs, [&](std::size_t i) {
        bool hit = false;
        families_[i] = cache_.family(groups_[i], kProbeDegrees, &hit);
        family_hits_[i] = hit;
    });
    families_built_ = true;
}

const std::shared_ptr<const UnitGroup>& Workspace::group(std::size_t i) {
    build_groups();
    return groups_.at(i);
}

const PrimitiveFamily& Workspace::family(std::size_t i) {
    build_families();
    return families_.at(i);
}

nlohmann::json Workspace::cache_metadata() const {
    nlohmann::json j;
    j["dir"] = cache_.dir();
    std::size_t gh = 0, fh = 0;
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        const bool g = groups_built_ && group_hits_[i];
        const bool f = families_built_ && family_hits_[i];
        gh += g;
        fh += f;
        entries.push_back({{"modulus", to_string(moduli_[i])}, {"unit_group_hit", g}, {"lpoly_hit", f}});
    }
    j["unit_group_hits"] = gh;
    j["lpoly_hits"] = fh;
    j["entries"] = entries;
    return j;
}

// ---------------------------------------------------------------------------
// shared helpers

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <std::integral T>
std::string str(T v) {
    return std::to_string(v);
}

std::string degree_subject(std::uint32_t q, int d) { return "q=" + str(q) + " d=" + str(d); }
std::string degree_key(std::uint32_t q, const std::string& suite, int d, const std::string& what) {
    return "q=" + str(q) + "/" + suite + "/d=" + str(d) + "/" + what;
}

double period(std::uint32_t q) { return kTwoPi / std::log(static_cast<double>(q)); }

/// Moduli indices grouped by degree, in run order within each degree.
std::map<int, std::vector<std::size_t>> by_degree(const Workspace& ws) {
    std::map<int, std::vector<std::size_t>> out;
    const auto& m = ws.moduli();
    for (std::size_t i = 0; i < m.size(); ++i) out[m[i].degree()].push_back(i);
    return out;
}

/// Worst value and failure count over a set of moduli.
struct Tally {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    std::string first_failure;

    void add(double value, bool ok, const std::string& subject) {
        if (!(value <= worst)) worst = value;
        if (!ok && failures++ == 0) first_failure = subject;
    }
    std::string detail() const {
        return failures == 0 ? std::string{} : str(static_cast<std::uint64_t>(failures)) + " failing, first " + first_failure;
    }
};

CheckRow make_row(const std::string& suite, const std::string& check, const std::string& anchor,
                  const std::string& subject) {
    CheckRow r;
    r.suite = suite;
    r.check = check;
    r.anchor = anchor;
    r.subject = subject;
    return r;
}

void push_tally(SuiteResult& r, CheckRow row, const Tally& t, double reference) {
    row.pass = t.failures == 0;
    row.measured = t.worst;
    row.reference = reference;
    row.detail = t.detail();
    r.checks.push_back(std::move(row));
}

/// Records `measured` under `key` and compares it with the fixture, unless
/// recording, in which case the fresh value is its own reference.
FixtureVerdict regression(const Workspace& ws, SuiteResult& r, const std::string& key, double measured,
                          FixtureMode mode, double tol) {
    r.measurements[key] = measured;
    if (ws.options().record) {
        FixtureVerdict v;
        v.pass = std::isfinite(measured);
        v.reference = measured;
        v.detail = v.pass ? "recorded" : "non-finite measurement";
        return v;
    }
    return compare_fixture(ws.fixtures(), key, measured, mode, tol);
}

void push_regression(const Workspace& ws, SuiteResult& r, CheckRow row, const std::string& key, double measured,
                     FixtureMode mode, double tol) {
    const auto v = regression(ws, r, key, measured, mode, tol);
    row.pass = v.pass;
    row.measured = measured;
    row.reference = v.reference;
    row.detail = v.detail;
    r.checks.push_back(std::move(row));
}

std::string factorization_string(const Modulus& m) {
    std::string out;
    for (const auto& pp : m.factors()) {
        if (!out.empty()) out += " * ";
        out += "(" + to_string(pp.prime) + ")";
        if (pp.exponent > 1) out += "^" + str(pp.exponent);
    }
    return out;
}

std::string join(std::span<const std::uint64_t> v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += str(v[i]);
    }
    return out;
}

std::string shift_spec_hash(const ShiftSpec& s) {
    std::string text;
    for (const auto& [a, t] : s.pairs()) text += fmt(a) + ":" + fmt(t) + ";";
    return fnv1a_hex(text);
}

}  // namespace

// ---------------------------------------------------------------------------
// enumerate

namespace {

constexpr int kMultiplicativityPairs = 1000;

struct ModulusFacts {
    std::string factorization;
    bool factorization_ok = false;
    std::uint64_t brute_units = 0;
    std::uint64_t bijection_failures = 0;
    std::uint64_t characters = 0;
    std::uint64_t primitive = 0;
    std::uint64_t formula = 0;
    double orthogonality = 0;
    double multiplicativity = 0;
    std::uint64_t conjugate_failures = 0;
};

ModulusFacts modulus_facts(const std::shared_ptr<const UnitGroup>& g) {
    ModulusFacts f;
    const Modulus& m = g->modulus();
    const FqPoly& Q = m.poly();
    const FieldSpec F = m.field();
    f.factorization = factorization_string(m);

    FqPoly prod = FqPoly::constant(F, 1);
    bool parts_ok = true;
    for (const auto& pp : m.factors()) {
        parts_ok = parts_ok && pp.exponent >= 1 && pp.prime.is_monic() && is_irreducible(pp.prime);
        for (int e = 0; e < pp.exponent; ++e) prod = prod * pp.prime;
    }
    f.factorization_ok = parts_ok && prod == Q;

    // units by gcd, independent of the factorization
    for (std::uint64_t code = 0; code < m.norm(); ++code) {
        const FqPoly r = FqPoly::from_code(F, code);
        const bool unit = !r.is_zero() && poly_gcd(r, Q).is_one();
        f.brute_units += unit;
        const auto d = g->dlog_code(code);
        if (d.has_value() != unit) ++f.bijection_failures;
        if (d && g->unit_code(*d) != code) ++f.bijection_failures;
    }
    for (std::uint64_t k = 0; k < g->order(); ++k) {
        const auto d = g->dlog_code(g->unit_code(k));
        if (!d || *d != k) ++f.bijection_failures;
    }

    const auto chars = all_characters(g);
    f.characters = chars.size();
    f.formula = primitive_count_formula(m);
    const std::uint64_t M = g->exponent();
    std::vector<cplx> roots(M);
    for (std::uint64_t p = 0; p < M; ++p) roots[p] = root_of_unity(M, p);

    std::set<std::uint64_t> primitive_index;
    for (const auto& chi : chars) {
        if (chi.primitive()) primitive_index.insert(chi.index());
    }
    f.primitive = primitive_index.size();

    std::vector<std::uint64_t> hist(M);
    for (const auto& chi : chars) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::uint64_t k = 0; k < g->order(); ++k) ++hist[chi.phase_of_unit(k)];
        std::vector<cplx> terms(M);
        for (std::uint64_t p = 0; p < M; ++p) terms[p] = static_cast<double>(hist[p]) * roots[p];
        const cplx s = pairwise_sum_complex(terms);
        const double expect = chi.principal() ? static_cast<double>(g->order()) : 0.0;
        f.orthogonality = std::max(f.orthogonality, std::abs(s - expect));

        if (chi.primitive()) {
            const auto c = chi.conjugate();
            if (!c.primitive() || !primitive_index.count(c.index()) || c.conjugate().index() != chi.index()) {
                ++f.conjugate_failures;
            }
        }
    }

    // random coprime pairs, each against a random character
    std::mt19937_64 rng(Q.code() ^ 0x6a09e667f3bcc909ULL);
    auto random_unit = [&] {
        for (;;) {
            const std::uint64_t code = rng() % m.norm();
            if (g->dlog_code(code)) return FqPoly::from_code(F, code);
        }
    };
    for (int s = 0; s < kMultiplicativityPairs; ++s) {
        const FqPoly a = random_unit(), b = random_unit();
        const auto& chi = chars[rng() % chars.size()];
        const cplx lhs = char_eval(chi, a * b);
        const cplx rhs = char_eval(chi, a) * char_eval(chi, b);
        f.multiplicativity = std::max(f.multiplicativity, std::abs(lhs - rhs));
    }
    return f;
}

}  // namespace

SuiteResult run_enumerate(Workspace& ws) {
    const auto& c = ws.config();
    const auto& tol = c.tolerances;
    SuiteResult r;

    std::vector<std::uint32_t> qs = c.primesums.q_values;
    qs.push_back(c.q);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    CsvTable primes({"q", "n", "pi", "enumerated", "main_term", "error", "error_bound"});
    for (std::uint32_t q : qs) {
        const FieldSpec F(q);
        Tally exact, error;
        for (int n = 1; checked_pow(q, n) <= c.prime_enumeration_limit; ++n) {
            const std::uint64_t pi = prime_count_exact(F, n);
            const std::uint64_t counted = count_irreducible_by_sieve(F, n);
            const double qn = static_cast<double>(checked_pow(q, n));
            const double main = qn / n;
            const double err = static_cast<double>(pi) - main;
            const double bound = 3.0 * std::sqrt(qn) / n;
            const std::string subj = "q=" + str(q) + " n=" + str(n);
            exact.add(std::fabs(static_cast<double>(pi) - static_cast<double>(counted)), pi == counted, subj);
            error.add(std::fabs(err) / bound, std::fabs(err) <= bound, subj);
            primes.add({str(q), str(n), str(pi), str(counted), fmt(main), fmt(err), fmt(bound)});
        }
        if (exact.worst < 0) exact.worst = 0;
        if (error.worst < 0) error.worst = 0;
        push_tally(r, make_row("enumerate", "prime count equals enumeration", "prime-count", "q=" + str(q)), exact, 0);
        push_tally(r, make_row("enumerate", "prime count error within 3 q^(n/2)/n", "prime-count-error", "q=" + str(q)),
                   error, 1);
    }
    r.tables["primes.csv"] = std::move(primes);

    const auto& moduli = ws.moduli();
    std::vector<ModulusFacts> facts(moduli.size());
    for (std::size_t i = 0; i < moduli.size(); ++i) ws.group(i);
    parallel_for(moduli.size(), ws.options().jobs, [&](std::size_t i) { facts[i] = modulus_facts(ws.group(i)); });

    CsvTable table({"q", "modulus", "code", "degree", "norm", "phi", "factorization", "rank", "orders", "characters",
                    "primitive", "primitive_formula", "small_degree"});
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const auto& g = *ws.group(i);
        const auto& m = g.modulus();
        const auto& f = facts[i];
        table.add({str(c.q), to_string(m.poly()), str(m.poly().code()), str(m.degree()), str(m.norm()), str(m.phi()),
                   f.factorization, str(static_cast<std::uint64_t>(g.rank())), join(g.orders(), ' '),
                   str(f.characters), str(f.primitive), str(f.formula), m.degree() <= 2 ? "1" : "0"});
    }
    r.tables["moduli.csv"] = std::move(table);

    for (const auto& [d, idx] : by_degree(ws)) {
        Tally fac, bij, tot, prim, orth, mult, conj;
        for (std::size_t i : idx) {
            const auto& f = facts[i];
            const auto& g = *ws.group(i);
            const std::string s = to_string(moduli[i]);
            fac.add(f.factorization_ok ? 0 : 1, f.factorization_ok, s);
            bij.add(static_cast<double>(f.bijection_failures), f.bijection_failures == 0, s);
            const bool phi_ok = f.brute_units == g.order() && g.order() == g.modulus().phi() &&
                                euler_phi(g.modulus()) == g.order();
            tot.add(std::fabs(static_cast<double>(f.brute_units) - static_cast<double>(g.order())), phi_ok, s);
            prim.add(std::fabs(static_cast<double>(f.primitive) - static_cast<double>(f.formula)), f.primitive == f.formula,
                     s);
            orth.add(f.orthogonality, f.orthogonality <= c.tolerances.orthogonality, s);
            mult.add(f.multiplicativity, f.multiplicativity <= tol.multiplicativity, s);
            conj.add(static_cast<double>(f.conjugate_failures), f.conjugate_failures == 0, s);
        }
        const std::string subj = degree_subject(c.q, d) + " (" + str(static_cast<std::uint64_t>(idx.size())) + " moduli)";
        push_tally(r, make_row("enumerate", "factors multiply back and are irreducible", "modulus-factorization", subj), fac, 0);
        push_tally(r, make_row("enumerate", "discrete log is a bijection onto the units", "unit-group-bijection", subj), bij, 0);
        push_tally(r, make_row("enumerate", "group order equals gcd unit count and totient", "totient", subj), tot, 0);
        push_tally(r, make_row("enumerate", "primitive count equals product formula", "primitive-count", subj), prim, 0);
        push_tally(r, make_row("enumerate", "character sums over the group", "orthogonality", subj), orth,
                   tol.orthogonality);
        push_tally(r, make_row("enumerate", "chi(ab) = chi(a) chi(b) on sampled units", "multiplicativity", subj), mult,
                   tol.multiplicativity);
        push_tally(r, make_row("enumerate", "primitive set closed under conjugation", "conjugate-closure", subj), conj, 0);
    }
    return r;
}

// ---------------------------------------------------------------------------
// lfun

namespace {

struct RootCheck {
    double deviation = 0;
    bool ok = false;
};

RootCheck rh_check(const LPolynomial& L, double tol) {
    const double sq = std::sqrt(static_cast<double>(L.q));
    RootCheck rc;
    for (const auto& a : l_inverse_roots(L)) {
        const double m = std::abs(a);
        rc.deviation = std::max(rc.deviation, std::min(std::fabs(m - sq), std::fabs(m - 1.0)));
    }
    rc.ok = rc.deviation <= tol;
    return rc;
}

struct LfunFacts {
    double max_probe = 0;
    std::vector<RootCheck> roots;
    double conjugation = 0;
    double pointwise = -std::numeric_limits<double>::infinity();
    double simplified = -std::numeric_limits<double>::infinity();
    double single = -std::numeric_limits<double>::infinity();
    double shifted = -std::numeric_limits<double>::infinity();
};

LfunFacts lfun_facts(const PrimitiveFamily& fam, const PrimeTable& primes, const std::vector<ShiftSpec>& shifts,
                     const ExperimentConfig& c) {
    LfunFacts f;
    const Modulus& m = fam.modulus();
    const std::uint32_t q = m.field().q();
    const int d = m.degree();
    std::map<std::uint64_t, std::size_t> position;
    for (std::size_t k = 0; k < fam.size(); ++k) position[fam.characters[k].index()] = k;

    std::vector<double> grid(static_cast<std::size_t>(c.t_grid));
    for (int k = 0; k < c.t_grid; ++k) grid[static_cast<std::size_t>(k)] = period(q) * k / c.t_grid;

    for (std::size_t k = 0; k < fam.size(); ++k) {
        const auto& chi = fam.characters[k];
        const auto& L = fam.lpolys[k];
        for (const auto& p : L.probe) f.max_probe = std::max(f.max_probe, std::abs(p));
        f.roots.push_back(rh_check(L, c.tolerances.root_magnitude));

        const auto& Lc = fam.lpolys.at(position.at(chi.conjugate().index()));
        const auto expect = L.conjugated();
        for (std::size_t n = 0; n < expect.coeffs.size(); ++n) {
            f.conjugation = std::max(f.conjugation, std::abs(Lc.coeffs.at(n) - expect.coeffs[n]));
        }

        for (double t : grid) {
            const double lhs = log_abs_l_value(L, t);
            for (int h = 1; h <= d - 1; ++h) {
                f.pointwise = std::max(f.pointwise, lhs - log_l_bound_pointwise(chi, primes, t, h));
                f.simplified = std::max(f.simplified, log_l_bound_simplified(chi, L, primes, t, NormCutoff(h)).defect);
            }
            f.single = std::max(f.single, single_bound_constant(L, m, t));
        }
        for (const auto& s : shifts) {
            f.shifted = std::max(f.shifted, shifted_log_bound(chi, L, primes, s, NormCutoff(d - 1)).defect);
        }
    }
    return f;
}

}  // namespace

SuiteResult run_lfun(Workspace& ws) {
    const auto& c = ws.config();
    const auto& tol = c.tolerances;
    const auto& moduli = ws.moduli();
    SuiteResult r;
    if (moduli.empty()) return r;

    int max_degree = 1;
    for (const auto& Q : moduli) max_degree = std::max(max_degree, Q.degree() - 1);
    const PrimeTable primes(ws.field(), max_degree, max_degree);

    for (std::size_t i = 0; i < moduli.size(); ++i) ws.family(i);
    std::vector<LfunFacts> facts(moduli.size());
    parallel_for(moduli.size(), ws.options().jobs,
                 [&](std::size_t i) { facts[i] = lfun_facts(ws.family(i), primes, ws.shift_specs(), c); });

    CsvTable lpolys({"q", "modulus", "char_index", "n", "re", "im"});
    CsvTable bounds({"q", "modulus", "degree", "n_primitive", "max_probe", "max_root_deviation", "max_conjugation",
                     "max_pointwise_defect", "max_simplified_defect", "max_single_C", "max_shifted_defect"});
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const auto& fam = ws.family(i);
        const auto& f = facts[i];
        const std::string Q = to_string(moduli[i]);
        double rmax = 0;
        for (std::size_t k = 0; k < fam.size(); ++k) {
            const auto& L = fam.lpolys[k];
            for (std::size_t n = 0; n < L.coeffs.size(); ++n) {
                lpolys.add({str(c.q), Q, str(L.char_index), str(static_cast<std::uint64_t>(n)), fmt(L.coeffs[n].real()),
                            fmt(L.coeffs[n].imag())});
            }
            rmax = std::max(rmax, f.roots[k].deviation);
            CheckRow row = make_row("lfun", "inverse roots have modulus sqrt q or 1", "rh-roots",
                                    Q + " chi#" + str(L.char_index));
            row.pass = f.roots[k].ok;
            row.measured = f.roots[k].deviation;
            row.reference = tol.root_magnitude;
            r.checks.push_back(std::move(row));
        }
        bounds.add({str(c.q), Q, str(moduli[i].degree()), str(static_cast<std::uint64_t>(fam.size())), fmt(f.max_probe),
                    fmt(rmax), fmt(f.conjugation), fmt(f.pointwise), fmt(f.simplified), fmt(f.single), fmt(f.shifted)});
    }
    r.tables["lpolys.csv"] = std::move(lpolys);
    r.tables["lfun_bounds.csv"] = std::move(bounds);

    for (const auto& [d, idx] : by_degree(ws)) {
        Tally probe, conj, point;
        double simplified = -std::numeric_limits<double>::infinity(), single = simplified, shifted = simplified;
        std::size_t chars = 0;
        for (std::size_t i : idx) {
            const auto& f = facts[i];
            const std::string s = to_string(moduli[i]);
            chars += ws.family(i).size();
            if (ws.family(i).size() == 0) continue;
            probe.add(f.max_probe, f.max_probe < tol.coefficient_zero, s);
            conj.add(f.conjugation, f.conjugation <= tol.conjugation, s);
            point.add(f.pointwise, f.pointwise <= tol.bound_slack, s);
            simplified = std::max(simplified, f.simplified);
            single = std::max(single, f.single);
            shifted = std::max(shifted, f.shifted);
        }
        if (chars == 0) continue;
        const std::string subj = degree_subject(c.q, d) + " (" + str(static_cast<std::uint64_t>(chars)) + " characters)";
        push_tally(r, make_row("lfun", "coefficients vanish from degree d(Q) on", "lpoly-degree", subj), probe,
                   tol.coefficient_zero);
        push_tally(r, make_row("lfun", "L(u, conj chi) = conj L(conj u, chi)", "conjugation-symmetry", subj), conj,
                   tol.conjugation);
        if (d >= 2) {
            push_tally(r, make_row("lfun", "log|L| below the pointwise prime-sum bound", "pointwise-log-bound", subj),
                       point, tol.bound_slack);
            push_regression(ws, r, make_row("lfun", "simplified bound defect within recorded constant",
                                            "simplified-log-bound", subj),
                            degree_key(c.q, "lfun", d, "max_simplified_defect"), simplified, FixtureMode::upper_bound,
                            tol.fixture_relative);
        }
        push_regression(ws, r, make_row("lfun", "single-L constant within recorded value", "single-value-bound", subj),
                        degree_key(c.q, "lfun", d, "max_single_C"), single, FixtureMode::upper_bound,
                        tol.fixture_relative);
        if (!ws.shift_specs().empty()) {
            push_regression(ws, r, make_row("lfun", "weighted shifted bound defect within recorded constant",
                                            "shifted-log-bound", subj),
                            degree_key(c.q, "lfun", d, "max_shifted_defect"), shifted, FixtureMode::upper_bound,
                            tol.fixture_relative);
        }
    }

    if (c.self_test_perturb) {
        for (std::size_t i = 0; i < moduli.size(); ++i) {
            const auto& fam = ws.family(i);
            if (fam.size() == 0) continue;
            LPolynomial L = fam.lpolys.front();
            L.coeffs[L.coeffs.size() > 1 ? 1 : 0] += 0.1;
            const auto rc = rh_check(L, tol.root_magnitude);
            CheckRow row = make_row("lfun", "perturbed coefficient must break the root check", "self-test",
                                    to_string(moduli[i]) + " chi#" + str(L.char_index) + " perturbed");
            row.pass = rc.ok;
            row.measured = rc.deviation;
            row.reference = tol.root_magnitude;
            row.detail = rc.ok ? "" : "forced failure";
            r.checks.push_back(std::move(row));
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// moments

namespace {

struct MomentFacts {
    std::vector<MomentReport> reports;
    std::vector<double> report_ms;
    std::vector<RatioReport> charsums;   // m-major, then cutoff
    std::vector<RatioReport> integrals;  // exponents > 2 only
    double charsum_identity = 0;
};

std::vector<double> integral_exponents(const ExperimentConfig& c) {
    std::vector<double> out;
    for (double m : c.moment_exponents) {
        if (m > 2.0) out.push_back(m);
    }
    return out;
}

MomentFacts moment_facts(const PrimitiveFamily& fam, const std::vector<ShiftSpec>& shifts, const ExperimentConfig& c) {
    MomentFacts f;
    if (fam.size() == 0) return f;
    for (const auto& s : shifts) {
        const auto t0 = std::chrono::steady_clock::now();
        f.reports.push_back(moment_report(fam, s));
        f.report_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    for (double m : c.moment_exponents) {
        for (int N : c.charsum_degrees) f.charsums.push_back(charsum_moment(fam, m, NormCutoff(N)));
    }
    for (double m : integral_exponents(c)) f.integrals.push_back(integral_moment(fam, m, c.quad_points));
    for (std::size_t k = 0; k < fam.size(); ++k) {
        for (int N : c.charsum_degrees) {
            const cplx direct = char_sum(fam.characters[k], NormCutoff(N));
            f.charsum_identity = std::max(f.charsum_identity, std::abs(direct - char_sum_from_lpoly(fam.lpolys[k], NormCutoff(N))));
        }
    }
    return f;
}

bool all_finite_positive(const MomentReport& m) {
    for (double v : {m.lhs, m.rhs_zeta, m.rhs_min, m.ratio_zeta, m.ratio_min}) {
        if (!std::isfinite(v) || !(v > 0)) return false;
    }
    return true;
}

}  // namespace

SuiteResult run_moments(Workspace& ws) {
    const auto& c = ws.config();
    const auto& tol = c.tolerances;
    const auto& moduli = ws.moduli();
    const auto& shifts = ws.shift_specs();
    if (shifts.empty()) throw ConfigError("the moments suite needs at least one shift spec");
    for (int N : c.charsum_degrees) {
        if (checked_pow(c.q, N) > c.budget.max_monic) throw ConfigError("charsum degree exceeds the enumeration budget");
    }
    SuiteResult r;

    for (std::size_t i = 0; i < moduli.size(); ++i) ws.family(i);
    std::vector<MomentFacts> facts(moduli.size());
    parallel_for(moduli.size(), ws.options().jobs, [&](std::size_t i) { facts[i] = moment_facts(ws.family(i), shifts, c); });

    std::vector<std::string> hashes;
    for (const auto& s : shifts) hashes.push_back(shift_spec_hash(s));

    CsvTable moments({"q", "Q", "dQ", "phi", "n_primitive", "spec_hash", "lhs", "rhsZeta", "rhsMin", "ratioZeta",
                      "ratioMin", "crudeExponent"});
    nlohmann::json moment_rows = nlohmann::json::array();
    nlohmann::json wall = nlohmann::json::array();
    CsvTable charsums({"q", "Q", "dQ", "phi", "n_primitive", "m", "N", "moment", "normaliser", "ratio"});
    CsvTable integrals({"q", "Q", "dQ", "phi", "n_primitive", "m", "quad_points", "moment", "normaliser", "ratio"});
    const auto iexps = integral_exponents(c);
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const auto& f = facts[i];
        for (std::size_t s = 0; s < f.reports.size(); ++s) {
            const auto& m = f.reports[s];
            moments.add({str(m.q), m.modulus, str(m.degree), str(m.phi), str(m.n_primitive), hashes[s], fmt(m.lhs),
                         fmt(m.rhs_zeta), fmt(m.rhs_min), fmt(m.ratio_zeta), fmt(m.ratio_min), fmt(m.crude_exponent)});
            moment_rows.push_back({{"q", m.q}, {"Q", m.modulus}, {"dQ", m.degree}, {"phi", m.phi},
                                   {"n_primitive", m.n_primitive}, {"spec_hash", hashes[s]}, {"lhs", m.lhs},
                                   {"rhsZeta", m.rhs_zeta}, {"rhsMin", m.rhs_min}, {"ratioZeta", m.ratio_zeta},
                                   {"ratioMin", m.ratio_min}, {"crudeExponent", m.crude_exponent}});
            wall.push_back({{"Q", m.modulus}, {"spec_hash", hashes[s]}, {"wall_time_ms", f.report_ms[s]}});
        }
        if (f.reports.empty()) continue;
        const auto& m0 = f.reports.front();
        std::size_t k = 0;
        for (double m : c.moment_exponents) {
            for (int N : c.charsum_degrees) {
                const auto& cs = f.charsums[k++];
                charsums.add({str(m0.q), m0.modulus, str(m0.degree), str(m0.phi), str(m0.n_primitive), fmt(m), str(N),
                              fmt(cs.moment), fmt(cs.normaliser), fmt(cs.ratio)});
            }
        }
        for (std::size_t e = 0; e < iexps.size(); ++e) {
            const auto& in = f.integrals[e];
            integrals.add({str(m0.q), m0.modulus, str(m0.degree), str(m0.phi), str(m0.n_primitive), fmt(iexps[e]),
                           str(c.quad_points), fmt(in.moment), fmt(in.normaliser), fmt(in.ratio)});
        }
    }
    r.tables["moments.csv"] = std::move(moments);
    r.tables["charsums.csv"] = std::move(charsums);
    r.tables["integrals.csv"] = std::move(integrals);
    r.json_files["moments.json"] = moment_rows;
    r.metadata["moment_wall_times"] = wall;

    // per-degree maxima; the ratio sequences are judged across degrees
    struct DegreeMax {
        int degree;
        std::string subject;
        double zeta = 0, min = 0, crude = -std::numeric_limits<double>::infinity();
        bool finite = true;
        std::string bad;
        std::vector<double> charsum, integral;
        Tally identity;
    };
    std::vector<DegreeMax> maxima;
    for (const auto& [d, idx] : by_degree(ws)) {
        DegreeMax dm;
        dm.degree = d;
        dm.charsum.assign(c.moment_exponents.size() * c.charsum_degrees.size(), 0.0);
        dm.integral.assign(iexps.size(), 0.0);
        std::size_t count = 0;
        for (std::size_t i : idx) {
            const auto& f = facts[i];
            if (f.reports.empty()) continue;
            ++count;
            for (const auto& m : f.reports) {
                if (!all_finite_positive(m)) {
                    if (dm.finite) dm.bad = m.modulus;
                    dm.finite = false;
                }
                dm.zeta = std::max(dm.zeta, m.ratio_zeta);
                dm.min = std::max(dm.min, m.ratio_min);
                dm.crude = std::max(dm.crude, m.crude_exponent);
            }
            for (std::size_t k = 0; k < f.charsums.size(); ++k) dm.charsum[k] = std::max(dm.charsum[k], f.charsums[k].ratio);
            for (std::size_t k = 0; k < f.integrals.size(); ++k) dm.integral[k] = std::max(dm.integral[k], f.integrals[k].ratio);
            dm.identity.add(f.charsum_identity, f.charsum_identity <= tol.orthogonality, to_string(moduli[i]));
        }
        if (count == 0) continue;
        dm.subject = degree_subject(c.q, d) + " (" + str(static_cast<std::uint64_t>(count)) + " moduli, " +
                     str(static_cast<std::uint64_t>(shifts.size())) + " shift specs)";
        maxima.push_back(std::move(dm));
    }

    auto ratio_rows = [&](const char* what, const char* anchor, const char* key, double DegreeMax::*field) {
        bool nonincreasing = true;
        for (std::size_t k = 1; k < maxima.size(); ++k) {
            if (maxima[k].*field > maxima[k - 1].*field) nonincreasing = false;
        }
        for (const auto& dm : maxima) {
            const double v = dm.*field;
            const auto fx = regression(ws, r, degree_key(c.q, "moments", dm.degree, key), v, FixtureMode::relative,
                                       tol.fixture_relative);
            CheckRow row = make_row("moments", what, anchor, dm.subject);
            row.measured = v;
            row.reference = fx.reference;
            row.pass = dm.finite && std::isfinite(v) && (nonincreasing || fx.pass);
            if (!dm.finite) {
                row.detail = "non-finite or non-positive ratio at " + dm.bad;
            } else if (!row.pass) {
                row.detail = "per-degree maxima increase and " + fx.detail;
            } else if (nonincreasing) {
                row.detail = "per-degree maxima non-increasing";
            } else {
                row.detail = "within recorded value";
            }
            r.checks.push_back(std::move(row));
        }
    };
    ratio_rows("max ratio lhs / zeta-form bound", "shifted-moment-zeta", "max_ratio_zeta", &DegreeMax::zeta);
    ratio_rows("max ratio lhs / min-form bound", "shifted-moment-min", "max_ratio_min", &DegreeMax::min);

    for (auto& dm : maxima) {
        push_regression(ws, r, make_row("moments", "crude exponent within recorded value", "crude-moment", dm.subject),
                        degree_key(c.q, "moments", dm.degree, "max_crude_exponent"), dm.crude, FixtureMode::upper_bound,
                        tol.fixture_relative);
        if (dm.identity.worst < 0) dm.identity.worst = 0;
        push_tally(r, make_row("moments", "character sum by enumeration equals L-coefficient sum", "charsum-identity",
                               dm.subject),
                   dm.identity, tol.orthogonality);
        std::size_t k = 0;
        for (double m : c.moment_exponents) {
            for (int N : c.charsum_degrees) {
                const std::string what = "m=" + fmt(m) + " N=" + str(N);
                push_regression(ws, r, make_row("moments", "normalised S_m ratio " + what, "charsum-moment", dm.subject),
                                "q=" + str(c.q) + "/charsum/d=" + str(dm.degree) + "/m=" + fmt(m) + "/N=" + str(N) +
                                    "/max_ratio",
                                dm.charsum[k++], FixtureMode::relative, tol.fixture_relative);
            }
        }
        for (std::size_t e = 0; e < iexps.size(); ++e) {
            push_regression(ws, r,
                            make_row("moments", "normalised integral moment m=" + fmt(iexps[e]), "integral-moment",
                                     dm.subject),
                            "q=" + str(c.q) + "/integral/d=" + str(dm.degree) + "/m=" + fmt(iexps[e]) + "/max_ratio",
                            dm.integral[e], FixtureMode::relative, tol.fixture_relative);
        }
    }

    // Perron: sampled (chi, N) per degree family
    CsvTable perron({"q", "Q", "char_index", "N", "M", "quad_re", "quad_im", "direct_re", "direct_im", "difference",
                     "aliasing_bound"});
    for (const auto& [d, idx] : by_degree(ws)) {
        std::vector<std::size_t> usable;
        for (std::size_t i : idx) {
            if (ws.family(i).size() > 0) usable.push_back(i);
        }
        if (usable.empty() || c.perron_samples == 0) continue;
        std::mt19937_64 rng(0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(d) ^ (static_cast<std::uint64_t>(c.q) << 32));
        Tally t;
        for (int s = 0; s < c.perron_samples; ++s) {
            const std::size_t i = usable[rng() % usable.size()];
            const auto& fam = ws.family(i);
            const auto& L = fam.lpolys[rng() % fam.size()];
            const int N = static_cast<int>(rng() % static_cast<std::uint64_t>(d + 2));
            const int M = 64 * (N + d);
            const auto res = perron_partial_sum(L, N, c.perron_radius, M);
            const double diff = std::abs(res.quadrature - res.direct);
            t.add(diff, diff < tol.perron, to_string(moduli[i]) + " chi#" + str(L.char_index) + " N=" + str(N));
            perron.add({str(c.q), to_string(moduli[i]), str(L.char_index), str(N), str(M), fmt(res.quadrature.real()),
                        fmt(res.quadrature.imag()), fmt(res.direct.real()), fmt(res.direct.imag()), fmt(diff),
                        fmt(res.aliasing_bound)});
        }
        push_tally(r,
                   make_row("moments", "contour mean equals partial coefficient sum", "perron-identity",
                            degree_subject(c.q, d) + " (" + str(c.perron_samples) + " samples)"),
                   t, tol.perron);
    }
    r.tables["perron.csv"] = std::move(perron);
    return r;
}

// ---------------------------------------------------------------------------
// primesums

namespace {

std::vector<int> f_sum_heights(int h_max) {
    std::vector<int> hs;
    for (int h = 1; h <= std::min(20, h_max); ++h) hs.push_back(h);
    double h = 20;
    while (hs.back() < h_max) {
        h *= 1.25;
        hs.push_back(std::min(h_max, static_cast<int>(std::ceil(h))));
    }
    return hs;
}

}  // namespace

SuiteResult run_primesums(Workspace& ws) {
    const auto& c = ws.config();
    const auto& g = c.primesums;
    const auto& tol = c.tolerances;
    if (g.h_min < 1 || g.h_max < g.h_min + 1) throw ConfigError("primesums: need 1 <= h_min < h_max");
    SuiteResult r;

    CsvTable grid({"q", "h", "alpha", "sum", "estimate1", "estimate2", "defect1", "defect2"});
    CsvTable mertens({"q", "h", "logp_sum", "logp_defect", "recip_sum", "recip_residual_times_log"});
    CsvTable fcomp({"q", "h", "alpha", "cos_sum", "F", "difference"});
    CsvTable tails({"q", "h", "head", "tail", "remainder_bound", "truncation_degree", "total"});

    const int half = std::max(g.h_min, g.h_max / 2);
    for (std::uint32_t q : g.q_values) {
        const FieldSpec F(q);
        const std::string qs = "q=" + str(q);
        const PrimeTable table(F, std::max(g.h_max, 8 * g.tail_h_max), 0);

        // log-weighted and reciprocal sums
        Tally logp;
        const auto fit = fit_mertens_constant(table, g.h_min, g.h_max);
        double resid = 0;
        for (int h = 1; h <= g.h_max; ++h) {
            const auto lp = logp_sum(table, NormCutoff(h));
            logp.add(std::fabs(lp.defect), std::fabs(lp.defect) <= 2.0, qs + " h=" + str(h));
            const double rs = recip_sum(table, NormCutoff(h));
            std::string rl;
            if (h >= g.h_min) {
                const double v = fit.residual_times_log[static_cast<std::size_t>(h - g.h_min)];
                resid = std::max(resid, std::fabs(v));
                rl = fmt(v);
            }
            mertens.add({str(q), str(h), fmt(lp.value), fmt(lp.defect), fmt(rs), rl});
        }
        push_tally(r, make_row("primesums", "log-weighted prime sum within 2 of log x", "mertens-log", qs), logp, 2.0);
        push_regression(ws, r, make_row("primesums", "fitted reciprocal-sum constant b", "mertens-recip", qs),
                        "primesums/" + qs + "/mertens_b", fit.b, FixtureMode::exact, tol.fixture_exact);
        push_regression(ws, r, make_row("primesums", "max |residual * log x| after fitting b", "mertens-recip", qs),
                        "primesums/" + qs + "/max_resid_log", resid, FixtureMode::exact, tol.fixture_exact);

        // cosine sums on one period of alpha
        std::map<int, std::pair<double, double>> sup;
        double f_diff = 0;
        bool finite = true;
        for (int h = g.h_min; h <= g.h_max; ++h) {
            double s1 = 0, s2 = 0;
            for (int k = 0; k < g.alpha_points; ++k) {
                const double alpha = period(q) * k / g.alpha_points;
                const NormCutoff x(h);
                const double sum = mertens_cos_sum(table, x, alpha);
                const double e1 = zeta_log_estimate(F, x, alpha);
                const double e2 = log_min_estimate(F, x, alpha);
                const double d1 = sum - e1, d2 = sum - e2;
                finite = finite && std::isfinite(d1) && std::isfinite(d2);
                s1 = std::max(s1, std::fabs(d1));
                s2 = std::max(s2, std::fabs(d2));
                grid.add({str(q), str(h), fmt(alpha), fmt(sum), fmt(e1), fmt(e2), fmt(d1), fmt(d2)});
                const double fv = F_sum(h, alpha * std::log(static_cast<double>(q)));
                f_diff = std::max(f_diff, std::fabs(sum - fv));
                fcomp.add({str(q), str(h), fmt(alpha), fmt(sum), fmt(fv), fmt(sum - fv)});
            }
            sup[h] = {s1, s2};
            const std::string subj = qs + " h=" + str(h);
            push_regression(ws, r, make_row("primesums", "sup |cos sum - zeta estimate| over alpha", "mertens-cos", subj),
                            "primesums/" + qs + "/h=" + str(h) + "/sup_zeta_defect", s1, FixtureMode::exact,
                            tol.fixture_exact);
            push_regression(ws, r, make_row("primesums", "sup |cos sum - log min estimate| over alpha", "mertens-cos", subj),
                            "primesums/" + qs + "/h=" + str(h) + "/sup_min_defect", s2, FixtureMode::exact,
                            tol.fixture_exact);
        }
        for (int which = 0; which < 2; ++which) {
            const double top = which == 0 ? sup[g.h_max].first : sup[g.h_max].second;
            const double mid = which == 0 ? sup[half].first : sup[half].second;
            CheckRow row = make_row("primesums",
                                    std::string(which == 0 ? "zeta" : "log min") + " defect does not grow with h",
                                    "mertens-cos", qs + " h=" + str(g.h_max) + " vs h=" + str(half));
            row.measured = top;
            row.reference = 1.1 * mid;
            row.pass = finite && top <= 1.1 * mid;
            if (!row.pass) row.detail = finite ? "sup defect grew by more than 10%" : "non-finite defect";
            r.checks.push_back(std::move(row));
        }
        push_regression(ws, r, make_row("primesums", "sup |cos sum - F(h, alpha log q)|", "mertens-cos", qs),
                        "primesums/" + qs + "/max_F_comparison", f_diff, FixtureMode::exact, tol.fixture_exact);

        // prime-power tail
        double worst_total = 0;
        Tally remainder;
        for (int h = 1; h <= g.tail_h_max; ++h) {
            const auto t = prime_power_tail(table, NormCutoff(h));
            worst_total = std::max(worst_total, t.total());
            const double share = t.remainder_bound / t.total();
            remainder.add(share, share < 1e-3, qs + " h=" + str(h));
            tails.add({str(q), str(h), fmt(t.head), fmt(t.tail), fmt(t.remainder_bound), str(t.truncation_degree),
                       fmt(t.total())});
        }
        push_regression(ws, r, make_row("primesums", "prime-power tail within recorded bound", "prime-power-tail", qs),
                        "primesums/" + qs + "/max_tail", worst_total, FixtureMode::upper_bound, tol.fixture_exact);
        push_tally(r, make_row("primesums", "truncation remainder below 1e-3 of the value", "prime-power-tail", qs),
                   remainder, 1e-3);
    }

    // F(h, theta) against log min(h, 1/theta-bar)
    double fsup = 0;
    bool ffinite = true;
    for (int h : f_sum_heights(g.f_h_max)) {
        for (int k = 0; k < g.alpha_points; ++k) {
            const double theta = kTwoPi * k / g.alpha_points;
            const double d = std::fabs(F_sum(h, theta) - log_min_h(h, theta));
            ffinite = ffinite && std::isfinite(d);
            fsup = std::max(fsup, d);
        }
    }
    if (!ffinite) fsup = std::numeric_limits<double>::infinity();
    push_regression(ws, r,
                    make_row("primesums", "sup |F(h, theta) - log min(h, 1/theta-bar)|", "F-sum",
                             "h<=" + str(g.f_h_max) + " theta grid " + str(g.alpha_points)),
                    "primesums/max_F_defect", fsup, FixtureMode::exact, tol.fixture_exact);

    r.tables["grid.csv"] = std::move(grid);
    r.tables["mertens.csv"] = std::move(mertens);
    r.tables["fsum.csv"] = std::move(fcomp);
    r.tables["tail.csv"] = std::move(tails);
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const ExperimentConfig& config, const RunOptions& options) {
    using Runner = SuiteResult (*)(Workspace&);
    static const std::vector<std::pair<std::string, Runner>> suites{
        {"enumerate", run_enumerate}, {"lfun", run_lfun}, {"moments", run_moments}, {"primesums", run_primesums}};
    std::vector<std::pair<std::string, Runner>> chosen;
    for (const auto& s : suites) {
        if (name == "all" || name == s.first) chosen.push_back(s);
    }
    if (chosen.empty()) throw ConfigError("unknown suite '" + name + "'");

    Workspace ws(config, options);
    SuiteResult out;
    nlohmann::json timing = nlohmann::json::object();
    const std::string started = utc_now();
    for (const auto& [suite, run] : chosen) {
        const auto t0 = std::chrono::steady_clock::now();
        out.append(run(ws));
        timing[suite] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    for (const auto& row : out.checks) {
        if (!anchor_known(row.anchor)) throw std::logic_error("check row with unregistered anchor " + row.anchor);
    }
    if (options.record) {
        Fixtures fx = Fixtures::load(ws.fixtures_path());
        fx.merge(out.measurements);
        fx.save(ws.fixtures_path());
    }
    out.metadata["suite"] = name;
    out.metadata["started"] = started;
    out.metadata["finished"] = utc_now();
    out.metadata["wall_time_s"] = timing;
    out.metadata["jobs"] = options.jobs;
    out.metadata["record"] = options.record;
    out.metadata["fixtures"] = ws.fixtures_path();
    out.metadata["moduli"] = ws.moduli().size();
    out.metadata["shift_specs"] = ws.shift_specs().size();
    out.metadata["cache"] = ws.cache_metadata();
    out.metadata["config"] = to_json(ws.config());
    out.metadata["checks"] = out.checks.size();
    out.metadata["failures"] = out.failures();
    return out;
}

}  // namespace ffm
