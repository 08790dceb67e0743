#include "ffm/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "ffm/chargroup.hpp"
#include "ffm/errors.hpp"

namespace ffm {

using nlohmann::json;

namespace {

// Reads fields out of one JSON object and rejects any key nobody asked for.
class ObjectReader {
  public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    template <class T>
    void require(const char* key, T& out) {
        if (!j_.contains(key)) throw ConfigError(where_ + ": missing required field '" + key + "'");
        get(key, out);
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown field '" + k + "'");
        }
    }

  private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("tolerance '") + name + "' must be > 0");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    ObjectReader r(j, "config");
    int schema = 0;
    r.require("schema", schema);
    if (schema != kConfigSchema) throw ConfigError("unsupported config schema " + std::to_string(schema));
    r.require("q", c.q);
    try {
        FieldSpec check(c.q);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("q: ") + e.what());
    }

    if (const json* f = r.sub("family")) {
        DegreeRange d;
        ObjectReader fr(*f, "family");
        fr.require("min_degree", d.min_degree);
        fr.require("max_degree", d.max_degree);
        fr.finish();
        if (d.min_degree < 2 || d.max_degree < d.min_degree) throw ConfigError("family: need 2 <= min_degree <= max_degree");
        c.family = d;
    }
    r.get("moduli", c.moduli);

    if (const json* s = r.sub("shifts")) {
        if (!s->is_array()) throw ConfigError("shifts: expected an array");
        for (std::size_t i = 0; i < s->size(); ++i) {
            ShiftEntry e;
            ObjectReader sr(s->at(i), "shifts[" + std::to_string(i) + "]");
            sr.require("a", e.a);
            sr.require("t", e.t);
            sr.finish();
            try {
                ShiftSpec check(e.a, e.t);
            } catch (const DomainError& err) {
                throw ConfigError("shifts[" + std::to_string(i) + "]: " + err.what());
            }
            c.shifts.push_back(std::move(e));
        }
    }
    if (const json* s = r.sub("random_shifts")) {
        RandomShiftSpecs rs;
        ObjectReader sr(*s, "random_shifts");
        sr.require("count", rs.count);
        sr.get("size", rs.size);
        sr.get("a_min", rs.a_min);
        sr.get("a_max", rs.a_max);
        sr.get("seed", rs.seed);
        sr.finish();
        if (rs.count < 0 || rs.size < 2 || rs.size % 2 != 0) throw ConfigError("random_shifts: need count >= 0 and even size >= 2");
        if (!(rs.a_min > 0.0) || rs.a_max < rs.a_min) throw ConfigError("random_shifts: need 0 < a_min <= a_max");
        c.random_shifts = rs;
    }

    r.get("moment_exponents", c.moment_exponents);
    for (double m : c.moment_exponents) {
        if (!(m > 0.0)) throw ConfigError("moment_exponents must be positive");
    }
    r.get("charsum_degrees", c.charsum_degrees);
    for (int n : c.charsum_degrees) {
        if (n < 0) throw ConfigError("charsum_degrees must be >= 0");
    }
    r.get("t_grid", c.t_grid);
    if (c.t_grid < 1) throw ConfigError("t_grid must be >= 1");
    r.get("quad_points", c.quad_points);
    if (c.quad_points < 256) throw ConfigError("quad_points must be >= 256");
    r.get("perron_samples", c.perron_samples);
    if (c.perron_samples < 0) throw ConfigError("perron_samples must be >= 0");
    r.get("perron_radius", c.perron_radius);
    if (!(c.perron_radius > 0.0 && c.perron_radius < 1.0)) throw ConfigError("perron_radius must lie in (0, 1)");
    r.get("prime_enumeration_limit", c.prime_enumeration_limit);

    if (const json* p = r.sub("primesums")) {
        ObjectReader pr(*p, "primesums");
        pr.get("q_values", c.primesums.q_values);
        pr.get("h_min", c.primesums.h_min);
        pr.get("h_max", c.primesums.h_max);
        pr.get("alpha_points", c.primesums.alpha_points);
        pr.get("f_h_max", c.primesums.f_h_max);
        pr.get("tail_h_max", c.primesums.tail_h_max);
        pr.finish();
        for (auto q : c.primesums.q_values) {
            if (!is_prime(q)) throw ConfigError("primesums.q_values: " + std::to_string(q) + " is not prime");
        }
        const auto& g = c.primesums;
        if (g.h_min < 1 || g.h_max < g.h_min || g.alpha_points < 1 || g.f_h_max < 1 || g.tail_h_max < 1) {
            throw ConfigError("primesums: invalid grid bounds");
        }
    }

    if (const json* t = r.sub("tolerances")) {
        auto& tol = c.tolerances;
        ObjectReader tr(*t, "tolerances");
        tr.get("coefficient_zero", tol.coefficient_zero);
        tr.get("root_magnitude", tol.root_magnitude);
        tr.get("bound_slack", tol.bound_slack);
        tr.get("conjugation", tol.conjugation);
        tr.get("orthogonality", tol.orthogonality);
        tr.get("multiplicativity", tol.multiplicativity);
        tr.get("perron", tol.perron);
        tr.get("fixture_exact", tol.fixture_exact);
        tr.get("fixture_relative", tol.fixture_relative);
        tr.finish();
    }
    const auto& tol = c.tolerances;
    positive(tol.coefficient_zero, "coefficient_zero");
    positive(tol.root_magnitude, "root_magnitude");
    positive(tol.bound_slack, "bound_slack");
    positive(tol.conjugation, "conjugation");
    positive(tol.orthogonality, "orthogonality");
    positive(tol.multiplicativity, "multiplicativity");
    positive(tol.perron, "perron");
    positive(tol.fixture_exact, "fixture_exact");
    positive(tol.fixture_relative, "fixture_relative");

    if (const json* b = r.sub("budget")) {
        ObjectReader br(*b, "budget");
        br.get("max_phi", c.budget.max_phi);
        br.get("max_monic", c.budget.max_monic);
        br.finish();
    }
    r.get("output_dir", c.output_dir);
    r.get("cache_dir", c.cache_dir);
    r.get("fixtures", c.fixtures);
    r.get("self_test_perturb", c.self_test_perturb);
    r.finish();

    // moduli strings must parse now so the error carries a position
    FieldSpec F(c.q);
    for (const auto& s : c.moduli) {
        try {
            FqPoly Q = parse_poly(F, s);
            if (!Q.is_monic() || Q.degree() < 2) throw ConfigError("modulus '" + s + "' must be monic of degree >= 2");
        } catch (const ParseError& e) {
            throw ConfigError("modulus '" + s + "': " + e.what());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = kConfigSchema;
    j["q"] = c.q;
    if (c.family) j["family"] = {{"min_degree", c.family->min_degree}, {"max_degree", c.family->max_degree}};
    j["moduli"] = c.moduli;
    json shifts = json::array();
    for (const auto& s : c.shifts) shifts.push_back({{"a", s.a}, {"t", s.t}});
    j["shifts"] = shifts;
    if (c.random_shifts) {
        const auto& r = *c.random_shifts;
        j["random_shifts"] = {{"count", r.count}, {"size", r.size}, {"a_min", r.a_min}, {"a_max", r.a_max}, {"seed", r.seed}};
    }
    j["moment_exponents"] = c.moment_exponents;
    j["charsum_degrees"] = c.charsum_degrees;
    j["t_grid"] = c.t_grid;
    j["quad_points"] = c.quad_points;
    j["perron_samples"] = c.perron_samples;
    j["perron_radius"] = c.perron_radius;
    j["prime_enumeration_limit"] = c.prime_enumeration_limit;
    const auto& g = c.primesums;
    j["primesums"] = {{"q_values", g.q_values}, {"h_min", g.h_min},         {"h_max", g.h_max},
                      {"alpha_points", g.alpha_points}, {"f_h_max", g.f_h_max}, {"tail_h_max", g.tail_h_max}};
    const auto& t = c.tolerances;
    j["tolerances"] = {{"coefficient_zero", t.coefficient_zero}, {"root_magnitude", t.root_magnitude},
                       {"bound_slack", t.bound_slack},           {"conjugation", t.conjugation},
                       {"orthogonality", t.orthogonality},       {"multiplicativity", t.multiplicativity},
                       {"perron", t.perron},                     {"fixture_exact", t.fixture_exact},
                       {"fixture_relative", t.fixture_relative}};
    j["budget"] = {{"max_phi", c.budget.max_phi}, {"max_monic", c.budget.max_monic}};
    j["output_dir"] = c.output_dir;
    j["cache_dir"] = c.cache_dir;
    j["fixtures"] = c.fixtures;
    j["self_test_perturb"] = c.self_test_perturb;
    return j;
}

std::vector<FqPoly> config_moduli(const ExperimentConfig& c) {
    FieldSpec F(c.q);
    std::vector<FqPoly> out;
    if (c.family) {
        for (int d = c.family->min_degree; d <= c.family->max_degree; ++d) {
            // the irreducible members alone reach phi = q^d - 1
            if (checked_pow(c.q, d) - 1 > c.budget.max_phi) {
                throw ConfigError("family degree " + std::to_string(d) + " exceeds the budget on phi(Q)");
            }
            for (auto& Q : enumerate_monic(F, d)) out.push_back(std::move(Q));
        }
    }
    for (const auto& s : c.moduli) out.push_back(parse_poly(F, s));
    for (const auto& Q : out) {
        if (!Q.is_monic() || Q.degree() < 2) throw ConfigError("modulus " + to_string(Q) + " must be monic of degree >= 2");
        if (checked_pow(c.q, Q.degree() - 1) > c.budget.max_monic) {
            throw ConfigError("modulus " + to_string(Q) + " exceeds the budget on q^{d(Q)-1}");
        }
        if (checked_pow(c.q, Q.degree()) - 1 > c.budget.max_phi && factor_modulus(Q).phi() > c.budget.max_phi) {
            throw ConfigError("modulus " + to_string(Q) + " exceeds the budget on phi(Q)");
        }
    }
    return out;
}

double unit_interval(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<ShiftSpec> config_shift_specs(const ExperimentConfig& c) {
    std::vector<ShiftSpec> out;
    for (const auto& s : c.shifts) out.emplace_back(s.a, s.t);
    if (c.random_shifts) {
        const auto& r = *c.random_shifts;
        const double period = 2.0 * std::numbers::pi / std::log(static_cast<double>(c.q));
        std::mt19937_64 rng(r.seed);
        for (int i = 0; i < r.count; ++i) {
            std::vector<Shift> pairs;
            for (int j = 0; j < r.size; ++j) {
                const double a = r.a_min + (r.a_max - r.a_min) * unit_interval(rng());
                const double t = period * unit_interval(rng());
                pairs.push_back({a, t});
            }
            out.emplace_back(std::move(pairs));
        }
    }
    return out;
}

}  // namespace ffm
