#include "ffm/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "ffm/errors.hpp"

namespace ffm {

Fixtures Fixtures::load(const std::string& path) {
    Fixtures fx;
    std::ifstream in(path);
    if (!in) return fx;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& [k, v] : j.items()) fx.values_[k] = v.get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("fixture file " + path + ": " + e.what());
    }
    return fx;
}

void Fixtures::save(const std::string& path) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write fixture file " + path);
    out << j.dump(2) << '\n';
}

std::optional<double> Fixtures::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void Fixtures::merge(const std::map<std::string, double>& values) {
    for (const auto& [k, v] : values) values_[k] = v;
}

FixtureVerdict compare_fixture(const Fixtures& fx, const std::string& key, double measured, FixtureMode mode,
                               double tol) {
    FixtureVerdict v;
    const auto ref = fx.get(key);
    if (!ref) {
        v.reference = std::numeric_limits<double>::quiet_NaN();
        v.detail = "no recorded value for " + key + " (run with --record)";
        return v;
    }
    v.reference = *ref;
    if (!std::isfinite(measured)) {
        v.detail = "non-finite measurement";
        return v;
    }
    const double diff = measured - *ref;
    switch (mode) {
        case FixtureMode::exact:
            v.pass = std::fabs(diff) <= tol * std::max(1.0, std::fabs(*ref));
            break;
        case FixtureMode::relative:
            v.pass = std::fabs(diff) <= tol * std::fabs(*ref);
            break;
        case FixtureMode::upper_bound:
            v.pass = diff <= tol * std::fabs(*ref) + 1e-12;
            break;
    }
    if (!v.pass) v.detail = "outside recorded value for " + key;
    return v;
}

}  // namespace ffm
