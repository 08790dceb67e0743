#pragma once

#include <map>
#include <optional>
#include <string>

namespace ffm {

/// Recorded regression constants: a flat, sorted key -> value JSON object.
class Fixtures {
  public:
    Fixtures() = default;
    /// A missing file loads as empty; a malformed one throws ConfigError.
    static Fixtures load(const std::string& path);
    void save(const std::string& path) const;

    std::optional<double> get(const std::string& key) const;
    void set(const std::string& key, double value) { values_[key] = value; }
    void merge(const std::map<std::string, double>& values);
    const std::map<std::string, double>& values() const noexcept { return values_; }

  private:
    std::map<std::string, double> values_;
};

enum class FixtureMode {
    exact,        // |measured - recorded| <= tol * max(1, |recorded|)
    relative,     // |measured - recorded| <= tol * |recorded|
    upper_bound,  // measured <= recorded + tol * |recorded| + 1e-12
};

struct FixtureVerdict {
    bool pass = false;
    double reference = 0;  // NaN when nothing was recorded
    std::string detail;
};

FixtureVerdict compare_fixture(const Fixtures& fx, const std::string& key, double measured, FixtureMode mode,
                               double tol);

}  // namespace ffm
