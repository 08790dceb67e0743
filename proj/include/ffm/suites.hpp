#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ffm/cache.hpp"
#include "ffm/config.hpp"
#include "ffm/fixtures.hpp"
#include "ffm/lfunc.hpp"
#include "ffm/report.hpp"

namespace ffm {

struct RunOptions {
    int jobs = 1;
    bool record = false;
    std::string cache_dir;                 // overrides the config when non-empty
    std::optional<std::uint64_t> budget;   // overrides budget.max_phi
    std::string fixtures_path;             // overrides the config when non-empty
};

/// Moduli of one run with their unit groups and primitive families, built
/// on first use (in parallel) and shared between suites.
class Workspace {
  public:
    Workspace(ExperimentConfig config, RunOptions options);

    const ExperimentConfig& config() const noexcept { return config_; }
    const RunOptions& options() const noexcept { return options_; }
    FieldSpec field() const { return FieldSpec(config_.q); }
    const std::vector<FqPoly>& moduli() const noexcept { return moduli_; }
    const std::vector<ShiftSpec>& shift_specs() const noexcept { return shifts_; }
    const Fixtures& fixtures() const noexcept { return fixtures_; }
    const std::string& fixtures_path() const noexcept { return fixtures_path_; }

    const std::shared_ptr<const UnitGroup>& group(std::size_t i);
    const PrimitiveFamily& family(std::size_t i);
    /// Degree of every modulus, in run order.
    std::vector<int> degrees() const;

    nlohmann::json cache_metadata() const;

  private:
    void build_groups();
    void build_families();

    ExperimentConfig config_;
    RunOptions options_;
    Cache cache_;
    Fixtures fixtures_;
    std::string fixtures_path_;
    std::vector<FqPoly> moduli_;
    std::vector<ShiftSpec> shifts_;
    std::vector<std::shared_ptr<const UnitGroup>> groups_;
    std::vector<PrimitiveFamily> families_;
    std::vector<char> group_hits_, family_hits_;
    bool groups_built_ = false;
    bool families_built_ = false;
};

constexpr int kProbeDegrees = 2;

SuiteResult run_enumerate(Workspace& ws);
SuiteResult run_lfun(Workspace& ws);
SuiteResult run_moments(Workspace& ws);
SuiteResult run_primesums(Workspace& ws);

/// "enumerate", "lfun", "moments", "primesums", or "all". Adds timing and cache
/// metadata, and under --record merges the measurements into the fixture file.
/// Throws ConfigError for an unknown suite name.
SuiteResult run_suite(const std::string& name, const ExperimentConfig& config, const RunOptions& options);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ffm
