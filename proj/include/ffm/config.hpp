#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ffm/ffpoly.hpp"
#include "ffm/shifts.hpp"

namespace ffm {

constexpr int kConfigSchema = 1;

struct DegreeRange {
    int min_degree = 2;
    int max_degree = 2;
    friend bool operator==(const DegreeRange&, const DegreeRange&) = default;
};

struct RandomShiftSpecs {
    int count = 0;
    int size = 4;  // 2k
    double a_min = 0.5;
    double a_max = 2.0;
    std::uint64_t seed = 1;
    friend bool operator==(const RandomShiftSpecs&, const RandomShiftSpecs&) = default;
};

struct ShiftEntry {
    std::vector<double> a;
    std::vector<double> t;
    friend bool operator==(const ShiftEntry&, const ShiftEntry&) = default;
};

struct PrimesumGrid {
    std::vector<std::uint32_t> q_values{2, 3, 5};
    int h_min = 2;
    int h_max = 12;
    int alpha_points = 64;
    int f_h_max = 10000;
    int tail_h_max = 10;
    friend bool operator==(const PrimesumGrid&, const PrimesumGrid&) = default;
};

struct Tolerances {
    double coefficient_zero = 1e-6;
    double root_magnitude = 1e-6;
    double bound_slack = 1e-9;
    double conjugation = 1e-10;
    double orthogonality = 1e-9;
    double multiplicativity = 1e-12;
    double perron = 1e-8;
    double fixture_exact = 1e-9;
    double fixture_relative = 0.25;
    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct Budget {
    std::uint64_t max_phi = 100000;
    std::uint64_t max_monic = 100000;  // cap on q^{d(Q)-1}
    friend bool operator==(const Budget&, const Budget&) = default;
};

struct ExperimentConfig {
    std::uint32_t q = 3;
    std::optional<DegreeRange> family;
    std::vector<std::string> moduli;
    std::vector<ShiftEntry> shifts;
    std::optional<RandomShiftSpecs> random_shifts;
    std::vector<double> moment_exponents{2.5, 3.0};
    std::vector<int> charsum_degrees{2, 3};
    int t_grid = 32;
    int quad_points = 1024;
    int perron_samples = 50;
    double perron_radius = 0.5;
    std::uint64_t prime_enumeration_limit = 10000;
    PrimesumGrid primesums;
    Tolerances tolerances;
    Budget budget;
    std::string output_dir = "out";
    std::string cache_dir;
    std::string fixtures = "fixtures/regression.json";
    bool self_test_perturb = false;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Validates and converts. Unknown keys, a missing or wrong "schema", and
/// non-positive tolerances raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// Every modulus the config asks for, family members in enumeration order
/// followed by the explicit list. Budget violations raise ConfigError.
std::vector<FqPoly> config_moduli(const ExperimentConfig& c);
/// Explicit specs first, then the seeded random ones.
std::vector<ShiftSpec> config_shift_specs(const ExperimentConfig& c);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_interval(std::uint64_t bits) noexcept;

}  // namespace ffm
