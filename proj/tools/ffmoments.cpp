#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ffm/config.hpp"
#include "ffm/errors.hpp"
#include "ffm/report.hpp"
#include "ffm/suites.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

int run(const std::string& suite, const std::string& config_path, const std::string& out_dir, ffm::RunOptions opts) {
    const ffm::ExperimentConfig config = config_path.empty() ? ffm::ExperimentConfig{} : ffm::load_config(config_path);
    const auto result = ffm::run_suite(suite, config, opts);
    const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
    ffm::write_outputs(result, dir);

    for (const auto& row : result.checks) {
        if (row.pass) continue;
        std::cout << "FAIL [" << row.anchor << "] " << row.check << " | " << row.subject << " | measured "
                  << ffm::fmt(row.measured) << " reference " << ffm::fmt(row.reference);
        if (!row.detail.empty()) std::cout << " | " << row.detail;
        std::cout << '\n';
    }
    std::cout << suite << ": " << result.checks.size() - result.failures() << "/" << result.checks.size()
              << " checks passed, output in " << dir << '\n';
    return result.all_pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moments of Dirichlet L-functions over F_q[T]: verification sweeps"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    ffm::RunOptions opts;
    std::uint64_t budget = 0;

    for (const char* name : {"enumerate", "lfun", "moments", "primesums", "all"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " suite");
        sub->add_option("--config", config_path, "experiment config (JSON)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--cache", opts.cache_dir, "cache directory (overrides the config)");
        sub->add_flag("--record", opts.record, "record measured constants into the fixture file");
        sub->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--budget", budget, "cap on phi(Q) (overrides the config)")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (budget > 0) opts.budget = budget;
    const std::string suite = app.get_subcommands().front()->get_name();

    try {
        return run(suite, config_path, out_dir, opts);
    } catch (const ffm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ffm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
