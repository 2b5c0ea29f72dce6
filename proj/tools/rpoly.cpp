#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rpoly/rpoly.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int load(const std::string& path, rpoly_config** config) {
    const rpoly_status st = rpoly_config_load(path.c_str(), config);
    if (st == RPOLY_OK) return kExitOk;
    std::fprintf(stderr, "rpoly: config error: %s\n", rpoly_last_error());
    return kExitConfig;
}

int cmd_run(const std::string& path, std::string out_dir, int workers, bool raw) {
    rpoly_config* config = nullptr;
    if (int rc = load(path, &config); rc != kExitOk) return rc;
    if (out_dir.empty()) out_dir = rpoly_config_output(config);
    if (out_dir.empty()) out_dir = ".";

    const auto start = std::chrono::steady_clock::now();
    rpoly_report* report = nullptr;
    rpoly_status st = rpoly_run(config, workers, &report);
    rpoly_config_free(config);
    if (st != RPOLY_OK) {
        std::fprintf(stderr, "rpoly: run failed: %s\n", rpoly_last_error());
        return st == RPOLY_ERR_CONFIG ? kExitConfig : kExitRuntime;
    }
    st = rpoly_report_write(report, out_dir.c_str(), raw ? 1 : 0);
    const auto failed = rpoly_report_failed_trials(report);
    rpoly_report_free(report);
    if (st != RPOLY_OK) {
        std::fprintf(stderr, "rpoly: cannot write outputs: %s\n", rpoly_last_error());
        return kExitRuntime;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("wrote %s/report.json and summary.csv%s in %.1f s\n", out_dir.c_str(), raw ? " and raw.csv" : "", secs);
    if (failed != 0) {
        std::fprintf(stderr, "rpoly: %lld trials failed\n", static_cast<long long>(failed));
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_list() {
    for (size_t i = 0; i < rpoly_experiment_count(); ++i)
        std::printf("%-20s %s\n", rpoly_experiment_name(i), rpoly_experiment_description(i));
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    rpoly_config* config = nullptr;
    if (int rc = load(path, &config); rc != kExitOk) return rc;
    rpoly_config_free(config);
    std::printf("%s: ok\n", path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments on random polytopes"};
    app.set_version_flag("--version", rpoly_version());
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 0;
    bool raw = false;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "output directory (default: the config's output field, else .)");
    run->add_option("--workers", workers, "worker threads (default: config, else hardware)")->check(CLI::NonNegativeNumber);
    run->add_flag("--raw", raw, "also write per-trial values to raw.csv");

    app.add_subcommand("list-experiments", "list the available experiments");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config file without running it");
    validate->add_option("config", validate_path, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    if (run->parsed()) return cmd_run(config_path, out_dir, workers, raw);
    if (validate->parsed()) return cmd_validate(validate_path);
    return cmd_list();
}
