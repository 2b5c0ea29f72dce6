#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rpoly/body.hpp"

namespace rpoly {

inline constexpr std::string_view kVersion = "rpoly 0.1.0";

enum class ExperimentKind { clt, variance_scaling, expectation, coupling, poisson_vs_uniform, tail, floating_and_wide };
enum class Model { uniform, poisson, coupled };

struct ExperimentInfo {
    ExperimentKind kind;
    std::string_view name;
    std::string_view description;
};

const std::vector<ExperimentInfo>& experiment_catalog();
std::string_view to_string(ExperimentKind kind) noexcept;
std::string_view to_string(Model model) noexcept;

// Volume of the hull, or the number of i-faces.
struct Functional {
    int face_dim = -1;  // -1 selects the volume

    [[nodiscard]] bool is_volume() const noexcept { return face_dim < 0; }
    [[nodiscard]] std::string name() const;
    static Functional parse(std::string_view text);
};

struct Constants {
    double nu = 5.0;  // eps* = nu log n / n
    double A = 4.0;   // coupled n' = ceil(n + A sqrt(n log n))
    double c0 = 5.0;
    std::optional<double> c2;  // automatic when absent
    std::vector<double> lambda_grid;  // tail levels; 0, 0.25, ..., 9 when empty
};

// Knobs for estimators inside the runners.
struct Options {
    std::int64_t boundary_probes = 1000;   // floating body boundary points
    std::int64_t wide_probes = 100000;     // uniform probes per trial for wideness
    double c5 = 10.0;                      // wideness threshold c5 log n
    int bootstrap_resamples = 1000;
    double bootstrap_level = 0.95;
    std::string tail_scale = "measured";   // measured | theoretical
    int g_probes = 32;                     // boundary probes for g(eps*)
    std::int64_t g_samples = 20000;        // visibility samples per probe
    // Placeholder constants of the perfect-set conditions.
    double perfect_c3 = 1.0;
    double perfect_c4 = 1.0;
    double perfect_c6 = 1.0;
    double perfect_c7 = 10.0;
    double perfect_decay = 1.0;
    bool cover_audit = false;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::clt;
    BodyKind body_kind = BodyKind::ball;
    int dim = 2;
    std::vector<double> body_params;
    std::vector<std::int64_t> n_grid;
    std::int64_t trials = 0;
    std::uint64_t master_seed = 0;
    Functional functional;
    Model model = Model::uniform;
    Constants constants;
    Options options;
    int workers = 0;  // 0: hardware concurrency
    std::string output;

    [[nodiscard]] Body body() const { return Body::make(body_kind, dim, body_params); }
};

// Strict parsing: unknown fields, wrong types and violated invariants raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical echo of the fields that determine the results (no worker count or output path).
nlohmann::ordered_json config_echo(const ExperimentConfig& config);

std::int64_t coupled_n_prime(std::int64_t n, double A);

struct SummaryRow {
    std::int64_t n = 0;
    double mean = 0.0, var = 0.0, var_stderr = 0.0;
    double m3 = 0.0, m4 = 0.0, m5 = 0.0, m6 = 0.0;
    std::optional<double> ks;
};

struct SlopeFields {
    std::optional<double> mean_slope, mean_slope_stderr;
    std::optional<double> var_slope, var_slope_stderr;
    std::optional<double> ks_slope, ks_slope_stderr;
};

struct RawValue {
    std::int64_t n = 0;
    std::int64_t trial = 0;
    double value = 0.0;
};

struct Report {
    nlohmann::ordered_json doc;
    std::vector<SummaryRow> rows;
    SlopeFields slopes;
    std::vector<RawValue> raw;
    std::int64_t failed_trials = 0;
};

Report run_experiment(const ExperimentConfig& config, int workers = 0);

// Serialisation with 17 significant digits; non-finite numbers become null.
std::string to_json_text(const nlohmann::ordered_json& doc);
std::string summary_csv(const Report& report);
std::string raw_csv(const Report& report);
// Writes report.json, summary.csv and, when raw is set, raw.csv.
void write_report(const Report& report, const std::string& directory, bool raw);

}  // namespace rpoly
