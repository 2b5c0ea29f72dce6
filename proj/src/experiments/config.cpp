#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"
#include "rpoly/functionals.hpp"

namespace rpoly {

using nlohmann::json;

namespace {

const std::vector<ExperimentInfo> kCatalog = {
    {ExperimentKind::clt, "clt", "KS distance of the standardised functional to the normal law, per n"},
    {ExperimentKind::variance_scaling, "variance_scaling", "variance per n with jackknife errors and the log-log slope"},
    {ExperimentKind::expectation, "expectation", "mean deficit or face count per n, slope, and the Efron identity check"},
    {ExperimentKind::coupling, "coupling", "coupled differences Y(P') - Y(P), typicality rates and insertion face changes"},
    {ExperimentKind::poisson_vs_uniform, "poisson_vs_uniform", "paired Poisson and uniform models: ratios and two-sample KS"},
    {ExperimentKind::tail, "tail", "tail profile of the functional and its exponential rate"},
    {ExperimentKind::floating_and_wide, "floating_and_wide", "floating body containment, wideness scan and perfect-set rates"},
};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || item.key() == a;
        if (!ok) fail("unknown field '" + item.key() + "' in " + where);
    }
}

std::int64_t get_int(const json& v, const std::string& name, std::int64_t lo, std::int64_t hi) {
    if (!v.is_number_integer()) fail(name + " must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) fail(name + " is out of range");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) fail(name + " is out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

double get_real(const json& v, const std::string& name) {
    if (!v.is_number()) fail(name + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(name + " must be finite");
    return x;
}

double get_positive(const json& v, const std::string& name) {
    const double x = get_real(v, name);
    if (!(x > 0.0)) fail(name + " must be positive");
    return x;
}

std::string get_string(const json& v, const std::string& name) {
    if (!v.is_string()) fail(name + " must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& name) {
    if (!v.is_boolean()) fail(name + " must be a boolean");
    return v.get<bool>();
}

std::vector<Model> allowed_models(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::coupling:
            return {Model::coupled};
        case ExperimentKind::poisson_vs_uniform:
            return {Model::poisson};
        default:
            return {Model::uniform, Model::poisson};
    }
}

Model parse_model(const std::string& s) {
    if (s == "uniform") return Model::uniform;
    if (s == "poisson") return Model::poisson;
    if (s == "coupled") return Model::coupled;
    fail("unknown model '" + s + "'");
}

void parse_constants(const json& obj, Constants& c) {
    check_keys(obj, "constants", {"nu", "A", "c0", "c2", "lambda_grid"});
    if (obj.contains("nu")) c.nu = get_positive(obj["nu"], "constants.nu");
    if (obj.contains("A")) {
        c.A = get_real(obj["A"], "constants.A");
        if (c.A < 0.0) fail("constants.A must be non-negative");
    }
    if (obj.contains("c0")) c.c0 = get_positive(obj["c0"], "constants.c0");
    if (obj.contains("c2") && !obj["c2"].is_null()) c.c2 = get_positive(obj["c2"], "constants.c2");
    if (obj.contains("lambda_grid")) {
        const json& g = obj["lambda_grid"];
        if (!g.is_array() || g.size() < 3) fail("constants.lambda_grid must be an array of at least three levels");
        for (const auto& x : g) {
            const double lam = get_real(x, "constants.lambda_grid entry");
            if (lam < 0.0) fail("constants.lambda_grid entries must be non-negative");
            if (!c.lambda_grid.empty() && !(lam > c.lambda_grid.back())) fail("constants.lambda_grid must be strictly increasing");
            c.lambda_grid.push_back(lam);
        }
    }
}

void parse_options(const json& obj, Options& o) {
    check_keys(obj, "options",
               {"boundary_probes", "wide_probes", "c5", "bootstrap_resamples", "bootstrap_level", "tail_scale", "g_probes",
                "g_samples", "perfect_c3", "perfect_c4", "perfect_c6", "perfect_c7", "perfect_decay", "cover_audit"});
    constexpr std::int64_t kBig = 100000000;
    if (obj.contains("boundary_probes")) o.boundary_probes = get_int(obj["boundary_probes"], "options.boundary_probes", 1, kBig);
    if (obj.contains("wide_probes")) o.wide_probes = get_int(obj["wide_probes"], "options.wide_probes", 1, kBig);
    if (obj.contains("c5")) o.c5 = get_positive(obj["c5"], "options.c5");
    if (obj.contains("bootstrap_resamples"))
        o.bootstrap_resamples = static_cast<int>(get_int(obj["bootstrap_resamples"], "options.bootstrap_resamples", 10, 1000000));
    if (obj.contains("bootstrap_level")) {
        o.bootstrap_level = get_real(obj["bootstrap_level"], "options.bootstrap_level");
        if (!(o.bootstrap_level > 0.0 && o.bootstrap_level < 1.0)) fail("options.bootstrap_level must lie in (0, 1)");
    }
    if (obj.contains("tail_scale")) {
        o.tail_scale = get_string(obj["tail_scale"], "options.tail_scale");
        if (o.tail_scale != "measured" && o.tail_scale != "theoretical")
            fail("options.tail_scale must be 'measured' or 'theoretical'");
    }
    if (obj.contains("g_probes")) o.g_probes = static_cast<int>(get_int(obj["g_probes"], "options.g_probes", 1, 100000));
    if (obj.contains("g_samples")) o.g_samples = get_int(obj["g_samples"], "options.g_samples", 1, kBig);
    if (obj.contains("perfect_c3")) o.perfect_c3 = get_positive(obj["perfect_c3"], "options.perfect_c3");
    if (obj.contains("perfect_c4")) o.perfect_c4 = get_positive(obj["perfect_c4"], "options.perfect_c4");
    if (obj.contains("perfect_c6")) o.perfect_c6 = get_positive(obj["perfect_c6"], "options.perfect_c6");
    if (obj.contains("perfect_c7")) o.perfect_c7 = get_positive(obj["perfect_c7"], "options.perfect_c7");
    if (obj.contains("perfect_decay")) o.perfect_decay = get_positive(obj["perfect_decay"], "options.perfect_decay");
    if (obj.contains("cover_audit")) o.cover_audit = get_bool(obj["cover_audit"], "options.cover_audit");
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() { return kCatalog; }

std::string_view to_string(ExperimentKind kind) noexcept {
    for (const auto& e : kCatalog)
        if (e.kind == kind) return e.name;
    return "unknown";
}

std::string_view to_string(Model model) noexcept {
    switch (model) {
        case Model::uniform:
            return "uniform";
        case Model::poisson:
            return "poisson";
        case Model::coupled:
            return "coupled";
    }
    return "unknown";
}

std::string Functional::name() const { return is_volume() ? "volume" : "f" + std::to_string(face_dim); }

Functional Functional::parse(std::string_view text) {
    if (text == "volume") return {};
    std::string_view digits;
    if (text.size() >= 2 && text[0] == 'f') digits = text.substr(text[1] == '_' ? 2 : 1);
    if (digits.size() != 1 || digits[0] < '0' || digits[0] > '5')
        fail("functional must be 'volume' or f_i with 0 <= i <= 5, got '" + std::string(text) + "'");
    return Functional{digits[0] - '0'};
}

std::int64_t coupled_n_prime(std::int64_t n, double A) {
    const double nd = static_cast<double>(n);
    return static_cast<std::int64_t>(std::ceil(nd + A * std::sqrt(nd * std::log(nd)) - 1e-9));
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"experiment", "body", "d", "n_grid", "trials", "master_seed", "functional", "model", "constants", "options",
                "workers", "output"});
    for (auto key : {"experiment", "body", "n_grid", "trials", "master_seed"})
        if (!root.contains(key)) fail(std::string("missing required field '") + key + "'");

    ExperimentConfig cfg;
    const std::string kind = get_string(root["experiment"], "experiment");
    bool found = false;
    for (const auto& e : kCatalog)
        if (e.name == kind) {
            cfg.kind = e.kind;
            found = true;
        }
    if (!found) fail("unknown experiment '" + kind + "'");

    const json& body = root["body"];
    check_keys(body, "body", {"kind", "dim", "params"});
    if (!body.contains("kind")) fail("body.kind is required");
    try {
        cfg.body_kind = parse_body_kind(get_string(body["kind"], "body.kind"));
    } catch (const InvalidInput& e) {
        fail(e.what());
    }
    if (body.contains("dim")) cfg.dim = static_cast<int>(get_int(body["dim"], "body.dim", 2, 6));
    if (root.contains("d")) {
        const int d = static_cast<int>(get_int(root["d"], "d", 2, 6));
        if (body.contains("dim") && d != cfg.dim) fail("d disagrees with body.dim");
        cfg.dim = d;
    } else if (!body.contains("dim")) {
        fail("the dimension must be given as d or body.dim");
    }
    if (body.contains("params")) {
        if (!body["params"].is_array()) fail("body.params must be an array");
        for (const auto& x : body["params"]) cfg.body_params.push_back(get_real(x, "body.params entry"));
    }
    try {
        (void)cfg.body();
    } catch (const Error& e) {
        fail(std::string("invalid body: ") + e.what());
    }

    const json& grid = root["n_grid"];
    if (!grid.is_array() || grid.empty()) fail("n_grid must be a non-empty array");
    const std::int64_t min_n = cfg.dim + (cfg.kind == ExperimentKind::expectation ? 2 : 1);
    for (const auto& x : grid) {
        const auto n = get_int(x, "n_grid entry", min_n, 100000000);
        if (!cfg.n_grid.empty() && n <= cfg.n_grid.back()) fail("n_grid must be strictly increasing");
        cfg.n_grid.push_back(n);
    }
    cfg.trials = get_int(root["trials"], "trials", 1, std::numeric_limits<std::uint32_t>::max() - 1);
    if (cfg.kind == ExperimentKind::clt && cfg.trials < 2) fail("clt needs at least two trials for the KS distance");
    const json& seed = root["master_seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        fail("master_seed must be a non-negative integer");
    cfg.master_seed = seed.get<std::uint64_t>();

    if (root.contains("functional")) cfg.functional = Functional::parse(get_string(root["functional"], "functional"));
    if (cfg.functional.face_dim >= cfg.dim) fail("functional f_i needs i < d");

    const auto models = allowed_models(cfg.kind);
    cfg.model = models.front();
    if (root.contains("model")) {
        cfg.model = parse_model(get_string(root["model"], "model"));
        if (std::find(models.begin(), models.end(), cfg.model) == models.end())
            fail("model '" + std::string(to_string(cfg.model)) + "' is not available for " + kind);
    }
    if (root.contains("constants")) parse_constants(root["constants"], cfg.constants);
    if (root.contains("options")) parse_options(root["options"], cfg.options);
    if (root.contains("workers")) cfg.workers = static_cast<int>(get_int(root["workers"], "workers", 0, 1024));
    if (root.contains("output")) cfg.output = get_string(root["output"], "output");

    if (cfg.kind == ExperimentKind::floating_and_wide || cfg.kind == ExperimentKind::coupling)
        for (auto n : cfg.n_grid)
            if (!(epsilon_star(static_cast<double>(n), cfg.constants.nu) < 0.5))
                fail("nu log n / n must be below 1/2 for every n in the grid");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::ordered_json config_echo(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["experiment"] = to_string(cfg.kind);
    j["body"] = {{"kind", to_string(cfg.body_kind)}, {"dim", cfg.dim}, {"params", cfg.body_params}};
    j["d"] = cfg.dim;
    j["n_grid"] = cfg.n_grid;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["functional"] = cfg.functional.name();
    j["model"] = to_string(cfg.model);
    nlohmann::ordered_json c;
    c["nu"] = cfg.constants.nu;
    c["A"] = cfg.constants.A;
    c["c0"] = cfg.constants.c0;
    c["c2"] = cfg.constants.c2 ? nlohmann::ordered_json(*cfg.constants.c2) : nlohmann::ordered_json(nullptr);
    c["lambda_grid"] = cfg.constants.lambda_grid;
    j["constants"] = c;
    const Options& o = cfg.options;
    j["options"] = {{"boundary_probes", o.boundary_probes},
                    {"wide_probes", o.wide_probes},
                    {"c5", o.c5},
                    {"bootstrap_resamples", o.bootstrap_resamples},
                    {"bootstrap_level", o.bootstrap_level},
                    {"tail_scale", o.tail_scale},
                    {"g_probes", o.g_probes},
                    {"g_samples", o.g_samples},
                    {"perfect_c3", o.perfect_c3},
                    {"perfect_c4", o.perfect_c4},
                    {"perfect_c6", o.perfect_c6},
                    {"perfect_c7", o.perfect_c7},
                    {"perfect_decay", o.perfect_decay},
                    {"cover_audit", o.cover_audit}};
    return j;
}

}  // namespace rpoly
