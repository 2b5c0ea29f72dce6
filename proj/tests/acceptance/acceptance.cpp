// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance            run every criterion
//   acceptance N [M ...]  run the listed criteria
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rpoly/body.hpp"
#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"
#include "rpoly/functionals.hpp"
#include "rpoly/hull.hpp"
#include "rpoly/sampling.hpp"
#include "rpoly/stats.hpp"

using namespace rpoly;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSeed = 2024;
const char* kGrid = "[200, 400, 800, 1600, 3200, 6400, 12800]";

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [miss]");
    }
};

std::string num(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Report run(const std::string& json, int workers = 0) { return run_experiment(parse_config(json), workers); }

std::string ball_config(const std::string& kind, int d, const std::string& grid, std::int64_t trials, const std::string& extra = "") {
    return R"({"experiment": ")" + kind + R"(", "body": {"kind": "ball", "dim": )" + std::to_string(d) + R"(}, "n_grid": )" + grid +
           R"(, "trials": )" + std::to_string(trials) + R"(, "master_seed": )" + std::to_string(kSeed) + extra + "}";
}

void require_no_failures(Verdict& v, const Report& r, const std::string& label) {
    if (r.failed_trials != 0) v.require(false, label + " failed trials " + std::to_string(r.failed_trials));
}

// ------------------------------------------------------------------ 1

Verdict hull_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    RngStream rng(kSeed, 1, lanes::auxiliary);
    const BodyKind kinds[] = {BodyKind::ball, BodyKind::cube, BodyKind::simplex, BodyKind::ellipsoid};
    int facet_mismatch = 0, volume_mismatch = 0, euler_fail = 0;
    double worst_volume = 0.0;
    for (int inst = 0; inst < 500; ++inst) {
        const int d = 2 + inst % 3;
        const BodyKind kind = kinds[(inst / 3) % 4];
        std::vector<double> params;
        if (kind == BodyKind::ellipsoid)
            for (int k = 0; k < d; ++k) params.push_back(1.0 + k);
        const Body body = Body::make(kind, d, params);
        const auto n = static_cast<std::size_t>(d + 1 + static_cast<int>(rng.uniform() * (30 - d)));
        RngStream pts_rng(kSeed, 1000 + static_cast<std::uint64_t>(inst), lanes::points);
        const auto pts = sample_uniform(body, n, pts_rng);
        const Hull hull = Hull::build(pts);
        const Hull brute = brute_force_hull(pts);
        if (hull.facet_sets() != brute.facet_sets()) ++facet_mismatch;
        const double dv = std::fabs(hull.volume() - brute.compute_volume());
        worst_volume = std::max(worst_volume, dv);
        if (dv > 1e-9) ++volume_mismatch;
        std::int64_t euler = 0;
        const auto f = hull.f_vector();
        for (int i = 0; i < d; ++i) euler += (i % 2 == 0 ? 1 : -1) * f[static_cast<std::size_t>(i)];
        if (euler != 1 - (d % 2 == 0 ? 1 : -1)) ++euler_fail;
    }
    const double secs = seconds_since(t0);
    v.require(facet_mismatch == 0, "facet mismatches " + std::to_string(facet_mismatch) + "/500");
    v.require(volume_mismatch == 0, "max volume gap " + num(worst_volume));
    v.require(euler_fail == 0, "Euler failures " + std::to_string(euler_fail));
    v.require(secs < 120.0, "runtime " + num(secs, 3) + " s < 120 s");
    return v;
}

// ------------------------------------------------------------------ 2

Verdict variance_exponents() {
    Verdict v;
    struct Case {
        int d;
        const char* functional;
        double target, tol, limit_s;
    };
    for (const Case& c : {Case{2, "volume", -5.0 / 3.0, 0.10, 1800.0}, Case{2, "f0", 1.0 / 3.0, 0.10, 1800.0},
                          Case{3, "volume", -1.5, 0.12, 3600.0}}) {
        const auto t0 = std::chrono::steady_clock::now();
        const Report r = run(ball_config("variance_scaling", c.d, kGrid, 2000, std::string(R"(, "functional": ")") + c.functional + "\""));
        const double secs = seconds_since(t0);
        require_no_failures(v, r, c.functional);
        const double slope = r.slopes.var_slope.value_or(NAN);
        const std::string label = "d=" + std::to_string(c.d) + " Var(" + c.functional + ") slope " + num(slope) + " vs " + num(c.target);
        v.require(std::fabs(slope - c.target) <= c.tol, label);
        v.require(secs < c.limit_s, "runtime " + num(secs, 3) + " s");
    }
    return v;
}

// ------------------------------------------------------------------ 3

Verdict expectation_exponents() {
    Verdict v;
    for (auto [functional, target] : {std::pair{"volume", -2.0 / 3.0}, std::pair{"f0", 1.0 / 3.0}}) {
        const Report r = run(ball_config("expectation", 2, kGrid, 2000, std::string(R"(, "functional": ")") + functional + "\""));
        require_no_failures(v, r, functional);
        const double slope = r.slopes.mean_slope.value_or(NAN);
        v.require(std::fabs(slope - target) <= 0.05,
                  std::string(std::string(functional) == "volume" ? "E[1-Vol]" : "E[f0]") + " slope " + num(slope) + " vs " + num(target));
    }
    const Report e = run(ball_config("expectation", 2, "[500]", 10000));
    require_no_failures(v, e, "efron");
    const ojson& ef = e.doc["per_n"][0]["efron"];
    v.require(ef["within_3_stderr"].get<bool>(), "Efron |diff| " + num(std::fabs(ef["difference"].get<double>())) + " vs 3 se " +
                                                    num(3.0 * ef["joint_stderr"].get<double>()));
    return v;
}

// ------------------------------------------------------------------ 4

Verdict clt_trend() {
    Verdict v;
    for (const char* functional : {"volume", "f0"}) {
        const auto t0 = std::chrono::steady_clock::now();
        const Report r = run(ball_config("clt", 2, "[100, 1000, 10000]", 5000, std::string(R"(, "functional": ")") + functional + "\""));
        const double secs = seconds_since(t0);
        require_no_failures(v, r, functional);
        std::string seq;
        for (const auto& row : r.rows) seq += (seq.empty() ? "" : " > ") + num(row.ks.value_or(NAN), 3);
        v.require(r.doc["checks"]["ks_strictly_decreasing"].get<bool>(), std::string(functional) + " KS " + seq);
        const double last = r.rows.back().ks.value_or(NAN);
        v.require(last <= 0.05, std::string(functional) + " KS(1e4) " + num(last, 3) + " <= 0.05");
        v.require(secs < 2700.0, "runtime " + num(secs, 3) + " s");
    }
    return v;
}

// ------------------------------------------------------------------ 5

Verdict poisson_uniform() {
    Verdict v;
    const Report r = run(ball_config("poisson_vs_uniform", 2, "[1000, 10000]", 5000));
    require_no_failures(v, r, "poisson");
    const ojson& big = r.doc["per_n"][1];
    for (const char* key : {"variance_ratio", "mean_ratio"}) {
        const ojson& x = big[key];
        const double val = x["value"].get<double>();
        v.require(val >= 0.9 && val <= 1.1, std::string(key) + " " + num(val));
        v.require(x["ci_covers_1"].get<bool>(), "CI [" + num(x["ci_lo"].get<double>()) + ", " + num(x["ci_hi"].get<double>()) + "]");
    }
    const double ks3 = r.doc["per_n"][0]["two_sample_ks"].get<double>();
    const double ks4 = big["two_sample_ks"].get<double>();
    v.require(ks4 < ks3, "two-sample KS " + num(ks3, 3) + " -> " + num(ks4, 3));
    return v;
}

// ------------------------------------------------------------------ 6

Verdict coupling_difference() {
    Verdict v;
    const Report r = run(ball_config("coupling", 2, "[1000, 10000]", 2000));
    require_no_failures(v, r, "coupling");
    std::int64_t negatives = 0;
    std::string ratios;
    for (const auto& e : r.doc["per_n"]) {
        negatives += e["difference"]["negative_count"].get<std::int64_t>();
        ratios += (ratios.empty() ? "" : ", ") + num(e["difference"]["normalized_mean"].get<double>());
    }
    v.require(negatives == 0, "negative differences " + std::to_string(negatives));
    const double spread = r.doc["checks"]["normalized_mean_spread"].get<double>();
    v.require(spread <= 4.0, "mean/(m n^-5/3) = " + ratios + ", spread " + num(spread));
    return v;
}

// ------------------------------------------------------------------ 7

Verdict tail_shape() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const Report r = run(ball_config("tail", 2, "[1000]", 100000));
    const double secs = seconds_since(t0);
    require_no_failures(v, r, "tail");
    const ojson& e = r.doc["per_n"][0];
    v.require(e["fit"]["monotone_decreasing"].get<bool>(), "monotone over " + std::to_string(e["fit"]["points"].get<int>()) + " levels");
    const double c = e["fit"]["c"].get<double>();
    v.require(c > 0.2, "fitted c " + num(c));
    const double cc = e["normal_control"]["c"].get<double>();
    v.require(std::fabs(cc - 0.5) <= 0.05, "normal control c " + num(cc));
    v.require(secs < 1800.0, "runtime " + num(secs, 3) + " s");
    return v;
}

// ------------------------------------------------------------------ 8

Verdict floating_and_wide() {
    Verdict v;
    const Report r = run(ball_config("floating_and_wide", 2, "[10000]", 200, R"(, "constants": {"nu": 5})"));
    require_no_failures(v, r, "floating");
    const ojson& e = r.doc["per_n"][0];
    const double contained = e["floating_body"]["contained_fraction"].get<double>();
    v.require(contained >= 0.99, "F contained in " + num(100.0 * contained) + "% of trials");
    const auto above = e["wideness"]["trials_above_threshold"].get<std::int64_t>();
    v.require(above == 0, "max wideness " + std::to_string(e["wideness"]["max_observed"].get<std::int64_t>()) + " vs 10 log n = " +
                              num(e["wideness"]["threshold"].get<double>()));
    v.require(e["wideness"]["non_increasing_in_k"].get<bool>(), "Vol(U_k) non-increasing");
    return v;
}

// ------------------------------------------------------------------ 9

Verdict functional_oracles() {
    Verdict v;
    const Body disk = Body::ball(2);
    const double r = disk.scale();
    RngStream rng(kSeed, 9, lanes::auxiliary);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Point x = sample_uniform(disk, rng);
        const double rho = std::min(norm(x), r);
        const double segment = r * r * std::acos(rho / r) - rho * std::sqrt(r * r - rho * rho);
        worst = std::max(worst, std::fabs(minimal_cap_volume(disk, x) - segment));
    }
    v.require(worst <= 1e-6, "disk mincap max error " + num(worst));

    double worst_trip = 0.0;
    for (int d = 2; d <= 6; ++d)
        for (BodyKind kind : {BodyKind::ball, BodyKind::cube, BodyKind::simplex, BodyKind::ellipsoid}) {
            std::vector<double> params;
            if (kind == BodyKind::ellipsoid)
                for (int k = 0; k < d; ++k) params.push_back(1.0 + 0.5 * k);
            const Body body = Body::make(kind, d, params);
            for (int k = 0; k < 100; ++k) {
                const Point u = sample_direction(d, rng);
                for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5}) {
                    const Cap cap = body.cap_for_volume(u, eps);
                    worst_trip = std::max(worst_trip, std::fabs(body.cap_volume(u, cap.offset) - eps));
                }
            }
        }
    v.require(worst_trip <= 2e-9, "cap round trip max error " + num(worst_trip));

    std::int64_t checked = 0, violations = 0;
    for (int m = 1; m <= 25; ++m)
        for (int pi = 1; pi <= 99; ++pi) {
            const double p = pi / 100.0;
            for (int k = 0; k <= m; ++k) {
                const double mean = m * p;
                if (k < mean) continue;
                double tail = 0.0;
                for (int j = k; j <= m; ++j)
                    tail += std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) + j * std::log(p) +
                                     (m - j) * std::log1p(-p));
                ++checked;
                if (tail > chernoff_bound(mean, k - mean) * (1.0 + 1e-12)) ++violations;
            }
        }
    v.require(violations == 0, "Chernoff dominance " + std::to_string(checked - violations) + "/" + std::to_string(checked));
    return v;
}

// ------------------------------------------------------------------ 10

Verdict determinism() {
    Verdict v;
    std::vector<std::pair<std::string, std::string>> configs = {
        {"coupling", ball_config("coupling", 2, "[1000, 10000]", 2000)},
        {"poisson_vs_uniform", ball_config("poisson_vs_uniform", 2, "[1000, 10000]", 5000)},
    };
    const std::string small = R"(, "options": {"wide_probes": 5000, "boundary_probes": 200, "bootstrap_resamples": 200, "g_probes": 4, "g_samples": 2000})";
    for (const auto& info : experiment_catalog())
        configs.push_back({std::string(info.name) + " (small)", ball_config(std::string(info.name), 2, "[100, 200, 400]", 60, small)});
    configs.push_back({"variance_scaling d=3 cube", R"({"experiment": "variance_scaling", "body": {"kind": "cube", "dim": 3}, "n_grid": [50, 100, 200], "trials": 60, "master_seed": 5})"});
    int identical = 0;
    std::string differing;
    for (const auto& [label, json] : configs) {
        const std::string a = to_json_text(run(json, 1).doc);
        const std::string b = to_json_text(run(json, 4).doc);
        if (a == b)
            ++identical;
        else
            differing += " " + label;
    }
    v.require(identical == static_cast<int>(configs.size()),
              "report.json identical for 1 and 4 workers in " + std::to_string(identical) + "/" + std::to_string(configs.size()) + " runs" + differing);
    return v;
}

struct Criterion {
    int id;
    const char* title;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "hull oracle equivalence", hull_oracle},
        {2, "variance exponents", variance_exponents},
        {3, "expectation exponents and Efron identity", expectation_exponents},
        {4, "CLT trend", clt_trend},
        {5, "Poisson/uniform agreement", poisson_uniform},
        {6, "coupling difference", coupling_difference},
        {7, "tail shape", tail_shape},
        {8, "floating body and wideness", floating_and_wide},
        {9, "functional oracles", functional_oracles},
        {10, "determinism across worker counts", determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    bool ok = true;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d %s  %s: %s (%.1f s)\n", c.id, v.pass ? "PASS" : "FAIL", c.title, v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        ok = ok && v.pass;
    }
    return ok ? 0 : 1;
}
