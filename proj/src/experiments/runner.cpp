#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <thread>

#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"
#include "rpoly/functionals.hpp"
#include "rpoly/hull.hpp"
#include "rpoly/sampling.hpp"
#include "rpoly/stats.hpp"

namespace rpoly {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::int64_t kBlock = 16;
constexpr std::size_t kMaxListedFailures = 10;

// Trial t at grid index i draws from stream (i << 32) | t; per-n auxiliary
// work (probes, bootstrap, controls) uses the reserved trial slot 2^32 - 1.
std::uint64_t trial_stream(std::size_t n_index, std::int64_t trial) {
    return (static_cast<std::uint64_t>(n_index) << 32) | static_cast<std::uint64_t>(trial);
}
std::uint64_t aux_stream(std::size_t n_index) { return (static_cast<std::uint64_t>(n_index) << 32) | 0xFFFFFFFFull; }

template <class R>
struct Batch {
    std::vector<std::optional<R>> results;
    std::int64_t failed = 0;
    ojson failures = ojson::array();
};

// Trials are claimed in fixed blocks by the workers; results land in their
// trial slot, so everything downstream sees the same order for any pool size.
template <class R, class F>
Batch<R> run_trials(std::int64_t trials, int workers, F&& fn) {
    Batch<R> batch;
    batch.results.resize(static_cast<std::size_t>(trials));
    std::vector<std::string> errors(static_cast<std::size_t>(trials));
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::int64_t begin = next.fetch_add(kBlock);
            if (begin >= trials) return;
            const std::int64_t end = std::min(begin + kBlock, trials);
            for (std::int64_t t = begin; t < end; ++t) {
                try {
                    batch.results[static_cast<std::size_t>(t)] = fn(t);
                } catch (const std::exception& e) {
                    errors[static_cast<std::size_t>(t)] = e.what();
                }
            }
        }
    };
    const auto blocks = (trials + kBlock - 1) / kBlock;
    const int count = static_cast<int>(std::min<std::int64_t>(workers, blocks));
    if (count <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < count; ++w) pool.emplace_back(work);
    }
    for (std::int64_t t = 0; t < trials; ++t) {
        if (batch.results[static_cast<std::size_t>(t)]) continue;
        ++batch.failed;
        if (batch.failures.size() < kMaxListedFailures)
            batch.failures.push_back({{"trial", t}, {"error", errors[static_cast<std::size_t>(t)]}});
    }
    return batch;
}

double functional_value(const Hull& hull, const Functional& f) {
    if (f.is_volume()) return hull.volume();
    if (f.face_dim == 0) return static_cast<double>(hull.vertex_count());
    return static_cast<double>(hull.face_count(f.face_dim));
}

std::vector<Point> model_points(const Body& body, std::int64_t n, Model model, std::uint64_t seed, std::uint64_t stream) {
    RngStream points(seed, stream, lanes::points);
    std::int64_t count = n;
    if (model == Model::poisson) {
        RngStream counts(seed, stream, lanes::poisson_count);
        count = sample_poisson_count(static_cast<double>(n), counts);
    }
    return sample_uniform(body, static_cast<std::size_t>(count), points);
}

ojson number_or_null(std::optional<double> x) { return x ? ojson(*x) : ojson(nullptr); }

std::optional<double> try_ks(std::span<const double> values) {
    try {
        return ks_distance_to_normal(values);
    } catch (const DataError&) {
        return std::nullopt;
    }
}

ojson summary_json(const Summary& s, std::optional<double> ks) {
    ojson j;
    j["count"] = s.count;
    j["mean"] = s.mean;
    j["mean_stderr"] = s.count > 1 ? std::sqrt(s.variance / static_cast<double>(s.count - 1)) : 0.0;
    j["variance"] = s.variance;
    j["var_stderr"] = s.var_stderr;
    j["M2"] = s.absolute[2];
    j["M3"] = s.absolute[3];
    j["M4"] = s.absolute[4];
    j["M5"] = s.absolute[5];
    j["M6"] = s.absolute[6];
    j["M3_signed"] = s.central[3];
    j["M5_signed"] = s.central[5];
    j["ks"] = number_or_null(ks);
    return j;
}

ojson fit_json(const std::optional<PowerLawFit>& f) {
    if (!f) return nullptr;
    return {{"slope", f->slope},
            {"slope_stderr", f->slope_stderr},
            {"intercept", f->intercept},
            {"r2", f->r2},
            {"points", f->points}};
}

std::optional<PowerLawFit> try_fit(const std::vector<double>& n, const std::vector<double>& v) {
    if (n.size() < 3) return std::nullopt;
    try {
        return fit_power_law(n, v);
    } catch (const DataError&) {
        return std::nullopt;
    }
}

bool strictly_decreasing(const std::vector<std::optional<double>>& v) {
    for (const auto& x : v)
        if (!x) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(*v[i] < *v[i - 1])) return false;
    return true;
}

// Per-n collection of the primary sample shared by every runner.
class Collector {
public:
    Collector(const ExperimentConfig& cfg, bool deficit) : cfg_(cfg), deficit_(deficit) {}

    // Records the primary values of grid point i and returns its summary block.
    ojson add(std::size_t i, const std::vector<std::optional<double>>& values) {
        std::vector<double> v;
        for (std::size_t t = 0; t < values.size(); ++t) {
            if (!values[t]) continue;
            v.push_back(*values[t]);
            raw_.push_back({cfg_.n_grid[i], static_cast<std::int64_t>(t), *values[t]});
        }
        const Summary s = summarize(v);
        const auto ks = try_ks(v);
        SummaryRow row;
        row.n = cfg_.n_grid[i];
        row.mean = s.mean;
        row.var = s.variance;
        row.var_stderr = s.var_stderr;
        row.m3 = s.absolute[3];
        row.m4 = s.absolute[4];
        row.m5 = s.absolute[5];
        row.m6 = s.absolute[6];
        row.ks = ks;
        rows_.push_back(row);
        return summary_json(s, ks);
    }

    // Fits across the grid; the mean fit uses 1 - mean when deficit is set.
    ojson finish(Report& report) {
        std::vector<double> n, mean, var, ks;
        bool ks_ok = true;
        for (const auto& r : rows_) {
            n.push_back(static_cast<double>(r.n));
            mean.push_back(deficit_ ? 1.0 - r.mean : r.mean);
            var.push_back(r.var);
            ks_ok = ks_ok && r.ks.has_value();
            ks.push_back(r.ks.value_or(0.0));
        }
        const auto fm = try_fit(n, mean);
        const auto fv = try_fit(n, var);
        const auto fk = ks_ok ? try_fit(n, ks) : std::nullopt;
        auto set = [](const std::optional<PowerLawFit>& f, std::optional<double>& slope, std::optional<double>& se) {
            if (f) {
                slope = f->slope;
                se = f->slope_stderr;
            }
        };
        set(fm, report.slopes.mean_slope, report.slopes.mean_slope_stderr);
        set(fv, report.slopes.var_slope, report.slopes.var_slope_stderr);
        set(fk, report.slopes.ks_slope, report.slopes.ks_slope_stderr);
        report.rows = rows_;
        report.raw = std::move(raw_);
        ojson fits;
        fits["mean_target"] = deficit_ ? "1 - mean" : "mean";
        fits["mean"] = fit_json(fm);
        fits["variance"] = fit_json(fv);
        fits["ks"] = fit_json(fk);
        return fits;
    }

private:
    const ExperimentConfig& cfg_;
    bool deficit_;
    std::vector<SummaryRow> rows_;
    std::vector<RawValue> raw_;
};

struct Context {
    const ExperimentConfig& cfg;
    Body body;
    int workers;
    Report& report;
    ojson per_n = ojson::array();
    ojson checks = ojson::object();
    ojson references = ojson::object();

    void note_failures(std::int64_t n, const auto& batch) {
        report.failed_trials += batch.failed;
        for (const auto& f : batch.failures) {
            if (failures.size() >= kMaxListedFailures) break;
            ojson e = f;
            e["n"] = n;
            failures.push_back(e);
        }
    }
    ojson failures = ojson::array();
};

double d_of(const ExperimentConfig& cfg) { return static_cast<double>(cfg.dim); }

// Exponents the theory predicts for the functional, for reference in reports.
void add_reference_exponents(Context& ctx) {
    const double d = d_of(ctx.cfg);
    if (ctx.cfg.functional.is_volume()) {
        ctx.references["variance_exponent"] = -(d + 3.0) / (d + 1.0);
        ctx.references["deficit_exponent"] = -2.0 / (d + 1.0);
    } else {
        ctx.references["variance_exponent"] = (d - 1.0) / (d + 1.0);
        ctx.references["mean_exponent"] = (d - 1.0) / (d + 1.0);
    }
}

std::vector<std::optional<double>> primary_values(const ExperimentConfig& cfg, std::size_t i, std::int64_t n, Context& ctx) {
    auto batch = run_trials<double>(cfg.trials, ctx.workers, [&](std::int64_t t) {
        const auto pts = model_points(ctx.body, n, cfg.model, cfg.master_seed, trial_stream(i, t));
        return functional_value(Hull::build(pts), cfg.functional);
    });
    ctx.note_failures(n, batch);
    return std::move(batch.results);
}

// ---------------------------------------------------------------- clt

void run_clt(Context& ctx, Collector& col) {
    std::vector<std::optional<double>> ks;
    for (std::size_t i = 0; i < ctx.cfg.n_grid.size(); ++i) {
        const auto n = ctx.cfg.n_grid[i];
        const auto values = primary_values(ctx.cfg, i, n, ctx);
        ojson entry{{"n", n}};
        entry["summary"] = col.add(i, values);
        const auto& k = entry["summary"]["ks"];
        ks.push_back(k.is_null() ? std::nullopt : std::optional<double>(k.get<double>()));
        entry["ks_critical_99"] = ks_critical_99(entry["summary"]["count"].get<std::int64_t>());
        ctx.per_n.push_back(entry);
    }
    ctx.checks["ks_strictly_decreasing"] = strictly_decreasing(ks);
    ctx.checks["ks_at_largest_n"] = number_or_null(ks.back());
}

// ---------------------------------------------------------------- variance scaling

void run_variance_scaling(Context& ctx, Collector& col) {
    for (std::size_t i = 0; i < ctx.cfg.n_grid.size(); ++i) {
        const auto n = ctx.cfg.n_grid[i];
        ojson entry{{"n", n}};
        entry["summary"] = col.add(i, primary_values(ctx.cfg, i, n, ctx));
        ctx.per_n.push_back(entry);
    }
}

// ---------------------------------------------------------------- expectation

struct ExpectationTrial {
    double value = 0.0;
    double vertices = 0.0;      // f_0(K_n)
    double scaled_missed = 0.0; // n (1 - Vol(K_{n-1}))
};

void run_expectation(Context& ctx, Collector& col) {
    const auto& cfg = ctx.cfg;
    const bool efron = cfg.model == Model::uniform;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        auto batch = run_trials<ExpectationTrial>(cfg.trials, ctx.workers, [&](std::int64_t t) {
            const auto pts = model_points(ctx.body, n, cfg.model, cfg.master_seed, trial_stream(i, t));
            ExpectationTrial r;
            if (!efron) {
                r.value = functional_value(Hull::build(pts), cfg.functional);
                return r;
            }
            // K_{n-1} from the first n - 1 points, then the n-th point completes K_n.
            Hull hull = Hull::build(std::span<const Point>(pts).first(pts.size() - 1));
            r.scaled_missed = static_cast<double>(n) * (1.0 - hull.volume());
            hull.insert(pts.back(), false);
            r.vertices = static_cast<double>(hull.vertex_count());
            r.value = functional_value(hull, cfg.functional);
            return r;
        });
        ctx.note_failures(n, batch);
        std::vector<std::optional<double>> values;
        std::vector<double> diff, lhs, rhs;
        for (const auto& r : batch.results) {
            values.push_back(r ? std::optional<double>(r->value) : std::nullopt);
            if (!r) continue;
            lhs.push_back(r->vertices);
            rhs.push_back(r->scaled_missed);
            diff.push_back(r->vertices - r->scaled_missed);
        }
        ojson entry{{"n", n}};
        entry["summary"] = col.add(i, values);
        const Summary s = summarize(std::vector<double>(
            [&] {
                std::vector<double> v;
                for (const auto& x : values)
                    if (x) v.push_back(cfg.functional.is_volume() ? 1.0 - *x : *x);
                return v;
            }()));
        entry["target"] = {{"name", cfg.functional.is_volume() ? "1 - volume" : cfg.functional.name()},
                           {"mean", s.mean},
                           {"stderr", s.count > 1 ? std::sqrt(s.variance / static_cast<double>(s.count - 1)) : 0.0}};
        if (efron && diff.size() >= 2) {
            const Summary sd = summarize(diff);
            const double se = std::sqrt(sd.variance / static_cast<double>(sd.count - 1));
            const double mean_lhs = summarize(lhs).mean, mean_rhs = summarize(rhs).mean;
            entry["efron"] = {{"vertices_mean", mean_lhs},
                              {"scaled_missed_mean", mean_rhs},
                              {"difference", sd.mean},
                              {"joint_stderr", se},
                              {"z", se > 0.0 ? sd.mean / se : 0.0},
                              {"within_3_stderr", std::fabs(sd.mean) <= 3.0 * se}};
        } else {
            entry["efron"] = nullptr;
        }
        ctx.per_n.push_back(entry);
    }
}

// ---------------------------------------------------------------- coupling

struct InsertionStats {
    std::map<std::int64_t, std::int64_t> visible;
    std::vector<std::map<std::int64_t, std::int64_t>> destroyed;  // by face dimension
    std::vector<double> ratio_sum, ratio_max;
    std::vector<std::int64_t> ratio_count;
    std::int64_t insertions = 0;
    std::int64_t effective = 0;

    explicit InsertionStats(int d)
        : destroyed(static_cast<std::size_t>(d)), ratio_sum(static_cast<std::size_t>(d), 0.0),
          ratio_max(static_cast<std::size_t>(d), 0.0), ratio_count(static_cast<std::size_t>(d), 0) {}

    void add(const InsertionDelta& delta, int d) {
        ++insertions;
        if (!delta.inserted) return;
        ++effective;
        ++visible[delta.visible_vertex_count];
        for (int k = 0; k < d; ++k) ++destroyed[static_cast<std::size_t>(k)][delta.destroyed[static_cast<std::size_t>(k)]];
        if (delta.visible_vertex_count < 2) return;
        const double l0 = std::log(static_cast<double>(delta.visible_vertex_count));
        for (int k = 1; k < d; ++k) {
            const auto s = delta.destroyed[static_cast<std::size_t>(k)];
            if (s < 1) continue;
            const double r = std::log(static_cast<double>(s)) / l0;
            ratio_sum[static_cast<std::size_t>(k)] += r;
            ratio_max[static_cast<std::size_t>(k)] = std::max(ratio_max[static_cast<std::size_t>(k)], r);
            ++ratio_count[static_cast<std::size_t>(k)];
        }
    }

    void merge(const InsertionStats& o) {
        for (const auto& [k, c] : o.visible) visible[k] += c;
        for (std::size_t i = 0; i < destroyed.size(); ++i)
            for (const auto& [k, c] : o.destroyed[i]) destroyed[i][k] += c;
        for (std::size_t i = 0; i < ratio_sum.size(); ++i) {
            ratio_sum[i] += o.ratio_sum[i];
            ratio_max[i] = std::max(ratio_max[i], o.ratio_max[i]);
            ratio_count[i] += o.ratio_count[i];
        }
        insertions += o.insertions;
        effective += o.effective;
    }
};

ojson histogram_json(const std::map<std::int64_t, std::int64_t>& h) {
    ojson a = ojson::array();
    for (const auto& [k, c] : h) a.push_back({k, c});
    return a;
}

struct CouplingTrial {
    double y0 = 0.0, y1 = 0.0;
    std::vector<std::int64_t> f0, f1;
    InsertionStats stats;
};

void run_coupling(Context& ctx, Collector& col) {
    const auto& cfg = ctx.cfg;
    const int d = cfg.dim;
    const double dd = d_of(cfg);
    std::vector<double> normalized;
    bool all_nonnegative = true;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        const auto n_prime = coupled_n_prime(n, cfg.constants.A);
        const auto m = n_prime - n;
        auto batch = run_trials<CouplingTrial>(cfg.trials, ctx.workers, [&](std::int64_t t) {
            RngStream rng(cfg.master_seed, trial_stream(i, t), lanes::points);
            const CoupledPair pair = coupled_pair(ctx.body, static_cast<std::size_t>(n), static_cast<std::size_t>(n_prime), rng);
            CouplingTrial r{0.0, 0.0, {}, {}, InsertionStats(d)};
            Hull hull = Hull::build(pair.p);
            r.y0 = functional_value(hull, cfg.functional);
            r.f0 = hull.f_vector();
            for (const auto& q : pair.q) r.stats.add(hull.insert(q, true), d);
            r.y1 = functional_value(hull, cfg.functional);
            r.f1 = hull.f_vector();
            return r;
        });
        ctx.note_failures(n, batch);

        std::vector<std::optional<double>> diffs;
        std::vector<double> y0, y1, dv;
        InsertionStats stats(d);
        for (const auto& r : batch.results) {
            diffs.push_back(r ? std::optional<double>(r->y1 - r->y0) : std::nullopt);
            if (!r) continue;
            y0.push_back(r->y0);
            y1.push_back(r->y1);
            dv.push_back(r->y1 - r->y0);
            stats.merge(r->stats);
        }
        ojson entry{{"n", n}, {"n_prime", n_prime}, {"m", m}};
        entry["summary"] = col.add(i, diffs);
        if (dv.empty()) {
            ctx.per_n.push_back(entry);
            continue;
        }
        const auto negatives = std::count_if(dv.begin(), dv.end(), [](double x) { return x < 0.0; });
        all_nonnegative = all_nonnegative && negatives == 0;
        const double mean_diff = summarize(dv).mean;
        const double nd = static_cast<double>(n);
        const double scale = static_cast<double>(m) * std::pow(nd, -2.0 / (dd + 1.0)) * (cfg.functional.is_volume() ? 1.0 / nd : 1.0);
        entry["difference"] = {{"min", *std::min_element(dv.begin(), dv.end())},
                               {"max", *std::max_element(dv.begin(), dv.end())},
                               {"negative_count", negatives},
                               {"mean", mean_diff},
                               {"reference_scale", scale},
                               {"normalized_mean", m > 0 ? mean_diff / scale : 0.0}};
        if (m > 0) normalized.push_back(mean_diff / scale);

        ojson faces = ojson::array();
        for (int k = 0; k < d; ++k) {
            std::vector<double> z;
            std::int64_t neg = 0, pos = 0;
            for (const auto& r : batch.results) {
                if (!r) continue;
                const auto delta = r->f1[static_cast<std::size_t>(k)] - r->f0[static_cast<std::size_t>(k)];
                neg += delta < 0;
                pos += delta > 0;
                z.push_back(static_cast<double>(delta));
            }
            const Summary s = summarize(z);
            faces.push_back({{"dim", k},
                             {"mean", s.mean},
                             {"variance", s.variance},
                             {"min", *std::min_element(z.begin(), z.end())},
                             {"max", *std::max_element(z.begin(), z.end())},
                             {"negative_count", neg},
                             {"positive_count", pos}});
        }
        entry["face_differences"] = faces;

        // s' - s through the coupled integrand (Y' - mu')^2 - (Y - mu)^2.
        const double mu0 = summarize(y0).mean, mu1 = summarize(y1).mean;
        std::vector<double> integrand;
        for (std::size_t t = 0; t < y0.size(); ++t)
            integrand.push_back((y1[t] - mu1) * (y1[t] - mu1) - (y0[t] - mu0) * (y0[t] - mu0));
        const Summary si = summarize(integrand);
        const double s0 = summarize(y0).variance;
        entry["variance_shift"] = {
            {"mean", si.mean},
            {"stderr", si.count > 1 ? std::sqrt(si.variance / static_cast<double>(si.count - 1)) : 0.0},
            {"relative", s0 > 0.0 ? si.mean / s0 : 0.0}};

        if (cfg.functional.is_volume()) {
            const double eps = epsilon_star(nd, cfg.constants.nu);
            RngStream grng(cfg.master_seed, aux_stream(i), lanes::auxiliary);
            const GEpsilon g = g_epsilon(ctx.body, eps, cfg.options.g_probes, grng, cfg.options.g_samples);
            const double rho = wet_part_volume(ctx.body, eps, 200000, cfg.master_seed).mean;
            const double spread = std::sqrt(std::pow(nd, -(dd + 3.0) / (dd + 1.0)) * std::log(nd));
            const double jump = g.best.mean * (static_cast<double>(m) * rho + std::log(nd));
            ojson typ = ojson::array();
            for (double c : {1.0, 2.0, 4.0}) {
                std::int64_t a = 0, b = 0, cc = 0, all = 0;
                for (std::size_t t = 0; t < y0.size(); ++t) {
                    const bool c1 = std::fabs(y1[t] - mu1) <= c * spread;
                    const bool c2 = std::fabs(y0[t] - mu0) <= c * spread;
                    const bool c3 = y1[t] - y0[t] <= c * jump;
                    a += c1;
                    b += c2;
                    cc += c3;
                    all += c1 && c2 && c3;
                }
                const double T = static_cast<double>(y0.size());
                typ.push_back({{"C", c},
                               {"after_insertion", static_cast<double>(a) / T},
                               {"before_insertion", static_cast<double>(b) / T},
                               {"difference", static_cast<double>(cc) / T},
                               {"all", static_cast<double>(all) / T}});
            }
            entry["typicality"] = {{"eps_star", eps},
                                   {"g_eps_star", g.best.mean},
                                   {"g_probes", g.probes},
                                   {"rho_eps_star", rho},
                                   {"frequencies", typ}};
        }

        ojson destroyed = ojson::array();
        for (int k = 0; k < d; ++k) destroyed.push_back({{"dim", k}, {"histogram", histogram_json(stats.destroyed[static_cast<std::size_t>(k)])}});
        ojson ratios = ojson::array();
        for (int k = 1; k < d; ++k) {
            const auto c = stats.ratio_count[static_cast<std::size_t>(k)];
            ratios.push_back({{"dim", k},
                              {"alpha", std::min(k, d - k)},
                              {"insertions", c},
                              {"mean_ratio", c > 0 ? stats.ratio_sum[static_cast<std::size_t>(k)] / static_cast<double>(c) : 0.0},
                              {"max_ratio", stats.ratio_max[static_cast<std::size_t>(k)]}});
        }
        entry["insertions"] = {{"total", stats.insertions},
                               {"outside_hull", stats.effective},
                               {"visible_vertices", histogram_json(stats.visible)},
                               {"destroyed_faces", destroyed},
                               {"log_ratio_to_vertices", ratios}};
        ctx.per_n.push_back(entry);
    }
    ctx.checks["all_differences_nonnegative"] = all_nonnegative;
    if (!normalized.empty()) {
        const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end());
        ctx.checks["normalized_mean_spread"] = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    }
}

// ---------------------------------------------------------------- poisson vs uniform

struct PairedTrial {
    double uniform = 0.0;
    double poisson = 0.0;
};

void run_poisson_vs_uniform(Context& ctx, Collector& col) {
    const auto& cfg = ctx.cfg;
    const bool volume = cfg.functional.is_volume();
    std::vector<std::optional<double>> ks;
    std::vector<double> grid_n, var_dev, mean_dev;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        auto batch = run_trials<PairedTrial>(cfg.trials, ctx.workers, [&](std::int64_t t) {
            // Both models read the same point stream; the Poisson sample is its first N points.
            RngStream counts(cfg.master_seed, trial_stream(i, t), lanes::poisson_count);
            const auto big_n = sample_poisson_count(static_cast<double>(n), counts);
            RngStream points(cfg.master_seed, trial_stream(i, t), lanes::points);
            const auto total = std::max<std::int64_t>(n, big_n);
            const auto pts = sample_uniform(ctx.body, static_cast<std::size_t>(total), points);
            const auto first = std::min<std::int64_t>(n, big_n);
            Hull hull = Hull::build(std::span<const Point>(pts).first(static_cast<std::size_t>(first)));
            const double at_first = functional_value(hull, cfg.functional);
            for (auto k = first; k < total; ++k) hull.insert(pts[static_cast<std::size_t>(k)], false);
            const double at_total = functional_value(hull, cfg.functional);
            return big_n >= n ? PairedTrial{at_first, at_total} : PairedTrial{at_total, at_first};
        });
        ctx.note_failures(n, batch);
        std::vector<std::optional<double>> pvals;
        std::vector<double> u, p;
        for (const auto& r : batch.results) {
            pvals.push_back(r ? std::optional<double>(r->poisson) : std::nullopt);
            if (!r) continue;
            u.push_back(r->uniform);
            p.push_back(r->poisson);
        }
        ojson entry{{"n", n}};
        entry["summary"] = col.add(i, pvals);
        if (u.size() < 2) {
            ctx.per_n.push_back(entry);
            ks.push_back(std::nullopt);
            continue;
        }
        entry["uniform_summary"] = summary_json(summarize(u), try_ks(u));

        auto var_of = [](const std::vector<double>& x, std::span<const std::size_t> idx) {
            double m = 0.0;
            for (auto k : idx) m += x[k];
            m /= static_cast<double>(idx.size());
            double s = 0.0;
            for (auto k : idx) s += (x[k] - m) * (x[k] - m);
            return s / static_cast<double>(idx.size());
        };
        auto target_mean = [&](const std::vector<double>& x, std::span<const std::size_t> idx) {
            double m = 0.0;
            for (auto k : idx) m += volume ? 1.0 - x[k] : x[k];
            return m / static_cast<double>(idx.size());
        };
        auto var_ratio = [&](std::span<const std::size_t> idx) { return var_of(p, idx) / var_of(u, idx); };
        auto mean_ratio = [&](std::span<const std::size_t> idx) { return target_mean(p, idx) / target_mean(u, idx); };
        std::vector<std::size_t> all(u.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        const double vr = var_ratio(all), mr = mean_ratio(all);
        RngStream brng(cfg.master_seed, aux_stream(i), lanes::auxiliary);
        const Interval vci = bootstrap_percentile(u.size(), var_ratio, cfg.options.bootstrap_resamples, cfg.options.bootstrap_level, brng);
        const Interval mci = bootstrap_percentile(u.size(), mean_ratio, cfg.options.bootstrap_resamples, cfg.options.bootstrap_level, brng);
        const double ks2 = ks_two_sample(u, p);
        ks.push_back(ks2);
        entry["variance_ratio"] = {{"value", vr}, {"ci_lo", vci.lo}, {"ci_hi", vci.hi}, {"ci_covers_1", vci.covers(1.0)}};
        entry["mean_ratio"] = {{"target", volume ? "1 - volume" : cfg.functional.name()},
                               {"value", mr},
                               {"ci_lo", mci.lo},
                               {"ci_hi", mci.hi},
                               {"ci_covers_1", mci.covers(1.0)}};
        entry["two_sample_ks"] = ks2;
        entry["within_10_percent"] = std::fabs(vr - 1.0) <= 0.1 && std::fabs(mr - 1.0) <= 0.1;
        grid_n.push_back(static_cast<double>(n));
        var_dev.push_back(std::fabs(vr - 1.0));
        mean_dev.push_back(std::fabs(mr - 1.0));
        ctx.per_n.push_back(entry);
    }
    ctx.checks["two_sample_ks_strictly_decreasing"] = strictly_decreasing(ks);
    ctx.checks["variance_ratio_deviation_fit"] = fit_json(try_fit(grid_n, var_dev));
    ctx.checks["mean_ratio_deviation_fit"] = fit_json(try_fit(grid_n, mean_dev));
}

// ---------------------------------------------------------------- tail

ojson tail_fit_json(const std::vector<TailPoint>& profile) {
    TailFit fit;
    try {
        fit = fit_tail_rate(profile);
    } catch (const DataError&) {
        return nullptr;
    }
    // Plain log-linear rates on the lower and upper halves of the fitted levels.
    std::vector<const TailPoint*> used;
    for (const auto& p : profile)
        if (p.count >= 10 && p.lambda > 0.0) used.push_back(&p);
    auto rate = [](std::span<const TailPoint* const> pts) -> std::optional<double> {
        if (pts.size() < 2) return std::nullopt;
        double ml = 0.0, mp = 0.0;
        for (auto* q : pts) {
            ml += q->lambda;
            mp += std::log(q->exceedance);
        }
        ml /= static_cast<double>(pts.size());
        mp /= static_cast<double>(pts.size());
        double sxx = 0.0, sxy = 0.0;
        for (auto* q : pts) {
            sxx += (q->lambda - ml) * (q->lambda - ml);
            sxy += (q->lambda - ml) * (std::log(q->exceedance) - mp);
        }
        return -sxy / sxx;
    };
    const std::size_t half = used.size() / 2;
    const auto low = rate(std::span<const TailPoint* const>(used).first(half + 1));
    const auto high = rate(std::span<const TailPoint* const>(used).subspan(half));
    return {{"c", fit.c},
            {"log_prefactor", fit.log_prefactor},
            {"log_linear_rate", fit.log_linear_rate},
            {"monotone_decreasing", fit.monotone},
            {"points", fit.points},
            {"rate_lower_half", number_or_null(low)},
            {"rate_upper_half", number_or_null(high)},
            // The local rate of a sub-Gaussian tail stays near or above c; far below it means a heavier tail.
            {"slower_than_exponential", high && *high < 0.5 * fit.c}};
}

void run_tail(Context& ctx, Collector& col) {
    const auto& cfg = ctx.cfg;
    const auto lambdas = cfg.constants.lambda_grid.empty() ? lambda_grid(0.0, 9.0, 0.25) : cfg.constants.lambda_grid;
    const double dd = d_of(cfg);
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        const auto values = primary_values(cfg, i, n, ctx);
        ojson entry{{"n", n}};
        entry["summary"] = col.add(i, values);
        std::vector<double> v;
        for (const auto& x : values)
            if (x) v.push_back(*x);
        if (v.size() < 2) {
            ctx.per_n.push_back(entry);
            continue;
        }
        const double nd = static_cast<double>(n);
        const double theory = cfg.functional.is_volume() ? std::pow(nd, -(dd + 3.0) / (dd + 1.0)) : std::pow(nd, (dd - 1.0) / (dd + 1.0));
        const double measured = summarize(v).variance;
        const double scale = cfg.options.tail_scale == "measured" ? measured : theory;
        ojson profile_json = ojson::array();
        std::vector<TailPoint> profile;
        if (scale > 0.0) profile = tail_profile(v, scale, lambdas);
        const ojson fit = profile.empty() ? ojson(nullptr) : tail_fit_json(profile);
        for (const auto& p : profile) {
            ojson row{{"lambda", p.lambda}, {"exceedance", p.exceedance}, {"count", p.count}};
            row["bound"] = fit.is_null() ? ojson(nullptr) : ojson(tail_bound(fit["c"].get<double>(), p.lambda));
            profile_json.push_back(row);
        }
        entry["var_scale"] = {{"kind", cfg.options.tail_scale}, {"value", scale}, {"theoretical", theory}, {"measured", measured}};
        entry["profile"] = profile_json;
        entry["fit"] = fit;

        // Normal control of the same size through the same profile and fit.
        RngStream crng(cfg.master_seed, aux_stream(i), lanes::auxiliary);
        std::vector<double> control(v.size());
        for (auto& x : control) x = crng.normal();
        const auto cprof = tail_profile(control, summarize(control).variance, lambdas);
        entry["normal_control"] = tail_fit_json(cprof);
        ctx.per_n.push_back(entry);
    }
}

// ---------------------------------------------------------------- floating body and wideness

Point floating_boundary_point(const FloatingBodyOracle& oracle, const Point& dir) {
    const Body& body = oracle.body();
    const Point c = body.center();
    if (oracle.exact()) {
        const auto& a = body.semi_axes();
        double q = 0.0;
        for (int k = 0; k < body.dim(); ++k) q += (dir[k] / a[static_cast<std::size_t>(k)]) * (dir[k] / a[static_cast<std::size_t>(k)]);
        return c + (oracle.ball_radius() / std::sqrt(q)) * dir;
    }
    if (!oracle.in_floating_body(c)) throw DataError("the floating body is empty at this level");
    double lo = 0.0, hi = norm(boundary_point(body, dir) - c);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (oracle.in_floating_body(c + mid * dir) ? lo : hi) = mid;
    }
    return c + lo * dir;
}

struct WideTrial {
    double value = 0.0;
    std::int64_t outside = 0;
    std::int64_t max_wideness = 0;
    std::vector<double> u;  // u[k] = Vol(U_k) estimate, k >= 1 at index k
    double missed = 0.0;
};

void run_floating_and_wide(Context& ctx, Collector& col) {
    const auto& cfg = ctx.cfg;
    const Options& o = cfg.options;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        const auto n = cfg.n_grid[i];
        const double nd = static_cast<double>(n);
        const double eps = epsilon_star(nd, cfg.constants.nu);
        const FloatingBodyOracle oracle(ctx.body, eps);
        std::vector<Point> probes;
        {
            RngStream prng(cfg.master_seed, aux_stream(i), lanes::probes);
            for (std::int64_t k = 0; k < o.boundary_probes; ++k)
                probes.push_back(floating_boundary_point(oracle, sample_direction(cfg.dim, prng)));
        }
        auto batch = run_trials<WideTrial>(cfg.trials, ctx.workers, [&](std::int64_t t) {
            const auto pts = model_points(ctx.body, n, cfg.model, cfg.master_seed, trial_stream(i, t));
            const Hull hull = Hull::build(pts);
            WideTrial r;
            r.value = functional_value(hull, cfg.functional);
            for (const auto& p : probes) r.outside += !hull.contains(p);
            RngStream wrng(cfg.master_seed, trial_stream(i, t), lanes::probes);
            const WideScan scan = wide_scan(hull, ctx.body, o.wide_probes, wrng);
            r.max_wideness = scan.max_wideness;
            r.u.assign(scan.at_least.size(), 0.0);
            for (std::size_t k = 1; k < scan.at_least.size(); ++k)
                r.u[k] = static_cast<double>(scan.at_least[k]) / static_cast<double>(scan.samples);
            r.missed = 1.0 - hull.volume();
            return r;
        });
        ctx.note_failures(n, batch);

        std::vector<std::optional<double>> values;
        std::size_t kmax = 0;
        std::int64_t good = 0, contained = 0, too_wide = 0, max_w = 0;
        double outside_sum = 0.0;
        for (const auto& r : batch.results) {
            values.push_back(r ? std::optional<double>(r->value) : std::nullopt);
            if (!r) continue;
            ++good;
            contained += r->outside == 0;
            outside_sum += static_cast<double>(r->outside);
            max_w = std::max(max_w, r->max_wideness);
            kmax = std::max(kmax, r->u.size());
        }
        ojson entry{{"n", n}, {"eps_star", eps}};
        entry["summary"] = col.add(i, values);
        if (good == 0) {
            ctx.per_n.push_back(entry);
            continue;
        }
        const double T = static_cast<double>(good);
        const double threshold = o.c5 * std::log(nd);
        for (const auto& r : batch.results)
            if (r && static_cast<double>(r->max_wideness) > threshold) ++too_wide;
        entry["floating_body"] = {{"boundary_probes", o.boundary_probes},
                                  {"contained_fraction", static_cast<double>(contained) / T},
                                  {"non_containment_frequency", 1.0 - static_cast<double>(contained) / T},
                                  {"mean_probes_outside", outside_sum / T}};

        // Vol(U_k) curve averaged over trials.
        ojson curve = ojson::array();
        bool monotone = true;
        double prev = std::numeric_limits<double>::infinity();
        std::vector<double> mean_u(kmax, 0.0);
        for (std::size_t k = 1; k < kmax; ++k) {
            std::vector<double> x;
            for (const auto& r : batch.results)
                if (r) x.push_back(k < r->u.size() ? r->u[k] : 0.0);
            const Summary s = summarize(x);
            mean_u[k] = s.mean;
            monotone = monotone && s.mean <= prev;
            prev = s.mean;
            curve.push_back({{"k", k}, {"volume", s.mean}, {"stderr", std::sqrt(s.variance / std::max(1.0, T - 1.0))}});
        }
        entry["wideness"] = {{"probes_per_trial", o.wide_probes},
                             {"max_observed", max_w},
                             {"threshold", threshold},
                             {"trials_above_threshold", too_wide},
                             {"volume_by_k", curve},
                             {"non_increasing_in_k", monotone}};

        // Perfect-set conditions with the configured placeholder constants.
        const auto k_lo = static_cast<std::int64_t>(std::ceil(o.perfect_c3));
        const auto k_hi = static_cast<std::int64_t>(std::floor(threshold));
        const std::int64_t wet_samples = ctx.body.smooth() ? 0 : 20000;
        auto rho = [&](double level) {
            if (level >= 0.5) return 1.0;
            return wet_part_volume(ctx.body, level, std::max<std::int64_t>(wet_samples, 1), cfg.master_seed).mean;
        };
        std::vector<double> bound(static_cast<std::size_t>(std::max<std::int64_t>(k_hi + 1, 0)), 0.0);
        for (auto k = k_lo; k <= k_hi; ++k) {
            const double level = static_cast<double>(k) / (o.perfect_c4 * nd);
            bound[static_cast<std::size_t>(k)] =
                std::max(o.perfect_c3 * std::max(level, rho(level) * std::exp(-o.perfect_decay * static_cast<double>(k))),
                         o.perfect_c6 * std::log(nd) / nd);
        }
        const double missed_cap = o.perfect_c7 * rho(1.0 / nd);
        std::int64_t p1 = 0, p2 = 0, p3 = 0, all = 0;
        for (const auto& r : batch.results) {
            if (!r) continue;
            bool c1 = true;
            for (auto k = k_lo; k <= k_hi; ++k)
                if (static_cast<std::size_t>(k) < r->u.size() && r->u[static_cast<std::size_t>(k)] > bound[static_cast<std::size_t>(k)]) c1 = false;
            const bool c2 = static_cast<double>(r->max_wideness) <= threshold;
            const bool c3 = r->missed <= missed_cap;
            p1 += c1;
            p2 += c2;
            p3 += c3;
            all += c1 && c2 && c3;
        }
        entry["perfect"] = {{"wide_volume_bounded", static_cast<double>(p1) / T},
                            {"no_wide_points", static_cast<double>(p2) / T},
                            {"missed_volume_bounded", static_cast<double>(p3) / T},
                            {"all", static_cast<double>(all) / T}};

        if (o.cover_audit) {
            RngStream crng(cfg.master_seed, aux_stream(i), lanes::auxiliary);
            try {
                const CapCover cover = build_cap_cover(ctx.body, nd, cfg.constants.c0, crng, cfg.constants.c2);
                const FloatingBodyOracle wet(ctx.body, cover.wet_level);
                std::int64_t checked = 0, held = 0;
                for (int tries = 0; checked < 100 && tries < 100000; ++tries) {
                    const Point x = sample_uniform(ctx.body, crng);
                    if (wet.in_floating_body(x)) continue;
                    ++checked;
                    held += cover_holds_seen_region(cover, wet, x, 2000, crng);
                }
                entry["cover_audit"] = {{"caps", cover.caps.size()},
                                        {"c1", cover.c1},
                                        {"c2", cover.c2},
                                        {"points_checked", checked},
                                        {"held_fraction", checked > 0 ? static_cast<double>(held) / static_cast<double>(checked) : 0.0}};
            } catch (const InvalidInput& e) {
                entry["cover_audit"] = {{"error", e.what()}};
            }
        }
        ctx.per_n.push_back(entry);
    }
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, int workers) {
    if (workers <= 0) workers = cfg.workers;
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    Report report;
    Context ctx{cfg, cfg.body(), workers, report};
    add_reference_exponents(ctx);
    const bool deficit = cfg.functional.is_volume() && cfg.kind != ExperimentKind::coupling;
    Collector col(cfg, deficit);
    switch (cfg.kind) {
        case ExperimentKind::clt:
            run_clt(ctx, col);
            break;
        case ExperimentKind::variance_scaling:
            run_variance_scaling(ctx, col);
            break;
        case ExperimentKind::expectation:
            run_expectation(ctx, col);
            break;
        case ExperimentKind::coupling:
            run_coupling(ctx, col);
            break;
        case ExperimentKind::poisson_vs_uniform:
            run_poisson_vs_uniform(ctx, col);
            break;
        case ExperimentKind::tail:
            run_tail(ctx, col);
            break;
        case ExperimentKind::floating_and_wide:
            run_floating_and_wide(ctx, col);
            break;
    }
    ojson fits = col.finish(report);
    ojson& doc = report.doc;
    doc["version"] = kVersion;
    doc["experiment"] = to_string(cfg.kind);
    doc["config"] = config_echo(cfg);
    doc["failed_trials"] = report.failed_trials;
    doc["failures"] = ctx.failures;
    doc["reference_exponents"] = ctx.references;
    doc["per_n"] = ctx.per_n;
    doc["fits"] = fits;
    doc["checks"] = ctx.checks;
    doc["runtime"] = {{"rng", "philox4x32-10"},
                      {"stream_layout", "stream = (n index << 32) | trial"},
                      {"trials_run", static_cast<std::int64_t>(cfg.n_grid.size()) * cfg.trials}};
    return report;
}

}  // namespace rpoly
