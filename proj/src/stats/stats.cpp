#include "rpoly/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rpoly/error.hpp"

namespace rpoly {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void check_finite(double x) {
    if (!std::isfinite(x)) throw DataError("non-finite value in statistics input");
}

}  // namespace

void MomentAccumulator::add(double x) {
    check_finite(x);
    MomentAccumulator one;
    one.n_ = 1;
    one.mean_ = x;
    merge(one);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    std::array<double, kMaxOrder + 1> out{};
    for (int p = 2; p <= kMaxOrder; ++p) {
        double s = sums_[static_cast<std::size_t>(p)] + other.sums_[static_cast<std::size_t>(p)];
        for (int k = 1; k <= p - 2; ++k) {
            const double c = binom(p, k) * std::pow(delta, k);
            s += c * (std::pow(-nb / n, k) * sums_[static_cast<std::size_t>(p - k)] +
                      std::pow(na / n, k) * other.sums_[static_cast<std::size_t>(p - k)]);
        }
        s += std::pow(na * nb * delta / n, p) * (1.0 / std::pow(nb, p - 1) - std::pow(-1.0 / na, p - 1));
        out[static_cast<std::size_t>(p)] = s;
    }
    sums_ = out;
    mean_ += delta * nb / n;
    n_ += other.n_;
}

double MomentAccumulator::variance() const noexcept { return n_ > 0 ? sums_[2] / static_cast<double>(n_) : 0.0; }

double MomentAccumulator::central_moment(int k) const {
    if (k < 2 || k > kMaxOrder) throw InvalidInput("central moment order must be in [2, 6]");
    return n_ > 0 ? sums_[static_cast<std::size_t>(k)] / static_cast<double>(n_) : 0.0;
}

double jackknife_variance_stderr(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) return 0.0;
    const double nd = static_cast<double>(n);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / nd;
    double s2 = 0.0;
    for (double x : values) s2 += (x - mean) * (x - mean);
    // Leaving x_i out removes e_i^2 n/(n-1) from the deviation sum.
    std::vector<double> loo(n);
    double avg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = values[i] - mean;
        loo[i] = (s2 - e * e * nd / (nd - 1.0)) / (nd - 1.0);
        avg += loo[i];
    }
    avg /= nd;
    double ss = 0.0;
    for (double v : loo) ss += (v - avg) * (v - avg);
    return std::sqrt((nd - 1.0) / nd * ss);
}

Summary summarize(std::span<const double> values) {
    MomentAccumulator acc;
    for (double x : values) acc.add(x);
    Summary s;
    s.count = acc.count();
    s.mean = acc.mean();
    s.variance = acc.variance();
    if (s.count == 0) return s;
    for (int k = 2; k <= MomentAccumulator::kMaxOrder; ++k) s.central[static_cast<std::size_t>(k)] = acc.central_moment(k);
    for (double x : values) {
        const double a = std::fabs(x - s.mean);
        double p = a * a;
        for (int k = 2; k <= MomentAccumulator::kMaxOrder; ++k, p *= a) s.absolute[static_cast<std::size_t>(k)] += p;
    }
    for (int k = 2; k <= MomentAccumulator::kMaxOrder; ++k) s.absolute[static_cast<std::size_t>(k)] /= static_cast<double>(s.count);
    s.var_stderr = jackknife_variance_stderr(values);
    return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::span<const double> values) {
    if (values.empty()) throw DataError("KS statistic of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    for (double x : v) check_finite(x);
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = normal_cdf(v[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_distance_to_normal(std::span<const double> values) {
    if (values.size() < 2) throw DataError("KS distance needs at least two values");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double x : values) {
        check_finite(x);
        mean += x;
    }
    mean /= n;
    double ss = 0.0;
    for (double x : values) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("KS distance of a sample with zero variance");
    std::vector<double> z;
    z.reserve(values.size());
    for (double x : values) z.push_back((x - mean) / sd);
    return ks_statistic_normal(z);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DataError("two-sample KS needs non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double ks_critical_99(std::int64_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double ks_two_sample_critical_99(std::int64_t n, std::int64_t m) {
    const double a = static_cast<double>(n), b = static_cast<double>(m);
    return 1.628 * std::sqrt((a + b) / (a * b));
}

double chernoff_bound(double mean, double t) {
    if (!(mean >= 0.0) || !(t >= 0.0)) throw InvalidInput("chernoff_bound needs mean >= 0 and t >= 0");
    if (t == 0.0) return 1.0;
    return std::exp(-t * t / (2.0 * (mean + t / 3.0)));
}

PowerLawFit fit_power_law(std::span<const double> n, std::span<const double> v) {
    if (n.size() != v.size()) throw InvalidInput("fit_power_law: size mismatch");
    if (n.size() < 3) throw DataError("fit_power_law needs at least three points");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0) || !(v[i] > 0.0) || !std::isfinite(n[i]) || !std::isfinite(v[i]))
            throw DataError("fit_power_law needs positive finite data");
        x.push_back(std::log(n[i]));
        y.push_back(std::log(v[i]));
    }
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DataError("fit_power_law needs at least two distinct n");
    PowerLawFit f;
    f.points = static_cast<std::int64_t>(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ssr += r * r;
    }
    f.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
    f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    return f;
}

std::vector<double> lambda_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidInput("lambda grid needs step > 0 and hi >= lo");
    std::vector<double> g;
    const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

std::vector<TailPoint> tail_profile(std::span<const double> values, double var_scale, std::span<const double> lambdas) {
    if (!(var_scale > 0.0)) throw InvalidInput("tail_profile needs var_scale > 0");
    if (values.empty()) throw DataError("tail_profile of an empty sample");
    double mean = 0.0;
    for (double x : values) {
        check_finite(x);
        mean += x;
    }
    mean /= static_cast<double>(values.size());
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double x : values) dev.push_back(std::fabs(x - mean));
    std::sort(dev.begin(), dev.end());
    std::vector<TailPoint> out;
    for (double lam : lambdas) {
        if (!(lam >= 0.0)) throw InvalidInput("tail_profile: lambda must be non-negative");
        const double thr = std::sqrt(lam * var_scale);
        const auto below = std::lower_bound(dev.begin(), dev.end(), thr) - dev.begin();
        TailPoint p;
        p.lambda = lam;
        p.count = static_cast<std::int64_t>(dev.size()) - below;
        p.exceedance = static_cast<double>(p.count) / static_cast<double>(dev.size());
        out.push_back(p);
    }
    return out;
}

double tail_bound(double c, double lambda) { return 2.0 * std::exp(-c * lambda); }

TailFit fit_tail_rate(std::span<const TailPoint> profile, std::int64_t min_count) {
    std::vector<double> lam, logp;
    TailFit fit;
    fit.monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const TailPoint& p : profile) {
        if (p.count < min_count || p.lambda <= 0.0) continue;
        if (!(p.exceedance < prev)) fit.monotone = false;
        prev = p.exceedance;
        lam.push_back(p.lambda);
        logp.push_back(std::log(p.exceedance));
    }
    fit.points = static_cast<std::int64_t>(lam.size());
    if (lam.size() < 3) throw DataError("tail fit needs at least three populated lambda values");
    const double m = static_cast<double>(lam.size());

    // For fixed c the best log A is the mean residual; minimise over log c.
    auto ssr_at = [&](double c, double* log_a) {
        double mean = 0.0;
        std::vector<double> base(lam.size());
        for (std::size_t i = 0; i < lam.size(); ++i) {
            base[i] = std::log(std::erfc(std::sqrt(c * lam[i])));
            mean += logp[i] - base[i];
        }
        mean /= m;
        double ssr = 0.0;
        for (std::size_t i = 0; i < lam.size(); ++i) {
            const double r = logp[i] - base[i] - mean;
            ssr += r * r;
        }
        if (log_a != nullptr) *log_a = mean;
        return ssr;
    };
    double a = std::log(1e-4), b = std::log(20.0);
    // Coarse scan guards the golden-section search against a non-unimodal start.
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    constexpr int kScan = 200;
    for (int i = 0; i <= kScan; ++i) {
        const double v = ssr_at(std::exp(a + (b - a) * i / kScan), nullptr);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = a + (b - a) * std::max(0, best - 1) / kScan;
    double hi = a + (b - a) * std::min(kScan, best + 1) / kScan;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = hi - r * (hi - lo), c2 = lo + r * (hi - lo);
    double f1 = ssr_at(std::exp(c1), nullptr), f2 = ssr_at(std::exp(c2), nullptr);
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - r * (hi - lo);
            f1 = ssr_at(std::exp(c1), nullptr);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + r * (hi - lo);
            f2 = ssr_at(std::exp(c2), nullptr);
        }
    }
    fit.c = std::exp(0.5 * (lo + hi));
    ssr_at(fit.c, &fit.log_prefactor);

    const double ml = std::accumulate(lam.begin(), lam.end(), 0.0) / m;
    const double mp = std::accumulate(logp.begin(), logp.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        sxx += (lam[i] - ml) * (lam[i] - ml);
        sxy += (lam[i] - ml) * (logp[i] - mp);
    }
    fit.log_linear_rate = -sxy / sxx;
    return fit;
}

Interval bootstrap_percentile(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                              int resamples, double level, RngStream& rng) {
    if (n == 0) throw DataError("bootstrap of an empty sample");
    if (resamples < 10) throw InvalidInput("bootstrap needs at least 10 resamples");
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("bootstrap level must lie in (0, 1)");
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(resamples));
    std::vector<std::size_t> idx(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int b = 0; b < resamples; ++b) {
        for (auto& i : idx) i = pick(rng);
        stats.push_back(statistic(idx));
    }
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, stats.size() - 1);
        return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
    };
    const double alpha = 0.5 * (1.0 - level);
    return {quantile(alpha), quantile(1.0 - alpha)};
}

}  // namespace rpoly
