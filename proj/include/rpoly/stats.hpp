#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rpoly/rng.hpp"

namespace rpoly {

// Streaming count, mean and central moment sums up to order 6, updated and
// merged with the pairwise formulas of Pebay (2008), so merging partial
// accumulators in any grouping gives the single-pass result.
class MomentAccumulator {
public:
    static constexpr int kMaxOrder = 6;

    void add(double x);
    void merge(const MomentAccumulator& other);

    [[nodiscard]] std::int64_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    // Population (1/n) variance.
    [[nodiscard]] double variance() const noexcept;
    // Signed population central moment of order k, 2 <= k <= 6.
    [[nodiscard]] double central_moment(int k) const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    std::array<double, kMaxOrder + 1> sums_{};  // sums_[k] = sum (x - mean)^k
};

// Full-sample summary of one functional.
struct Summary {
    std::int64_t count = 0;
    double mean = 0.0;
    double variance = 0.0;    // population
    double var_stderr = 0.0;  // jackknife standard error of the variance
    std::array<double, 7> central{};   // signed central moments, index = order (2..6)
    std::array<double, 7> absolute{};  // E|X - mean|^k, index = order (2..6)
};

Summary summarize(std::span<const double> values);

// Jackknife standard error of the population variance, O(n) in closed form.
double jackknife_variance_stderr(std::span<const double> values);

double normal_cdf(double x);

// KS distance to Phi after standardising by the sample mean and the n-1
// standard deviation. Requires n >= 2 and positive variance.
double ks_distance_to_normal(std::span<const double> values);
// KS distance to Phi of values taken as already standardised.
double ks_statistic_normal(std::span<const double> values);
double ks_two_sample(std::span<const double> a, std::span<const double> b);
// Asymptotic 99% critical values.
double ks_critical_99(std::int64_t n);
double ks_two_sample_critical_99(std::int64_t n, std::int64_t m);

// exp(-t^2 / (2 (mean + t/3))), the Chernoff-type bound P(X >= mean + t).
double chernoff_bound(double mean, double t);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;  // natural log of the prefactor
    double slope_stderr = 0.0;
    double r2 = 0.0;
    std::int64_t points = 0;
};

// Ordinary least squares of log v on log n.
PowerLawFit fit_power_law(std::span<const double> n, std::span<const double> v);

struct TailPoint {
    double lambda = 0.0;
    double exceedance = 0.0;  // fraction with |value - mean| >= sqrt(lambda * var_scale)
    std::int64_t count = 0;
};

std::vector<TailPoint> tail_profile(std::span<const double> values, double var_scale, std::span<const double> lambdas);
// Evenly spaced grid lo, lo + step, ..., hi.
std::vector<double> lambda_grid(double lo, double hi, double step);
// 2 exp(-c lambda).
double tail_bound(double c, double lambda);

// Exponential tail rate. The model log P = log A + log erfc(sqrt(c lambda))
// is fitted by least squares; a normal law with var_scale equal to its
// variance gives exactly c = 1/2 there, while for tails heavier or lighter
// than Gaussian c absorbs the difference. log_linear_rate is the plain
// negated slope of log exceedance on lambda over the same points.
struct TailFit {
    double c = 0.0;
    double log_prefactor = 0.0;
    double log_linear_rate = 0.0;
    bool monotone = false;  // exceedance strictly decreasing over the fitted points
    std::int64_t points = 0;
};

TailFit fit_tail_rate(std::span<const TailPoint> profile, std::int64_t min_count = 10);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool covers(double x) const noexcept { return lo <= x && x <= hi; }
};

// Percentile bootstrap over resampled index sets of size n. The statistic
// receives the resampled indices, so paired data stay paired.
Interval bootstrap_percentile(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                              int resamples, double level, RngStream& rng);

}  // namespace rpoly
