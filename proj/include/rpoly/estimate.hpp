#pragma once

#include <cmath>
#include <cstdint>

namespace rpoly {

// A Monte Carlo or analytic estimate. Exact values carry std_error = 0.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

// Proportion estimate hits / samples with its binomial standard error.
inline Estimate proportion(std::int64_t hits, std::int64_t samples) {
    Estimate e;
    e.samples = samples;
    if (samples <= 0) return e;
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    e.mean = p;
    e.std_error = samples > 1 ? std::sqrt(p * (1.0 - p) / static_cast<double>(samples - 1)) : 0.0;
    return e;
}

}  // namespace rpoly
