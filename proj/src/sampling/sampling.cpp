#include "rpoly/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rpoly {

Point sample_direction(int dim, RngStream& rng) {
    Point g(dim);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            g[i] = rng.normal();
            n2 += g[i] * g[i];
        }
    } while (n2 == 0.0);
    return (1.0 / std::sqrt(n2)) * g;
}

Point sample_uniform(const Body& body, RngStream& rng) {
    const int d = body.dim();
    switch (body.kind()) {
        case BodyKind::ball:
        case BodyKind::ellipsoid: {
            Point x = sample_direction(d, rng);
            const double r = std::pow(rng.uniform(), 1.0 / d);
            const auto& axes = body.semi_axes();
            for (int i = 0; i < d; ++i) x[i] *= r * axes[static_cast<std::size_t>(i)];
            return x;
        }
        case BodyKind::cube: {
            Point x(d);
            for (int i = 0; i < d; ++i) x[i] = rng.uniform();
            return x;
        }
        case BodyKind::simplex: {
            // Normalised exponential spacings give the flat Dirichlet law.
            double e[kMaxDim + 1];
            double total = 0.0;
            for (int i = 0; i <= d; ++i) {
                e[i] = -std::log(rng.uniform_open());
                total += e[i];
            }
            Point x(d);
            for (int i = 0; i < d; ++i) x[i] = body.scale() * e[i + 1] / total;
            return x;
        }
    }
    return Point(d);
}

std::vector<Point> sample_uniform(const Body& body, std::size_t count, RngStream& rng) {
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_uniform(body, rng));
    return out;
}

Point sample_rejection(const Body& body, RngStream& rng) {
    const Point lo = body.box_lo();
    const Point hi = body.box_hi();
    Point x(body.dim());
    for (;;) {
        for (int i = 0; i < body.dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
        if (body.contains(x)) return x;
    }
}

Point boundary_point(const Body& body, const Point& dir) {
    const int d = body.dim();
    const Point u = normalized(dir);
    const Point c = body.center();
    double s = 0.0;
    switch (body.kind()) {
        case BodyKind::ball:
        case BodyKind::ellipsoid: {
            double q = 0.0;
            const auto& axes = body.semi_axes();
            for (int i = 0; i < d; ++i) {
                const double v = u[i] / axes[static_cast<std::size_t>(i)];
                q += v * v;
            }
            s = 1.0 / std::sqrt(q);
            break;
        }
        case BodyKind::cube: {
            s = std::numeric_limits<double>::infinity();
            for (int i = 0; i < d; ++i) {
                if (u[i] > 0.0) s = std::min(s, (1.0 - c[i]) / u[i]);
                else if (u[i] < 0.0) s = std::min(s, -c[i] / u[i]);
            }
            break;
        }
        case BodyKind::simplex: {
            s = std::numeric_limits<double>::infinity();
            double usum = 0.0, csum = 0.0;
            for (int i = 0; i < d; ++i) {
                if (u[i] < 0.0) s = std::min(s, -c[i] / u[i]);
                usum += u[i];
                csum += c[i];
            }
            if (usum > 0.0) s = std::min(s, (body.scale() - csum) / usum);
            break;
        }
    }
    Point x = c + s * u;
    // Pull back onto K if rounding pushed the point just outside.
    for (int k = 0; k < 8 && !body.contains(x); ++k) {
        s *= 1.0 - 1e-15 * (1 << k);
        x = c + s * u;
    }
    return x;
}

std::int64_t sample_poisson_count(double mean, RngStream& rng) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw InvalidInput("Poisson mean must be positive and finite");
    // libstdc++ switches to a transformed-rejection sampler for mean >= 12.
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

CoupledPair coupled_pair(const Body& body, std::size_t n, std::size_t n_prime, RngStream& rng) {
    if (n_prime < n) throw InvalidInput("coupled_pair requires n_prime >= n");
    if (n < static_cast<std::size_t>(body.dim()) + 1) throw InvalidInput("coupled_pair requires n >= d + 1");
    CoupledPair pair;
    pair.p = sample_uniform(body, n, rng);
    pair.q = sample_uniform(body, n_prime - n, rng);
    return pair;
}

}  // namespace rpoly
