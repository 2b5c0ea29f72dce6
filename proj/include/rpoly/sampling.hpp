#pragma once

#include <cstdint>
#include <vector>

#include "rpoly/body.hpp"
#include "rpoly/rng.hpp"

namespace rpoly {

// P followed by Q is one n'-sample; P alone is an n-sample.
struct CoupledPair {
    std::vector<Point> p;
    std::vector<Point> q;
};

// Exact uniform law on K: radial method for ball/ellipsoid, direct for cube
// and simplex.
Point sample_uniform(const Body& body, RngStream& rng);
std::vector<Point> sample_uniform(const Body& body, std::size_t count, RngStream& rng);

// Bounding-box rejection; valid for any body, used as a cross-check.
Point sample_rejection(const Body& body, RngStream& rng);

// Uniform direction on the unit sphere S^{d-1}.
Point sample_direction(int dim, RngStream& rng);

// Point of the boundary hit by the ray from the body's centre along dir.
Point boundary_point(const Body& body, const Point& dir);

// Poisson(mean) variate.
std::int64_t sample_poisson_count(double mean, RngStream& rng);

// P is the first n draws of the stream and Q the next n' - n, so P' = P then Q
// is exactly the n'-sample the same stream would produce.
CoupledPair coupled_pair(const Body& body, std::size_t n, std::size_t n_prime, RngStream& rng);

}  // namespace rpoly
