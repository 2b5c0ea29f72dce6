#pragma once

#include <span>

#include "rpoly/point.hpp"

namespace rpoly {

// Sign of det[p1-p0, ..., pd-p0] for d+1 points in R^d.
// Floating-point evaluation with an error filter; falls back to exact
// rational arithmetic whenever the filter cannot certify the sign.
int orientation(std::span<const Point> simplex);

// Same predicate with the points given as d facet vertices plus an apex.
int orientation(std::span<const Point* const> facet, const Point& apex);

// Always-exact evaluation (no filter). Exposed for tests.
int orientation_exact(std::span<const Point* const> points);

// Floating determinant of a k x k row-major matrix (partial pivoting LU).
double determinant(std::span<double> a, int k);

}  // namespace rpoly
