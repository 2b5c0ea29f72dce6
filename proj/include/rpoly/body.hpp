#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rpoly/point.hpp"

namespace rpoly {

// Half-space section {y in K : direction . y >= offset} together with its volume.
struct Cap {
    Point direction;
    double offset = 0.0;
    double volume = 0.0;
};

enum class BodyKind { ball, cube, simplex, ellipsoid };

std::string_view to_string(BodyKind kind) noexcept;
BodyKind parse_body_kind(std::string_view name);

// A convex body of volume one in R^d, 2 <= d <= 6.
//
//   ball       centred at the origin, radius (Gamma(d/2+1)/pi^(d/2))^(1/d)
//   cube       [0,1]^d
//   simplex    {x >= 0, sum x <= s} with s = (d!)^(1/d)
//   ellipsoid  centred at the origin, semi-axes proportional to params
//
// Immutable after construction; all queries are const and thread-safe.
class Body {
public:
    static Body ball(int dim);
    static Body cube(int dim);
    static Body simplex(int dim);
    static Body ellipsoid(std::vector<double> semi_axes);
    static Body make(BodyKind kind, int dim, const std::vector<double>& params = {});

    [[nodiscard]] BodyKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    // Shape parameters as given (ellipsoid relative semi-axes; empty otherwise).
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    // Normalising factor: radius, edge length, simplex leg, or axis multiplier.
    [[nodiscard]] double scale() const noexcept { return scale_; }
    // Scaled semi-axes (ellipsoid) or d copies of the radius (ball).
    [[nodiscard]] const std::vector<double>& semi_axes() const noexcept { return axes_; }
    [[nodiscard]] bool smooth() const noexcept { return kind_ == BodyKind::ball || kind_ == BodyKind::ellipsoid; }

    [[nodiscard]] double analytic_volume() const;
    [[nodiscard]] Point center() const;
    [[nodiscard]] Point box_lo() const;
    [[nodiscard]] Point box_hi() const;
    // Corner points of the cube / simplex; empty for smooth bodies.
    [[nodiscard]] std::vector<Point> vertices() const;
    // Outward unit facet normals of the cube / simplex; empty for smooth bodies.
    [[nodiscard]] std::vector<Point> facet_normals() const;

    [[nodiscard]] bool contains(const Point& x) const;
    // h_K(u) = max over y in K of u . y. Throws InvalidInput for a zero vector.
    [[nodiscard]] double support(const Point& u) const;
    // Vol{y in K : u . y >= t} for unit u.
    [[nodiscard]] double cap_volume(const Point& u, double t) const;
    // Cap of the given volume in direction u, found by bisection on the offset.
    [[nodiscard]] Cap cap_for_volume(const Point& u, double eps) const;

private:
    Body(BodyKind kind, int dim) : kind_(kind), dim_(dim) {}
    void check_dim(const Point& x) const;

    BodyKind kind_;
    int dim_;
    double scale_ = 1.0;
    std::vector<double> params_;
    std::vector<double> axes_;
};

// Fraction of a d-ball's volume lying in {y : y_1 >= h * radius}, h in R.
double ball_cap_fraction(int dim, double h);

// Vol{x in [0,1]^d : u . x >= t} by inclusion-exclusion with an exact
// rational fallback when cancellation is detected.
double cube_cap_volume(const Point& u, double t);

// P(u . X >= t) for X uniform in the simplex conv{0, s e_1, ..., s e_d},
// via the B-spline representation of the law of u . X.
double simplex_cap_volume(const Point& u, double t, double leg);

}  // namespace rpoly
