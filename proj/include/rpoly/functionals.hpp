#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rpoly/body.hpp"
#include "rpoly/estimate.hpp"
#include "rpoly/hull.hpp"
#include "rpoly/rng.hpp"

namespace rpoly {

// Unit directions at the cell centres of a k x ... x k grid on every face of
// the cube [-1,1]^d, projected to the sphere. Every unit vector is within
// covering_angle of some grid direction.
struct DirectionGrid {
    int dim = 0;
    int per_face = 0;
    double covering_angle = 0.0;
    std::vector<Point> dirs;

    static DirectionGrid cube_sphere(int dim, int per_face);
    // Shared default grid: 4096 directions in d = 2, about 1.2e4-1.4e4 above.
    static const DirectionGrid& standard(int dim);
};

struct MinimalCap {
    double volume = 0.0;
    Point direction;
    // 0 for the closed-form bodies; otherwise the grid's covering angle
    // (the local descent refines below it but carries no certificate).
    double resolution = 0.0;
};

// Smallest cap of K containing x: min over unit u of Vol{y in K : u.y >= u.x}.
// Ball and ellipsoid use the radial closed form; cube and simplex search
// the standard grid plus facet and vertex directions, then refine by descent.
MinimalCap minimal_cap(const Body& body, const Point& x, bool force_search = false);
double minimal_cap_volume(const Body& body, const Point& x);

// Membership in the eps-floating body F_eps = {x : every cap through x has volume >= eps}.
//
// For cube and simplex the eps-cap offsets t(g) of a direction grid are
// tabulated once. F_eps is contained in the polytope {g.x <= t(g)}, and since
// t is R-Lipschitz in the direction (R = max |y - centre| over K), a point
// whose slack exceeds 2 R covering_angle is certainly inside. Only points in
// that thin band fall back to the descent of minimal_cap.
class FloatingBodyOracle {
public:
    FloatingBodyOracle(Body body, double eps, bool force_search = false, int grid_per_face = 0);

    [[nodiscard]] const Body& body() const noexcept { return body_; }
    [[nodiscard]] double eps() const noexcept { return eps_; }
    [[nodiscard]] bool exact() const noexcept { return exact_; }
    [[nodiscard]] double resolution() const noexcept { return exact_ ? 0.0 : grid_.covering_angle; }
    // Radius of F_eps as a fraction of the radius, in volume-preserving ball
    // coordinates (ball and ellipsoid on the closed-form path).
    [[nodiscard]] double ball_radius() const noexcept { return rho_; }

    [[nodiscard]] double min_cap(const Point& x) const;
    [[nodiscard]] bool in_floating_body(const Point& x) const;
    // True iff the segment xy misses F_eps. x must lie in the wet part.
    [[nodiscard]] bool sees(const Point& x, const Point& y) const;

private:
    // Parameter interval [lo, hi] of x + s (y - x), s in [0,1], inside {g.z <= t(g) - shrink}.
    bool segment_interval(const Point& x, const Point& y, double shrink, double& lo, double& hi) const;
    bool refine_member(const Point& x) const;
    void check_inside(const Point& x) const;

    Body body_;
    double eps_;
    bool exact_;
    double rho_ = 0.0;
    double reach_ = 0.0;
    DirectionGrid grid_;
    std::vector<double> offsets_;
};

// Vol(S_{x,eps}) by Monte Carlo over uniform y in K.
Estimate visibility_volume(const FloatingBodyOracle& oracle, const Point& x, std::int64_t samples, RngStream& rng);

// Largest visibility volume over boundary probes: a lower-bound estimate of g(eps).
struct GEpsilon {
    Estimate best;  // visibility volume at the best probe
    int probes = 0;
    Point argmax;
};

GEpsilon g_epsilon(const Body& body, double eps, int probes, RngStream& rng, std::int64_t samples_per_probe = 20000);

// rho_eps = Vol of the eps-wet part. Closed form for ball and ellipsoid,
// Monte Carlo over uniform points otherwise.
Estimate wet_part_volume(const Body& body, double eps, std::int64_t samples = 1000000, std::uint64_t seed = 0);

// nu * ln(n) / n.
double epsilon_star(double n, double nu);

// Wideness of uniform probes in K against a frozen hull. at_least[k] counts
// probes seeing k or more hull vertices (at_least[0] = samples).
struct WideScan {
    std::int64_t samples = 0;
    std::int64_t max_wideness = 0;
    std::vector<std::int64_t> at_least;

    [[nodiscard]] Estimate volume(int k) const;
};

WideScan wide_scan(const Hull& hull, const Body& body, std::int64_t samples, RngStream& rng);
// Vol(U_{k,P}) estimate; optionally reports the maximum observed wideness.
Estimate wide_volume_estimate(const Hull& hull, const Body& body, int k, std::int64_t samples, RngStream& rng,
                              std::int64_t* max_wideness = nullptr);

// Caps of volume c2 log n / n whose directions form a net fine enough that
// the region seen by any point outside F_{c0 log n / n} lies in one of them.
struct CapCover {
    std::vector<Cap> caps;
    double c0 = 0.0;
    double c1 = 0.0;  // log(cap count) / log n, as measured
    double c2 = 0.0;
    double wet_level = 0.0;  // c0 log n / n
    double cap_volume = 0.0;  // c2 log n / n
    double net_angle = 0.0;   // covering angle of the direction net (ball coordinates)
};

// The geometry is derived in volume-preserving ball coordinates: a point x on
// the boundary sees exactly the cap of angular radius 2 phi(wet_level), where
// phi(a) is the angular radius of an a-cap, so directions within
// phi(cap_volume) - 2 phi(wet_level) of x suffice. When c2 is not given it is
// chosen so that phi(cap_volume) = 2.25 phi(wet_level). Polytopes reuse the
// ball rule; their containment is only checked empirically.
CapCover build_cap_cover(const Body& body, double n, double c0, RngStream& rng, std::optional<double> c2 = std::nullopt);

// Monte Carlo containment check: samples y in K, keeps those seen by x at
// level wet_level, and reports whether one cover cap holds x and all of them.
bool cover_holds_seen_region(const CapCover& cover, const FloatingBodyOracle& oracle, const Point& x,
                             std::int64_t samples, RngStream& rng);

}  // namespace rpoly
