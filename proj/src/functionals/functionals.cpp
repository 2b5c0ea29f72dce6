#include "rpoly/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "rpoly/error.hpp"
#include "rpoly/sampling.hpp"

namespace rpoly {

namespace {

constexpr int kDescentStarts = 3;
constexpr double kDescentFloor = 1e-9;  // smallest angular step of the local descent

void check_eps(double eps, double upper) {
    if (!(eps > 0.0 && eps <= upper)) throw InvalidInput("eps must lie in (0, " + std::to_string(upper) + "]");
}

// Relative radius of x in the volume-preserving ball coordinates of a
// ball or ellipsoid: sqrt(sum (x_i / a_i)^2).
double relative_radius(const Body& body, const Point& x) {
    const auto& axes = body.semi_axes();
    double q = 0.0;
    for (int i = 0; i < body.dim(); ++i) {
        const double v = x[i] / axes[static_cast<std::size_t>(i)];
        q += v * v;
    }
    return std::sqrt(q);
}

// h in [0, 1] with ball_cap_fraction(dim, h) = a, for a in (0, 1/2].
double ball_height_for(int dim, double a) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ball_cap_fraction(dim, mid) > a) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Orthonormal basis of the tangent space of the sphere at u.
std::vector<Point> tangent_basis(const Point& u) {
    const int d = u.dim();
    std::vector<Point> basis;
    for (int i = 0; i < d && static_cast<int>(basis.size()) < d - 1; ++i) {
        Point e(d);
        e[i] = 1.0;
        e = e + (-dot(e, u)) * u;
        for (const Point& b : basis) e = e + (-dot(e, b)) * b;
        const double n = norm(e);
        if (n > 1e-6) basis.push_back((1.0 / n) * e);
    }
    return basis;
}

double cap_through(const Body& body, const Point& u, const Point& x) { return body.cap_volume(u, dot(u, x)); }

// Pattern search on the sphere for a local minimum of the cap through x.
double descend(const Body& body, const Point& x, Point& u, double value, double step) {
    for (int iter = 0; iter < 2000 && step > kDescentFloor; ++iter) {
        bool moved = false;
        for (const Point& t : tangent_basis(u)) {
            for (double sgn : {1.0, -1.0}) {
                const Point v = normalized(u + (sgn * step) * t);
                const double val = cap_through(body, v, x);
                if (val < value) {
                    value = val;
                    u = v;
                    moved = true;
                    break;
                }
            }
            if (moved) break;
        }
        if (!moved) step *= 0.5;
    }
    return value;
}

Point random_rotation_apply(const std::vector<Point>& q, const Point& w) {
    Point out(w.dim());
    for (int i = 0; i < w.dim(); ++i) out = out + w[i] * q[static_cast<std::size_t>(i)];
    return out;
}

std::vector<Point> random_orthonormal(int d, RngStream& rng) {
    std::vector<Point> q;
    while (static_cast<int>(q.size()) < d) {
        Point g(d);
        for (int i = 0; i < d; ++i) g[i] = rng.normal();
        for (const Point& b : q) g = g + (-dot(g, b)) * b;
        const double n = norm(g);
        if (n > 1e-8) q.push_back((1.0 / n) * g);
    }
    return q;
}

}  // namespace

DirectionGrid DirectionGrid::cube_sphere(int dim, int per_face) {
    if (dim < kMinDim || dim > kMaxDim) throw InvalidInput("grid dimension must be in [2, 6]");
    if (per_face < 1) throw InvalidInput("grid needs at least one cell per face");
    DirectionGrid g;
    g.dim = dim;
    g.per_face = per_face;
    // Cell centres lie within sqrt(d-1)/k of every face point, and the
    // gnomonic projection from a face at distance 1 does not expand angles.
    g.covering_angle = std::sqrt(static_cast<double>(dim - 1)) / per_face;
    std::size_t cells = 1;
    for (int i = 0; i < dim - 1; ++i) cells *= static_cast<std::size_t>(per_face);
    g.dirs.reserve(cells * 2 * static_cast<std::size_t>(dim));
    std::vector<int> idx(static_cast<std::size_t>(dim - 1));
    for (int axis = 0; axis < dim; ++axis) {
        for (double sgn : {1.0, -1.0}) {
            std::fill(idx.begin(), idx.end(), 0);
            for (std::size_t c = 0; c < cells; ++c) {
                Point p(dim);
                int j = 0;
                for (int i = 0; i < dim; ++i) {
                    if (i == axis) p[i] = sgn;
                    else p[i] = -1.0 + (2.0 * idx[static_cast<std::size_t>(j++)] + 1.0) / per_face;
                }
                g.dirs.push_back(normalized(p));
                for (std::size_t k = 0; k < idx.size(); ++k) {
                    if (++idx[k] < per_face) break;
                    idx[k] = 0;
                }
            }
        }
    }
    return g;
}

const DirectionGrid& DirectionGrid::standard(int dim) {
    if (dim < kMinDim || dim > kMaxDim) throw InvalidInput("grid dimension must be in [2, 6]");
    static const std::array<DirectionGrid, kMaxDim - kMinDim + 1> grids = [] {
        constexpr std::array<int, kMaxDim - kMinDim + 1> per_face{1024, 48, 12, 6, 4};
        std::array<DirectionGrid, kMaxDim - kMinDim + 1> out;
        for (int d = kMinDim; d <= kMaxDim; ++d)
            out[static_cast<std::size_t>(d - kMinDim)] = cube_sphere(d, per_face[static_cast<std::size_t>(d - kMinDim)]);
        return out;
    }();
    return grids[static_cast<std::size_t>(dim - kMinDim)];
}

MinimalCap minimal_cap(const Body& body, const Point& x, bool force_search) {
    if (x.dim() != body.dim()) throw InvalidInput("minimal_cap: dimension mismatch");
    if (!body.contains(x)) throw InvalidInput("minimal_cap: point outside the body");
    const int d = body.dim();
    MinimalCap out;
    if (body.smooth() && !force_search) {
        // The map to the ball preserves volumes and caps, and in the ball the
        // radial cap is minimal.
        const double h = std::min(1.0, relative_radius(body, x));
        out.volume = ball_cap_fraction(d, h);
        Point u(d);
        if (h > 0.0) {
            const auto& axes = body.semi_axes();
            for (int i = 0; i < d; ++i) u[i] = x[i] / (axes[static_cast<std::size_t>(i)] * axes[static_cast<std::size_t>(i)]);
            u = normalized(u);
        } else {
            u[0] = 1.0;
        }
        out.direction = u;
        return out;
    }

    const DirectionGrid& grid = DirectionGrid::standard(d);
    std::vector<std::pair<double, Point>> candidates;
    candidates.reserve(grid.dirs.size() + 16);
    for (const Point& u : grid.dirs) candidates.emplace_back(cap_through(body, u, x), u);
    for (const Point& u : body.facet_normals()) candidates.emplace_back(cap_through(body, u, x), u);
    const Point c = body.center();
    for (const Point& v : body.vertices()) {
        const Point u = normalized(v - c);
        candidates.emplace_back(cap_through(body, u, x), u);
    }
    if (norm(x - c) > 1e-12) {
        const Point u = normalized(x - c);
        candidates.emplace_back(cap_through(body, u, x), u);
    }
    const auto k = std::min<std::size_t>(kDescentStarts, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    out.volume = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        Point u = candidates[i].second;
        const double v = descend(body, x, u, candidates[i].first, grid.covering_angle);
        if (v < out.volume) {
            out.volume = v;
            out.direction = u;
        }
    }
    out.resolution = grid.covering_angle;
    return out;
}

double minimal_cap_volume(const Body& body, const Point& x) { return minimal_cap(body, x).volume; }

FloatingBodyOracle::FloatingBodyOracle(Body body, double eps, bool force_search, int grid_per_face)
    : body_(std::move(body)), eps_(eps), exact_(body_.smooth() && !force_search) {
    check_eps(eps, 0.5);
    const int d = body_.dim();
    if (body_.smooth()) {
        rho_ = ball_height_for(d, eps);
        reach_ = *std::max_element(body_.semi_axes().begin(), body_.semi_axes().end());
    } else {
        const Point c = body_.center();
        for (const Point& v : body_.vertices()) reach_ = std::max(reach_, norm(v - c));
    }
    if (exact_) return;
    grid_ = grid_per_face > 0 ? DirectionGrid::cube_sphere(d, grid_per_face) : DirectionGrid::standard(d);
    offsets_.reserve(grid_.dirs.size());
    for (const Point& g : grid_.dirs) offsets_.push_back(body_.cap_for_volume(g, eps).offset);
}

void FloatingBodyOracle::check_inside(const Point& x) const {
    if (x.dim() != body_.dim()) throw InvalidInput("floating body: dimension mismatch");
    if (!body_.contains(x)) throw InvalidInput("floating body: point outside the body");
}

double FloatingBodyOracle::min_cap(const Point& x) const { return minimal_cap(body_, x, !exact_).volume; }

bool FloatingBodyOracle::refine_member(const Point& x) const { return minimal_cap(body_, x, true).volume >= eps_; }

bool FloatingBodyOracle::in_floating_body(const Point& x) const {
    check_inside(x);
    if (exact_) return relative_radius(body_, x) <= rho_;
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        slack = std::min(slack, offsets_[i] - dot(grid_.dirs[i], x));
        if (slack < 0.0) return false;  // x lies in a grid eps-cap
    }
    if (slack >= 2.0 * reach_ * grid_.covering_angle) return true;
    return refine_member(x);
}

bool FloatingBodyOracle::segment_interval(const Point& x, const Point& y, double shrink, double& lo, double& hi) const {
    lo = 0.0;
    hi = 1.0;
    const Point dir = y - x;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const double a = dot(grid_.dirs[i], dir);
        const double b = offsets_[i] - shrink - dot(grid_.dirs[i], x);
        if (a > 0.0) hi = std::min(hi, b / a);
        else if (a < 0.0) lo = std::max(lo, b / a);
        else if (b < 0.0) return false;
        if (lo > hi) return false;
    }
    return true;
}

bool FloatingBodyOracle::sees(const Point& x, const Point& y) const {
    check_inside(y);
    if (in_floating_body(x)) throw InvalidInput("sees: x lies in the floating body");
    if (exact_) {
        // Distance from the centre to the segment, in ball coordinates.
        const int d = body_.dim();
        const auto& axes = body_.semi_axes();
        Point a(d), b(d);
        for (int i = 0; i < d; ++i) {
            a[i] = x[i] / axes[static_cast<std::size_t>(i)];
            b[i] = y[i] / axes[static_cast<std::size_t>(i)];
        }
        const Point ab = b - a;
        const double len2 = dot(ab, ab);
        double s = len2 > 0.0 ? -dot(a, ab) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        return norm(a + s * ab) > rho_;
    }
    double lo = 0.0, hi = 0.0;
    if (!segment_interval(x, y, 0.0, lo, hi)) return true;  // misses the outer polytope
    double ilo = 0.0, ihi = 0.0;
    if (segment_interval(x, y, 2.0 * reach_ * grid_.covering_angle, ilo, ihi)) return false;
    // Ambiguous band. Along a line the minimal cap is quasi-concave (its
    // superlevel sets are floating bodies, hence convex), so a scan followed
    // by golden-section search finds its maximum on [lo, hi].
    const Point dir = y - x;
    auto f = [&](double s) { return minimal_cap(body_, x + s * dir, true).volume; };
    constexpr int kScan = 64;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i <= kScan; ++i) {
        const double v = f(lo + (hi - lo) * i / kScan);
        if (v >= eps_) return false;
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(0, best - 1) / kScan;
    double b = lo + (hi - lo) * std::min(kScan, best + 1) / kScan;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - r * (b - a), c2 = a + r * (b - a);
    double f1 = f(c1), f2 = f(c2);
    for (int it = 0; it < 40 && b - a > 1e-10; ++it) {
        if (std::max(f1, f2) >= eps_) return false;
        if (f1 > f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - r * (b - a);
            f1 = f(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + r * (b - a);
            f2 = f(c2);
        }
    }
    return std::max(f1, f2) < eps_;
}

Estimate visibility_volume(const FloatingBodyOracle& oracle, const Point& x, std::int64_t samples, RngStream& rng) {
    if (samples < 1) throw InvalidInput("visibility_volume needs at least one sample");
    if (oracle.in_floating_body(x)) throw InvalidInput("visibility_volume: x lies in the floating body");
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < samples; ++i)
        if (oracle.sees(x, sample_uniform(oracle.body(), rng))) ++hits;
    return proportion(hits, samples);
}

GEpsilon g_epsilon(const Body& body, double eps, int probes, RngStream& rng, std::int64_t samples_per_probe) {
    if (probes < 1) throw InvalidInput("g_epsilon needs at least one probe");
    check_eps(eps, 0.5);
    const FloatingBodyOracle oracle(body, eps);
    const Point c = body.center();
    GEpsilon out;
    out.probes = probes;
    out.best.mean = -1.0;
    for (int i = 0; i < probes; ++i) {
        // Pull the boundary hit a hair inward so rounding keeps it in K.
        const Point b = boundary_point(body, sample_direction(body.dim(), rng));
        const Point x = c + (1.0 - 1e-12) * (b - c);
        const Estimate e = visibility_volume(oracle, x, samples_per_probe, rng);
        if (e.mean > out.best.mean) {
            out.best = e;
            out.argmax = x;
        }
    }
    return out;
}

Estimate wet_part_volume(const Body& body, double eps, std::int64_t samples, std::uint64_t seed) {
    check_eps(eps, 0.5);
    if (body.smooth()) {
        // F_eps is the concentric ball (ellipsoid) scaled by rho.
        Estimate e;
        e.mean = 1.0 - std::pow(ball_height_for(body.dim(), eps), body.dim());
        return e;
    }
    if (samples < 1) throw InvalidInput("wet_part_volume needs at least one sample");
    const FloatingBodyOracle oracle(body, eps);
    RngStream rng(seed, 0, lanes::auxiliary);
    std::int64_t wet = 0;
    for (std::int64_t i = 0; i < samples; ++i)
        if (!oracle.in_floating_body(sample_uniform(body, rng))) ++wet;
    return proportion(wet, samples);
}

double epsilon_star(double n, double nu) {
    if (!(n >= 2.0)) throw InvalidInput("epsilon_star needs n >= 2");
    if (!(nu > 0.0)) throw InvalidInput("epsilon_star needs nu > 0");
    return nu * std::log(n) / n;
}

Estimate WideScan::volume(int k) const {
    if (k < 0) throw InvalidInput("wideness k must be non-negative");
    if (static_cast<std::size_t>(k) >= at_least.size()) return proportion(0, samples);
    return proportion(at_least[static_cast<std::size_t>(k)], samples);
}

WideScan wide_scan(const Hull& hull, const Body& body, std::int64_t samples, RngStream& rng) {
    if (samples < 1) throw InvalidInput("wide_scan needs at least one sample");
    if (hull.dim() != body.dim()) throw InvalidInput("wide_scan: dimension mismatch");
    std::vector<std::int64_t> hist;
    WideScan out;
    out.samples = samples;
    for (std::int64_t i = 0; i < samples; ++i) {
        const auto w = hull.visible_vertex_count(sample_uniform(body, rng));
        if (static_cast<std::size_t>(w) >= hist.size()) hist.resize(static_cast<std::size_t>(w) + 1, 0);
        ++hist[static_cast<std::size_t>(w)];
        out.max_wideness = std::max(out.max_wideness, w);
    }
    out.at_least.assign(hist.size(), 0);
    std::int64_t acc = 0;
    for (std::size_t k = hist.size(); k-- > 0;) {
        acc += hist[k];
        out.at_least[k] = acc;
    }
    return out;
}

Estimate wide_volume_estimate(const Hull& hull, const Body& body, int k, std::int64_t samples, RngStream& rng,
                              std::int64_t* max_wideness) {
    if (k < 1) throw InvalidInput("wideness k must be at least 1");
    const WideScan scan = wide_scan(hull, body, samples, rng);
    if (max_wideness != nullptr) *max_wideness = scan.max_wideness;
    return scan.volume(k);
}

CapCover build_cap_cover(const Body& body, double n, double c0, RngStream& rng, std::optional<double> c2) {
    if (!(n >= 2.0)) throw InvalidInput("cap cover needs n >= 2");
    if (!(c0 > 0.0)) throw InvalidInput("cap cover needs c0 > 0");
    const int d = body.dim();
    const double logn_n = std::log(n) / n;
    CapCover cover;
    cover.c0 = c0;
    cover.wet_level = c0 * logn_n;
    if (!(cover.wet_level < 0.5)) throw InvalidInput("cap cover: c0 log n / n must be below 1/2");
    auto angle_of = [d](double a) { return std::acos(ball_height_for(d, a)); };
    const double phi0 = angle_of(cover.wet_level);
    double phi2 = 0.0;
    if (c2) {
        cover.c2 = *c2;
        cover.cap_volume = *c2 * logn_n;
        if (!(cover.cap_volume > 0.0 && cover.cap_volume < 0.5))
            throw InvalidInput("cap cover: c2 log n / n must lie in (0, 1/2)");
        phi2 = angle_of(cover.cap_volume);
        if (phi2 <= 2.0 * phi0) throw InvalidInput("cap cover: c2 too small for the caps to contain the seen regions");
    } else {
        phi2 = 2.25 * phi0;
        if (phi2 >= 0.5 * std::numbers::pi) throw InvalidInput("cap cover: infeasible, cover caps would reach volume 1/2");
        cover.cap_volume = ball_cap_fraction(d, std::cos(phi2));
        cover.c2 = cover.cap_volume / logn_n;
    }
    cover.net_angle = phi2 - 2.0 * phi0;
    const double k = std::ceil(std::sqrt(static_cast<double>(d - 1)) / cover.net_angle);
    if (2.0 * d * std::pow(k, d - 1) > 2e6) throw InvalidInput("cap cover: net would exceed 2e6 caps");
    const DirectionGrid net = DirectionGrid::cube_sphere(d, static_cast<int>(k));
    const auto q = random_orthonormal(d, rng);
    cover.caps.reserve(net.dirs.size());
    for (const Point& w0 : net.dirs) {
        Point u = random_rotation_apply(q, w0);
        if (body.smooth()) {
            // Ball-coordinate normal w becomes A^-T w in the body.
            const auto& axes = body.semi_axes();
            for (int i = 0; i < d; ++i) u[i] /= axes[static_cast<std::size_t>(i)];
        }
        cover.caps.push_back(body.cap_for_volume(normalized(u), cover.cap_volume));
    }
    cover.c1 = std::log(static_cast<double>(cover.caps.size())) / std::log(n);
    return cover;
}

bool cover_holds_seen_region(const CapCover& cover, const FloatingBodyOracle& oracle, const Point& x,
                             std::int64_t samples, RngStream& rng) {
    if (std::fabs(oracle.eps() - cover.wet_level) > 1e-12 * cover.wet_level)
        throw InvalidInput("cover check: oracle level differs from the cover's wet level");
    std::vector<Point> seen{x};
    for (std::int64_t i = 0; i < samples; ++i) {
        const Point y = sample_uniform(oracle.body(), rng);
        if (oracle.sees(x, y)) seen.push_back(y);
    }
    for (const Cap& cap : cover.caps) {
        bool all = true;
        for (const Point& y : seen) {
            if (dot(cap.direction, y) < cap.offset) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

}  // namespace rpoly
