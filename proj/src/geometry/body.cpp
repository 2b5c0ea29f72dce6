#include "rpoly/body.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace rpoly {

namespace {

constexpr double kUnitTolerance = 1e-9;

double unit_ball_volume(int d) {
    return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0));
}

double factorial(int d) {
    double f = 1.0;
    for (int i = 2; i <= d; ++i) f *= i;
    return f;
}

void check_unit(const Point& u) {
    const double n = norm(u);
    if (!(std::fabs(n - 1.0) <= kUnitTolerance)) throw InvalidInput("direction must be a unit vector");
}

void check_body_dim(int dim) {
    if (dim < kMinDim || dim > kMaxDim) throw InvalidInput("body dimension must be in [2, 6]");
}

}  // namespace

std::string_view to_string(BodyKind kind) noexcept {
    switch (kind) {
        case BodyKind::ball: return "ball";
        case BodyKind::cube: return "cube";
        case BodyKind::simplex: return "simplex";
        case BodyKind::ellipsoid: return "ellipsoid";
    }
    return "?";
}

BodyKind parse_body_kind(std::string_view name) {
    if (name == "ball") return BodyKind::ball;
    if (name == "cube") return BodyKind::cube;
    if (name == "simplex") return BodyKind::simplex;
    if (name == "ellipsoid") return BodyKind::ellipsoid;
    throw InvalidInput("unknown body kind '" + std::string(name) + "'");
}

Body Body::ball(int dim) {
    check_body_dim(dim);
    Body b(BodyKind::ball, dim);
    b.scale_ = std::pow(1.0 / unit_ball_volume(dim), 1.0 / dim);
    b.axes_.assign(static_cast<std::size_t>(dim), b.scale_);
    return b;
}

Body Body::cube(int dim) {
    check_body_dim(dim);
    return Body(BodyKind::cube, dim);
}

Body Body::simplex(int dim) {
    check_body_dim(dim);
    Body b(BodyKind::simplex, dim);
    b.scale_ = std::pow(factorial(dim), 1.0 / dim);
    return b;
}

Body Body::ellipsoid(std::vector<double> semi_axes) {
    const int dim = static_cast<int>(semi_axes.size());
    check_body_dim(dim);
    double log_prod = 0.0;
    for (double a : semi_axes) {
        if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("ellipsoid semi-axes must be positive and finite");
        log_prod += std::log(a);
    }
    Body b(BodyKind::ellipsoid, dim);
    b.scale_ = std::exp(-(std::log(unit_ball_volume(dim)) + log_prod) / dim);
    b.axes_.reserve(semi_axes.size());
    for (double a : semi_axes) b.axes_.push_back(a * b.scale_);
    b.params_ = std::move(semi_axes);
    return b;
}

Body Body::make(BodyKind kind, int dim, const std::vector<double>& params) {
    switch (kind) {
        case BodyKind::ball:
        case BodyKind::cube:
        case BodyKind::simplex:
            if (!params.empty()) throw InvalidInput(std::string(to_string(kind)) + " takes no params");
            return kind == BodyKind::ball ? ball(dim) : kind == BodyKind::cube ? cube(dim) : simplex(dim);
        case BodyKind::ellipsoid:
            if (static_cast<int>(params.size()) != dim)
                throw InvalidInput("ellipsoid needs one semi-axis per dimension");
            return ellipsoid(params);
    }
    throw InvalidInput("unknown body kind");
}

double Body::analytic_volume() const {
    switch (kind_) {
        case BodyKind::ball: return unit_ball_volume(dim_) * std::pow(scale_, dim_);
        case BodyKind::cube: return 1.0;
        case BodyKind::simplex: return std::pow(scale_, dim_) / factorial(dim_);
        case BodyKind::ellipsoid: {
            double v = unit_ball_volume(dim_);
            for (double a : axes_) v *= a;
            return v;
        }
    }
    return 0.0;
}

Point Body::center() const {
    Point c(dim_);
    for (int i = 0; i < dim_; ++i) {
        if (kind_ == BodyKind::cube) c[i] = 0.5;
        else if (kind_ == BodyKind::simplex) c[i] = scale_ / (dim_ + 1);
    }
    return c;
}

Point Body::box_lo() const {
    Point p(dim_);
    if (smooth())
        for (int i = 0; i < dim_; ++i) p[i] = -axes_[static_cast<std::size_t>(i)];
    return p;
}

Point Body::box_hi() const {
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) p[i] = smooth() ? axes_[static_cast<std::size_t>(i)] : kind_ == BodyKind::cube ? 1.0 : scale_;
    return p;
}

std::vector<Point> Body::vertices() const {
    std::vector<Point> out;
    if (kind_ == BodyKind::cube) {
        for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
            Point v(dim_);
            for (int i = 0; i < dim_; ++i) v[i] = (mask >> i) & 1u ? 1.0 : 0.0;
            out.push_back(v);
        }
    } else if (kind_ == BodyKind::simplex) {
        out.emplace_back(dim_);
        for (int i = 0; i < dim_; ++i) {
            Point v(dim_);
            v[i] = scale_;
            out.push_back(v);
        }
    }
    return out;
}

std::vector<Point> Body::facet_normals() const {
    std::vector<Point> out;
    if (kind_ == BodyKind::cube) {
        for (int i = 0; i < dim_; ++i) {
            Point a(dim_), b(dim_);
            a[i] = 1.0;
            b[i] = -1.0;
            out.push_back(a);
            out.push_back(b);
        }
    } else if (kind_ == BodyKind::simplex) {
        for (int i = 0; i < dim_; ++i) {
            Point a(dim_);
            a[i] = -1.0;
            out.push_back(a);
        }
        Point diag(dim_);
        for (int i = 0; i < dim_; ++i) diag[i] = 1.0 / std::sqrt(static_cast<double>(dim_));
        out.push_back(diag);
    }
    return out;
}

void Body::check_dim(const Point& x) const {
    if (x.dim() != dim_) throw InvalidInput("point dimension does not match body dimension");
}

bool Body::contains(const Point& x) const {
    check_dim(x);
    switch (kind_) {
        case BodyKind::ball: return dot(x, x) <= scale_ * scale_;
        case BodyKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double q = x[i] / axes_[static_cast<std::size_t>(i)];
                s += q * q;
            }
            return s <= 1.0;
        }
        case BodyKind::cube:
            for (int i = 0; i < dim_; ++i)
                if (x[i] < 0.0 || x[i] > 1.0) return false;
            return true;
        case BodyKind::simplex: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                if (x[i] < 0.0) return false;
                s += x[i];
            }
            return s <= scale_;
        }
    }
    return false;
}

double Body::support(const Point& v) const {
    check_dim(v);
    const Point u = normalized(v);
    switch (kind_) {
        case BodyKind::ball: return scale_;
        case BodyKind::ellipsoid: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double q = axes_[static_cast<std::size_t>(i)] * u[i];
                s += q * q;
            }
            return std::sqrt(s);
        }
        case BodyKind::cube: {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) s += std::max(u[i], 0.0);
            return s;
        }
        case BodyKind::simplex: {
            double m = 0.0;
            for (int i = 0; i < dim_; ++i) m = std::max(m, u[i]);
            return scale_ * m;
        }
    }
    return 0.0;
}

double Body::cap_volume(const Point& u, double t) const {
    check_dim(u);
    check_unit(u);
    switch (kind_) {
        case BodyKind::ball: return ball_cap_fraction(dim_, t / scale_);
        case BodyKind::ellipsoid: {
            // The affine map z -> diag(axes) z takes the unit ball onto K and
            // the cap {u.y >= t} onto {(A u).z >= t}; volume ratios are preserved.
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double q = axes_[static_cast<std::size_t>(i)] * u[i];
                s += q * q;
            }
            return ball_cap_fraction(dim_, t / std::sqrt(s));
        }
        case BodyKind::cube: return cube_cap_volume(u, t);
        case BodyKind::simplex: return simplex_cap_volume(u, t, scale_);
    }
    return 0.0;
}

Cap Body::cap_for_volume(const Point& u, double eps) const {
    check_dim(u);
    check_unit(u);
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("cap volume must lie in (0, 1)");
    Point neg = -1.0 * u;
    double lo = -support(neg);
    double hi = support(u);
    // cap_volume is non-increasing in the offset: volume(lo) = 1 > eps > 0 = volume(hi).
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cap_volume(u, mid) > eps) lo = mid;
        else hi = mid;
    }
    const double vlo = cap_volume(u, lo);
    const double vhi = cap_volume(u, hi);
    Cap cap{u, hi, vhi};
    if (std::fabs(vlo - eps) < std::fabs(vhi - eps)) cap = Cap{u, lo, vlo};
    return cap;
}

double ball_cap_fraction(int dim, double h) {
    if (std::isnan(h)) throw InvalidInput("cap offset is NaN");
    if (h >= 1.0) return 0.0;
    if (h <= -1.0) return 1.0;
    const double a = 0.5 * (dim + 1);
    const double x = (1.0 - std::fabs(h)) * (1.0 + std::fabs(h));
    const double half = 0.5 * boost::math::ibeta(a, 0.5, x);
    return h >= 0.0 ? half : 1.0 - half;
}

namespace {

// Vol{x in [0,1]^k : w . x <= s} for strictly positive weights w.
double cube_lower_volume(std::span<const double> w, double s) {
    const int k = static_cast<int>(w.size());
    double wsum = 0.0;
    double wprod = 1.0;
    for (double v : w) {
        wsum += v;
        wprod *= v;
    }
    if (s <= 0.0) return 0.0;
    if (s >= wsum) return 1.0;
    const double norm_factor = factorial(k) * wprod;
    double sum = 0.0;
    double abs_sum = 0.0;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        double wv = 0.0;
        int bits = 0;
        for (int i = 0; i < k; ++i)
            if ((mask >> i) & 1u) {
                wv += w[static_cast<std::size_t>(i)];
                ++bits;
            }
        const double r = s - wv;
        if (r <= 0.0) continue;
        const double term = std::pow(r, k);
        sum += bits % 2 ? -term : term;
        abs_sum += term;
    }
    const double condition = abs_sum / norm_factor;
    if (std::isfinite(condition) && norm_factor > 0.0 && condition * (1u << k) < 250.0)
        return std::clamp(sum / norm_factor, 0.0, 1.0);

    // Exact rational evaluation of the same alternating sum.
    std::array<mpq_class, kMaxDim> wq;
    mpq_class sq(s);
    mpq_class denom(1);
    for (int i = 0; i < k; ++i) {
        wq[static_cast<std::size_t>(i)] = mpq_class(w[static_cast<std::size_t>(i)]);
        denom *= wq[static_cast<std::size_t>(i)] * (i + 1);
    }
    mpq_class total(0);
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        mpq_class r = sq;
        int bits = 0;
        for (int i = 0; i < k; ++i)
            if ((mask >> i) & 1u) {
                r -= wq[static_cast<std::size_t>(i)];
                ++bits;
            }
        if (sgn(r) <= 0) continue;
        mpq_class p(1);
        for (int i = 0; i < k; ++i) p *= r;
        if (bits % 2) total -= p;
        else total += p;
    }
    total /= denom;
    return std::clamp(total.get_d(), 0.0, 1.0);
}

}  // namespace

double cube_cap_volume(const Point& u, double t) {
    // Reflect negative coordinates (x -> 1 - x) and drop zero weights.
    std::array<double, kMaxDim> w{};
    int k = 0;
    double s = t;
    for (int i = 0; i < u.dim(); ++i) {
        if (u[i] > 0.0) {
            w[static_cast<std::size_t>(k++)] = u[i];
        } else if (u[i] < 0.0) {
            w[static_cast<std::size_t>(k++)] = -u[i];
            s -= u[i];
        }
    }
    if (k == 0) return s <= 0.0 ? 1.0 : 0.0;
    const std::span<const double> ws(w.data(), static_cast<std::size_t>(k));
    double wsum = 0.0;
    for (double v : ws) wsum += v;
    // Vol{w.x >= s} = Vol{w.x' <= wsum - s}; evaluate whichever side touches fewer corners.
    if (s > 0.5 * wsum) return cube_lower_volume(ws, wsum - s);
    return 1.0 - cube_lower_volume(ws, s);
}

namespace {

// P(V <= tau) where V has the B-spline density with sorted knots t_0..t_d.
double bspline_cdf(std::span<const double> knots, double tau) {
    const int d = static_cast<int>(knots.size()) - 1;
    if (tau < knots.front()) return 0.0;
    if (tau >= knots.back()) return 1.0;
    std::array<double, 2 * kMaxDim + 2> t{};
    for (int j = 0; j <= d; ++j) t[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(j)];
    const double pad = knots.back() + 1.0;
    for (int j = d + 1; j <= 2 * d + 1; ++j) t[static_cast<std::size_t>(j)] = pad;
    std::array<double, 2 * kMaxDim + 1> n{};
    for (int j = 0; j <= 2 * d; ++j)
        n[static_cast<std::size_t>(j)] = (t[static_cast<std::size_t>(j)] <= tau && tau < t[static_cast<std::size_t>(j + 1)]) ? 1.0 : 0.0;
    // Cox-de Boor; zero-length knot spans contribute nothing.
    for (int k = 2; k <= d + 1; ++k) {
        for (int j = 0; j <= 2 * d + 1 - k; ++j) {
            const auto J = static_cast<std::size_t>(j);
            const auto K = static_cast<std::size_t>(k);
            double v = 0.0;
            const double left = t[J + K - 1] - t[J];
            if (left > 0.0) v += (tau - t[J]) / left * n[J];
            const double right = t[J + K] - t[J + 1];
            if (right > 0.0) v += (t[J + K] - tau) / right * n[J + 1];
            n[J] = v;
        }
    }
    double cdf = 0.0;
    for (int j = 0; j <= d; ++j) cdf += n[static_cast<std::size_t>(j)];
    return std::clamp(cdf, 0.0, 1.0);
}

}  // namespace

double simplex_cap_volume(const Point& u, double t, double leg) {
    const int d = u.dim();
    std::array<double, kMaxDim + 1> a{};
    std::array<double, kMaxDim + 1> neg{};
    for (int i = 0; i < d; ++i) {
        a[static_cast<std::size_t>(i + 1)] = leg * u[i];
        neg[static_cast<std::size_t>(i + 1)] = -leg * u[i];
    }
    std::sort(a.begin(), a.begin() + d + 1);
    std::sort(neg.begin(), neg.begin() + d + 1);
    // Small caps are evaluated from the lower tail of -u.X for accuracy.
    const double lower = bspline_cdf({neg.data(), static_cast<std::size_t>(d + 1)}, -t);
    if (lower <= 0.5) return lower;
    return 1.0 - bspline_cdf({a.data(), static_cast<std::size_t>(d + 1)}, t);
}

}  // namespace rpoly
