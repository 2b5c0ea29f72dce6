#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rpoly/body.hpp"
#include "rpoly/hull.hpp"
#include "rpoly/predicates.hpp"
#include "rpoly/rng.hpp"
#include "rpoly/sampling.hpp"
#include "rpoly/stats.hpp"

using namespace rpoly;

namespace {

Point integer_point(int dim, RngStream& rng) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p[i] = std::floor(rng.uniform() * 101.0) - 50.0;
    return p;
}

std::vector<Body> all_bodies(int dim) {
    std::vector<double> axes(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) axes[static_cast<std::size_t>(i)] = 1.0 + 0.5 * i;
    return {Body::ball(dim), Body::cube(dim), Body::simplex(dim), Body::ellipsoid(axes)};
}

// Facets as sorted coordinate lists, independent of point numbering.
std::vector<std::vector<std::vector<double>>> facet_coords(const Hull& h) {
    std::vector<std::vector<std::vector<double>>> out;
    for (const auto& f : h.facet_sets()) {
        std::vector<std::vector<double>> c;
        for (auto v : f) c.emplace_back(h.point(v).coords().begin(), h.point(v).coords().end());
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("orientation flips under a swap and ignores integer translations") {
    RngStream rng(31, 0);
    for (int dim = 2; dim <= 6; ++dim) {
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<Point> s;
            for (int i = 0; i <= dim; ++i) s.push_back(integer_point(dim, rng));
            const int o = orientation(s);
            std::vector<Point> swapped = s;
            std::swap(swapped[0], swapped[1]);
            CHECK(orientation(swapped) == -o);
            const Point shift = integer_point(dim, rng);
            std::vector<Point> moved = s;
            for (auto& p : moved)
                for (int i = 0; i < dim; ++i) p[i] += shift[i];
            CHECK(orientation(moved) == o);
        }
    }
}

TEST_CASE("cap volume is non-increasing in the offset") {
    RngStream rng(32, 0);
    for (int dim = 2; dim <= 4; ++dim) {
        for (const Body& body : all_bodies(dim)) {
            for (int rep = 0; rep < 10; ++rep) {
                const Point u = sample_direction(dim, rng);
                Point minus_u(dim);
                for (int i = 0; i < dim; ++i) minus_u[i] = -u[i];
                const double lo = -body.support(minus_u);
                const double hi = body.support(u);
                double prev = 1.0 + 1e-12;
                for (int k = 0; k <= 50; ++k) {
                    const double t = lo + (hi - lo) * k / 50.0;
                    const double v = body.cap_volume(u, t);
                    CHECK(v >= -1e-12);
                    CHECK(v <= prev + 1e-12);
                    prev = v;
                }
                CHECK(prev == doctest::Approx(0.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("bounding-box hit rate equals the inverse box volume") {
    RngStream rng(33, 0);
    for (const Body& body : all_bodies(3)) {
        const Point lo = body.box_lo(), hi = body.box_hi();
        double box = 1.0;
        for (int i = 0; i < 3; ++i) box *= hi[i] - lo[i];
        const int draws = 200000;
        int hits = 0;
        for (int k = 0; k < draws; ++k) {
            Point x(3);
            for (int i = 0; i < 3; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
            hits += body.contains(x) ? 1 : 0;
        }
        const double p = 1.0 / box;
        const double sigma = std::sqrt(p * (1 - p) / draws);
        CHECK(std::fabs(hits / static_cast<double>(draws) - p) < 4 * sigma + 1e-12);
    }
}

TEST_CASE("visibility from outside the unit square") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Hull h = Hull::build(sq);
    CHECK(h.visible_facets(Point{2, 0.5}).size() == 1);
    CHECK(h.visible_vertex_count(Point{2, 0.5}) == 2);
    CHECK(h.visible_facets(Point{2, 2}).size() == 2);
    CHECK(h.visible_vertex_count(Point{2, 2}) == 3);
    CHECK(h.visible_facets(Point{0.5, 0.5}).empty());
    CHECK(h.visible_vertex_count(Point{0.5, 0.5}) == 0);
    // A point on an edge's line sees nothing.
    CHECK(h.visible_vertex_count(Point{0.5, 1}) == 0);
    CHECK(h.contains(Point{0.5, 1}));
}

TEST_CASE("adding the fourth corner to a right triangle") {
    const std::vector<Point> tri{{0, 0}, {1, 0}, {0, 1}};
    Hull h = Hull::build(tri);
    const InsertionDelta d = h.insert(Point{1, 1});
    CHECK(d.inserted);
    CHECK(d.volume_gain == doctest::Approx(0.5));
    CHECK(d.visible_vertex_count == 2);
    CHECK(d.destroyed[0] == 0);
    CHECK(d.destroyed[1] == 1);
    CHECK(d.created[0] == 1);
    CHECK(d.created[1] == 2);
    CHECK(h.volume() == doctest::Approx(1.0));
}

TEST_CASE("incremental insertion equals a batch build") {
    for (int dim = 2; dim <= 4; ++dim) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            RngStream rng(34, seed);
            const auto pts = sample_uniform(Body::ball(dim), 60, rng);
            Hull inc = Hull::build(std::span<const Point>(pts.data(), 12));
            for (std::size_t i = 12; i < pts.size(); ++i) inc.insert(pts[i]);
            const Hull batch = Hull::build(pts);
            CHECK(facet_coords(inc) == facet_coords(batch));
            CHECK(inc.volume() == doctest::Approx(batch.volume()).epsilon(1e-12));
            CHECK(inc.valid());
        }
    }
}

TEST_CASE("some insertions remove several vertices at once") {
    RngStream rng(35, 0);
    const Body disk = Body::ball(2);
    const auto first = sample_uniform(disk, 3, rng);
    Hull h = Hull::build(first);
    int multi = 0;
    for (int i = 0; i < 10000; ++i) {
        const InsertionDelta d = h.insert(sample_uniform(disk, rng));
        if (d.destroyed[0] >= 2) ++multi;
    }
    CHECK(multi >= 1);
    CHECK(h.valid());
}

TEST_CASE("a point sees no vertex exactly when the hull contains it") {
    for (int dim = 2; dim <= 3; ++dim) {
        RngStream rng(36, static_cast<std::uint64_t>(dim));
        const Body ball = Body::ball(dim);
        const Hull h = Hull::build(sample_uniform(ball, 30, rng));
        const double r = ball.scale() * 1.5;
        for (int k = 0; k < 5000; ++k) {
            Point x(dim);
            for (int i = 0; i < dim; ++i) x[i] = (2 * rng.uniform() - 1) * r;
            CHECK((h.visible_vertex_count(x) == 0) == h.contains(x));
        }
    }
}

TEST_CASE("one insertion into a 3d hull matches the oracle on all points") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream rng(37, seed);
        const Body body = seed % 2 == 0 ? Body::cube(3) : Body::ball(3);
        auto pts = sample_uniform(body, 25, rng);
        Hull h = Hull::build(pts);
        // Push the extra point outward half the time so it changes the hull.
        Point extra = sample_uniform(body, rng);
        if (seed % 4 < 2)
            for (int i = 0; i < 3; ++i) extra[i] = body.center()[i] + 1.5 * (extra[i] - body.center()[i]);
        h.insert(extra);
        pts.push_back(extra);
        const Hull oracle = brute_force_hull(pts);
        CHECK(facet_coords(h) == facet_coords(oracle));
        CHECK(h.volume() == doctest::Approx(oracle.compute_volume()).epsilon(1e-12));
    }
}

TEST_CASE("poisson pmf at zero and moments") {
    RngStream rng(38, 0);
    const int draws = 1000000;
    int zeros = 0;
    for (int i = 0; i < draws; ++i) zeros += sample_poisson_count(4.0, rng) == 0 ? 1 : 0;
    const double p0 = std::exp(-4.0);
    CHECK(std::fabs(zeros / static_cast<double>(draws) - p0) < 3 * std::sqrt(p0 * (1 - p0) / draws));

    RngStream rng2(38, 1);
    const int m = 100000;
    std::vector<double> v(m);
    for (auto& x : v) x = static_cast<double>(sample_poisson_count(100.0, rng2));
    const Summary s = summarize(v);
    CHECK(std::fabs(s.mean - 100.0) < 3 * std::sqrt(100.0 / m));
    // Var of the sample variance for Poisson(mu) is about (mu + 2 mu^2) / m.
    CHECK(std::fabs(s.variance - 100.0) < 3 * std::sqrt((100.0 + 2 * 100.0 * 100.0) / m));
}

TEST_CASE("poisson counts concentrate within A sqrt(n log n)") {
    RngStream rng(39, 0);
    const double n = 1e4;
    const double band = 4.0 * std::sqrt(n * std::log(n));
    int outside = 0;
    for (int i = 0; i < 100000; ++i)
        if (std::fabs(static_cast<double>(sample_poisson_count(n, rng)) - n) >= band) ++outside;
    CHECK(outside / 1e5 <= 1e-4);
}

TEST_CASE("coupled samples have the law of fresh samples") {
    const Body disk = Body::ball(2);
    const int trials = 10000;
    std::vector<double> coupled(trials), fresh(trials);
    for (int t = 0; t < trials; ++t) {
        RngStream a(40, static_cast<std::uint64_t>(t), lanes::points);
        const CoupledPair cp = coupled_pair(disk, 150, 200, a);
        std::vector<Point> all = cp.p;
        all.insert(all.end(), cp.q.begin(), cp.q.end());
        coupled[static_cast<std::size_t>(t)] = Hull::build(all).volume();
        RngStream b(40, static_cast<std::uint64_t>(t), lanes::independent);
        fresh[static_cast<std::size_t>(t)] = Hull::build(sample_uniform(disk, 200, b)).volume();
    }
    CHECK(ks_two_sample(coupled, fresh) < ks_two_sample_critical_99(trials, trials));
}
