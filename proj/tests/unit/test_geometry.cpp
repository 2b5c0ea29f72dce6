#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rpoly/body.hpp"
#include "rpoly/error.hpp"
#include "rpoly/predicates.hpp"
#include "rpoly/rng.hpp"
#include "rpoly/sampling.hpp"

using namespace rpoly;

TEST_CASE("orientation of a unit simplex and its mirror") {
    std::vector<Point> s{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(orientation(s) == 1);
    std::swap(s[1], s[2]);
    CHECK(orientation(s) == -1);
}

TEST_CASE("orientation is exact on collinear and nearly collinear input") {
    std::vector<Point> line{{0, 0}, {1, 1}, {3, 3}};
    CHECK(orientation(line) == 0);
    // 1 + 2^-52 is representable; the triangle is positively oriented but tiny.
    const double e = std::ldexp(1.0, -52);
    std::vector<Point> tilt{{0, 0}, {1e10, 1e10}, {1, 1 + e}};
    CHECK(orientation(tilt) == 1);
    std::vector<Point> big{{1e8, 1e8}, {1e8 + 1, 1e8 + 1}, {1e8 + 2, 1e8 + 2}};
    CHECK(orientation(big) == 0);
    std::vector<Point> flat4{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0.25, 0.25, 0.5, 0}};
    CHECK(orientation(flat4) == 0);
}

TEST_CASE("orientation rejects malformed simplices") {
    std::vector<Point> bad{{0, 0}, {1, 0}};
    CHECK_THROWS_AS((void)orientation(bad), InvalidInput);
}

TEST_CASE("bodies have volume one") {
    for (int d = 2; d <= 6; ++d) {
        CHECK(Body::ball(d).analytic_volume() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(Body::cube(d).analytic_volume() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(Body::simplex(d).analytic_volume() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const Body e = Body::ellipsoid({1.0, 2.0, 3.0});
    CHECK(e.analytic_volume() == doctest::Approx(1.0).epsilon(1e-12));
    const auto& ax = e.semi_axes();
    CHECK(4.0 / 3.0 * std::numbers::pi * ax[0] * ax[1] * ax[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ax[1] / ax[0] == doctest::Approx(2.0));
}

TEST_CASE("ball radius") {
    CHECK(Body::ball(2).scale() == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
    CHECK(Body::ball(3).scale() == doctest::Approx(std::cbrt(3.0 / (4.0 * std::numbers::pi))));
}

TEST_CASE("circular segment fraction") {
    // Area of {y_1 >= h} in the unit disk over pi.
    for (double h : {-0.9, -0.3, 0.0, 0.2, 0.5, 0.77, 0.99}) {
        const double oracle = (std::acos(h) - h * std::sqrt(1 - h * h)) / std::numbers::pi;
        CHECK(ball_cap_fraction(2, h) == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(ball_cap_fraction(2, 0.5) == doctest::Approx(0.19550).epsilon(1e-4));
    CHECK(ball_cap_fraction(2, 1.5) == 0.0);
    CHECK(ball_cap_fraction(2, -1.5) == 1.0);
}

TEST_CASE("spherical cap fraction in 3d") {
    for (double h : {-0.5, 0.0, 0.3, 0.9}) {
        const double oracle = (1 - h) * (1 - h) * (2 + h) / 4;
        CHECK(ball_cap_fraction(3, h) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("ball and ellipsoid cap volumes") {
    const Body b = Body::ball(2);
    const Point u = normalized(Point{1, 1});
    const double r = b.scale();
    CHECK(b.cap_volume(u, 0.5 * r) == doctest::Approx(0.19550).epsilon(1e-4));
    CHECK(b.support(u) == doctest::Approx(r));
    // Stretching a disk: caps of the ellipse map to caps of the disk.
    const Body e = Body::ellipsoid({1.0, 4.0});
    const Point ex{1, 0};
    const double a = e.semi_axes()[0];
    CHECK(e.cap_volume(ex, 0.5 * a) == doctest::Approx(0.19550).epsilon(1e-4));
    CHECK(e.support(Point{0, 1}) == doctest::Approx(e.semi_axes()[1]));
}

TEST_CASE("square caps") {
    const Point u = normalized(Point{1, 1});
    for (double s : {0.1, 0.5, 1.0, 1.3, 1.9}) {
        const double t = s / std::sqrt(2.0);
        const double oracle = s <= 1 ? 1 - s * s / 2 : (2 - s) * (2 - s) / 2;
        CHECK(cube_cap_volume(u, t) == doctest::Approx(oracle).epsilon(1e-12));
    }
    CHECK(cube_cap_volume(Point{1, 0}, 0.3) == doctest::Approx(0.7));
    CHECK(cube_cap_volume(Point{-1, 0}, -0.3) == doctest::Approx(0.3));
}

TEST_CASE("cube cap with nearly axis-aligned normal stays accurate") {
    // Vol{x_1 + delta (x_2 + x_3) >= t} = 1 - t + delta while 2 delta <= t <= 1.
    for (double delta : {1e-3, 1e-6, 1e-9}) {
        const Point w{1, delta, delta};
        const double nw = norm(w);
        const Point u = (1.0 / nw) * w;
        const double t = 0.5;
        CHECK(cube_cap_volume(u, t / nw) == doctest::Approx(1 - t + delta).epsilon(1e-9));
    }
    const Point w{1, 1e-7, 1e-7, 1e-7, 1e-7, 1e-7};
    const double nw = norm(w);
    CHECK(cube_cap_volume((1.0 / nw) * w, 0.999 / nw) == doctest::Approx(0.001 + 5 * 0.5e-7).epsilon(1e-8));
}

TEST_CASE("simplex caps including tied knots") {
    const double s = std::sqrt(2.0);
    for (double t : {0.1, 0.7, 1.2}) {
        CHECK(simplex_cap_volume(Point{1, 0}, t, s) == doctest::Approx((s - t) * (s - t) / 2).epsilon(1e-12));
        const double w = t * std::sqrt(2.0);
        if (w < s) CHECK(simplex_cap_volume(normalized(Point{1, 1}), t, s) == doctest::Approx((s * s - w * w) / 2).epsilon(1e-12));
    }
    // 3d, e_1: Vol{x_1 >= t} = (s - t)^3 / 6.
    const double s3 = std::cbrt(6.0);
    CHECK(simplex_cap_volume(Point{1, 0, 0}, 0.4, s3) == doctest::Approx(std::pow(s3 - 0.4, 3) / 6).epsilon(1e-12));
    CHECK(simplex_cap_volume(Point{-1, 0, 0}, -0.4, s3) == doctest::Approx(1 - std::pow(s3 - 0.4, 3) / 6).epsilon(1e-12));
}

TEST_CASE("cap volumes agree with Monte Carlo in d = 4") {
    RngStream rng(11, 0);
    for (BodyKind k : {BodyKind::ball, BodyKind::cube, BodyKind::simplex}) {
        const Body b = Body::make(k, 4);
        const Point u = normalized(Point{0.3, -0.5, 0.7, 0.2});
        const double t = b.support(u) - 0.35 * (b.support(u) + b.support((-1.0) * u));
        const double exact = b.cap_volume(u, t);
        const int n = 200000;
        int hits = 0;
        for (int i = 0; i < n; ++i)
            if (dot(sample_uniform(b, rng), u) >= t) ++hits;
        const double p = static_cast<double>(hits) / n;
        CHECK(std::fabs(p - exact) < 5 * std::sqrt(exact * (1 - exact) / n));
    }
}

TEST_CASE("cap_for_volume inverts cap_volume") {
    for (BodyKind k : {BodyKind::ball, BodyKind::cube, BodyKind::simplex}) {
        for (int d : {2, 3, 5}) {
            const Body b = Body::make(k, d);
            Point u(d);
            for (int i = 0; i < d; ++i) u[i] = 1.0 + i;
            u = normalized(u);
            for (double eps : {1e-4, 0.01, 0.3}) {
                const Cap c = b.cap_for_volume(u, eps);
                CHECK(c.volume == doctest::Approx(eps).epsilon(1e-9));
                CHECK(b.cap_volume(u, c.offset) == doctest::Approx(eps).epsilon(1e-9));
            }
        }
    }
    CHECK_THROWS_AS((void)Body::ball(2).cap_for_volume(Point{1, 0}, 1.5), InvalidInput);
}

TEST_CASE("invalid body construction") {
    CHECK_THROWS_AS(Body::ball(1), InvalidInput);
    CHECK_THROWS_AS(Body::cube(7), InvalidInput);
    CHECK_THROWS_AS(Body::ellipsoid({1.0, -1.0}), InvalidInput);
    CHECK_THROWS_AS(parse_body_kind("torus"), InvalidInput);
    CHECK(parse_body_kind("simplex") == BodyKind::simplex);
    CHECK_THROWS_AS((void)Body::ball(2).support(Point{0, 0}), InvalidInput);
}

TEST_CASE("philox known answers") {
    CHECK(RngStream::philox({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(RngStream::philox({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
}

TEST_CASE("streams are reproducible and separated") {
    RngStream a(5, 17, lanes::points), b(5, 17, lanes::points), c(5, 18, lanes::points), e(5, 17, lanes::probes);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != e());
    }
    RngStream u(1, 0);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        CHECK((v >= 0.0 && v < 1.0));
        sum += v;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("samplers stay inside and match first moments") {
    RngStream rng(3, 0);
    for (BodyKind k : {BodyKind::ball, BodyKind::cube, BodyKind::simplex}) {
        const Body b = Body::make(k, 3);
        const auto pts = sample_uniform(b, 50000, rng);
        Point mean(3);
        for (const Point& p : pts) {
            CHECK(b.contains(p));
            mean = mean + p;
        }
        mean = (1.0 / 50000) * mean;
        const Point c = b.center();
        for (int i = 0; i < 3; ++i) CHECK(std::fabs(mean[i] - c[i]) < 0.01);
    }
    const Body e = Body::ellipsoid({1, 2, 3});
    for (int i = 0; i < 1000; ++i) CHECK(e.contains(sample_uniform(e, rng)));
    for (int i = 0; i < 1000; ++i) CHECK(e.contains(sample_rejection(e, rng)));
}

TEST_CASE("boundary points lie on the boundary") {
    RngStream rng(4, 0);
    for (BodyKind k : {BodyKind::ball, BodyKind::cube, BodyKind::simplex}) {
        const Body b = Body::make(k, 4);
        for (int i = 0; i < 100; ++i) {
            const Point x = boundary_point(b, sample_direction(4, rng));
            const Point c = b.center();
            CHECK(b.contains(c + (1 - 1e-9) * (x - c)));
            CHECK(!b.contains(c + (1 + 1e-9) * (x - c)));
        }
    }
}

TEST_CASE("coupled pair is a prefix of one stream") {
    const Body b = Body::cube(2);
    RngStream r1(9, 2), r2(9, 2);
    const CoupledPair cp = coupled_pair(b, 10, 15, r1);
    const auto all = sample_uniform(b, 15, r2);
    REQUIRE(cp.p.size() == 10);
    REQUIRE(cp.q.size() == 5);
    for (int i = 0; i < 10; ++i) CHECK(cp.p[static_cast<std::size_t>(i)] == all[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 5; ++i) CHECK(cp.q[static_cast<std::size_t>(i)] == all[static_cast<std::size_t>(10 + i)]);
    RngStream r3(9, 2);
    CHECK_THROWS_AS(coupled_pair(b, 10, 5, r3), InvalidInput);
}

TEST_CASE("poisson counts") {
    RngStream rng(8, 0);
    double s = 0, s2 = 0;
    for (int i = 0; i < 20000; ++i) {
        const double k = static_cast<double>(sample_poisson_count(50.0, rng));
        s += k;
        s2 += k * k;
    }
    const double m = s / 20000;
    CHECK(m == doctest::Approx(50.0).epsilon(0.01));
    CHECK(s2 / 20000 - m * m == doctest::Approx(50.0).epsilon(0.05));
    CHECK_THROWS_AS(sample_poisson_count(0.0, rng), InvalidInput);
}
