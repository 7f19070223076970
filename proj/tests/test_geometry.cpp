#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlt/geometry.hpp"
#include "vlt/rng.hpp"

using namespace vlt;

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Independent circle-ray intersection via the explicit quadratic formula:
// the forward intersection where the ray leaves the disk (the larger root,
// clamped at zero for boundary points heading outward).
double exit_oracle(const Vec2& p, const Vec2& d, double R) {
    const double a = d.dot(d);
    const double b = 2.0 * p.dot(d);
    const double c = p.dot(p) - R * R;
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
    return std::max(0.0, (-b + disc) / (2.0 * a));
}

}  // namespace

TEST_CASE("broken ray at the disk center") {
    const BrokenRay br = make_broken_ray(0.0, 1.0, 1.0, kPi / 3.0);
    CHECK(br.base.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(br.base.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(br.u.x == doctest::Approx(-1.0));
    CHECK(br.u.y == doctest::Approx(0.0));
    CHECK(std::abs(br.vertex.x) < 1e-15);
    CHECK(std::abs(br.vertex.y) < 1e-15);
    CHECK(br.v.x == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(br.v.y == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-14));
    CHECK(br.second_leg_exit == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("degenerate first leg starts scattering at the boundary") {
    const BrokenRay br = make_broken_ray(kPi / 2.0, 0.0, 1.0, kPi / 3.0);
    CHECK(br.base.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(br.base.y == doctest::Approx(1.0));
    CHECK(br.vertex.x == doctest::Approx(br.base.x));
    CHECK(br.vertex.y == doctest::Approx(br.base.y));
    CHECK(br.u.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(br.u.y == doctest::Approx(-1.0));
    CHECK(br.v.x == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(br.v.y == doctest::Approx(-0.5));
    // chord length oracle: 2 R cos(theta)
    CHECK(br.second_leg_exit ==
          doctest::Approx(exit_oracle(br.vertex, br.v, 1.0)).epsilon(1e-12));
    CHECK(br.second_leg_exit == doctest::Approx(2.0 * std::cos(kPi / 3.0)).epsilon(1e-12));
}

TEST_CASE("broken ray construction invariants on random parameters") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const double R = rng.uniform(0.3, 3.0);
        const double beta = rng.uniform(-10.0, 10.0);
        const double d = rng.uniform(0.0, 2.0 * R);
        const double theta = rng.uniform(0.05, kPi / 2.0 - 0.05);
        const BrokenRay br = make_broken_ray(beta, d, R, theta);

        CHECK(std::abs(br.u.norm() - 1.0) < 1e-12);
        CHECK(std::abs(br.v.norm() - 1.0) < 1e-12);
        // the ray breaks by the obtuse angle pi - theta: the leg directions
        // u and v enclose theta
        const double ang = std::atan2(cross(br.u, br.v), br.u.dot(br.v));
        CHECK(std::abs(ang - theta) < 1e-12);
        CHECK(std::abs(br.base.norm() - R) < 1e-12 * R);
        CHECK(br.vertex.norm() <= R * (1.0 + 1e-12));
        CHECK(br.second_leg_exit >= 0.0);
        const Vec2 exit_pt = br.vertex + br.second_leg_exit * br.v;
        CHECK(std::abs(exit_pt.norm() - R) < 1e-9);
    }
}

TEST_CASE("2*pi periodicity in beta") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = rng.uniform(0.0, kTwoPi);
        const double d = rng.uniform(0.0, 2.0);
        const double theta = rng.uniform(0.05, kPi / 2.0 - 0.05);
        const BrokenRay a = make_broken_ray(beta, d, 1.0, theta);
        const BrokenRay b = make_broken_ray(beta + kTwoPi, d, 1.0, theta);
        CHECK(std::abs(a.base.x - b.base.x) < 1e-12);
        CHECK(std::abs(a.base.y - b.base.y) < 1e-12);
        CHECK(std::abs(a.u.x - b.u.x) < 1e-12);
        CHECK(std::abs(a.u.y - b.u.y) < 1e-12);
        CHECK(std::abs(a.v.x - b.v.x) < 1e-12);
        CHECK(std::abs(a.v.y - b.v.y) < 1e-12);
        CHECK(std::abs(a.vertex.x - b.vertex.x) < 1e-12);
        CHECK(std::abs(a.second_leg_exit - b.second_leg_exit) < 1e-12);
    }
}

TEST_CASE("rotation equivariance") {
    SplitMix64 rng(11);
    auto rotate = [](const Vec2& p, double g) {
        return Vec2{p.x * std::cos(g) - p.y * std::sin(g), p.x * std::sin(g) + p.y * std::cos(g)};
    };
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = rng.uniform(0.0, kTwoPi);
        const double gamma = rng.uniform(0.0, kTwoPi);
        const double d = rng.uniform(0.0, 2.0);
        const double theta = rng.uniform(0.05, kPi / 2.0 - 0.05);
        const BrokenRay a = make_broken_ray(beta, d, 1.0, theta);
        const BrokenRay b = make_broken_ray(beta + gamma, d, 1.0, theta);
        for (auto [pa, pb] : {std::pair{a.base, b.base},
                              {a.vertex, b.vertex},
                              {a.u, b.u},
                              {a.v, b.v}}) {
            const Vec2 rot = rotate(pa, gamma);
            CHECK(std::abs(rot.x - pb.x) < 1e-12);
            CHECK(std::abs(rot.y - pb.y) < 1e-12);
        }
    }
}

TEST_CASE("antipodal first legs lie on one diameter") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const double R = rng.uniform(0.5, 2.0);
        const double beta = rng.uniform(0.0, kTwoPi);
        const double d = rng.uniform(0.0, 2.0 * R);
        const double theta = rng.uniform(0.05, kPi / 2.0 - 0.05);
        const BrokenRay a = make_broken_ray(beta, d, R, theta);
        const BrokenRay b = make_broken_ray(beta + kPi, 2.0 * R - d, R, theta);
        // collinearity of both segments with the origin-through-base line
        CHECK(std::abs(cross(a.base, a.u)) < 1e-12 * R);
        CHECK(std::abs(cross(b.base, b.u)) < 1e-12 * R);
        CHECK(std::abs(cross(a.base, b.base)) < 1e-11 * R * R);
        // the two vertices coincide
        CHECK(std::abs(a.vertex.x - b.vertex.x) < 1e-12 * R);
        CHECK(std::abs(a.vertex.y - b.vertex.y) < 1e-12 * R);
    }
}

TEST_CASE("second leg line: fixed values") {
    SUBCASE("vertex at the origin gives p = 0") {
        SplitMix64 rng(3);
        for (int k = 0; k < 20; ++k) {
            const double beta = rng.uniform(0.0, kTwoPi);
            const LineParams lp = second_leg_line(beta, 1.0, 1.0, 0.7);
            CHECK(lp.p == doctest::Approx(0.0).epsilon(1e-15));
        }
    }
    SUBCASE("entry ray at beta = 0") {
        const LineParams lp = second_leg_line(0.0, 0.0, 1.0, kPi / 6.0);
        CHECK(lp.psi == doctest::Approx(kPi / 6.0 + kPi / 2.0));
        CHECK(lp.p == doctest::Approx(-0.5));
    }
}

TEST_CASE("second leg line matches the point-line-distance oracle") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const double R = rng.uniform(0.5, 2.0);
        const double beta = rng.uniform(0.0, kTwoPi);
        const double d = rng.uniform(0.0, 2.0 * R);
        const double theta = rng.uniform(0.05, kPi / 2.0 - 0.05);
        const BrokenRay br = make_broken_ray(beta, d, R, theta);
        const LineParams lp = second_leg_line(beta, d, R, theta);

        // the line contains the vertex and is parallel to v
        CHECK(std::abs(lp.w.dot(br.v)) < 1e-12);
        CHECK(std::abs(lp.w.dot(br.vertex) - lp.p) < 1e-12 * R);
        // |p| is the distance from the origin; the sign is the w-side of the line
        const double dist = std::abs(cross(br.vertex, br.v));
        CHECK(std::abs(std::abs(lp.p) - dist) < 1e-12 * R);
        const double side = lp.w.dot(br.vertex);
        CHECK(lp.p * side >= -1e-24);
    }
}

TEST_CASE("chord exit distances") {
    CHECK(chord_exit_distance({0.0, 0.0}, {0.6, 0.8}, 1.0) == doctest::Approx(1.0));
    CHECK(chord_exit_distance({1.0, 0.0}, {-1.0, 0.0}, 1.0) == doctest::Approx(2.0));
    CHECK(chord_exit_distance({0.0, 1.0}, {std::sqrt(3.0) / 2.0, -0.5}, 1.0) ==
          doctest::Approx(exit_oracle({0.0, 1.0}, {std::sqrt(3.0) / 2.0, -0.5}, 1.0)));
    CHECK(chord_exit_distance({0.0, 1.0}, {std::sqrt(3.0) / 2.0, -0.5}, 1.0) ==
          doctest::Approx(1.0));
    // boundary point, outward direction
    CHECK(chord_exit_distance({1.0, 0.0}, {1.0, 0.0}, 1.0) == doctest::Approx(0.0));

    SplitMix64 rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        const double R = rng.uniform(0.5, 2.0);
        const double rr = R * std::sqrt(rng.uniform01());
        const double ang = rng.uniform(0.0, kTwoPi);
        const Vec2 p{rr * std::cos(ang), rr * std::sin(ang)};
        const Vec2 dir = unit_vec(rng.uniform(0.0, kTwoPi));
        const double s = chord_exit_distance(p, dir, R);
        CHECK(s == doctest::Approx(exit_oracle(p, dir, R)).epsilon(1e-10));
        CHECK(std::abs((p + s * dir).norm() - R) < 1e-9);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_broken_ray(0.0, -0.1, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(make_broken_ray(0.0, 2.1, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(make_broken_ray(0.0, 1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(make_broken_ray(0.0, 1.0, 1.0, kPi / 2.0), std::domain_error);
    CHECK_THROWS_AS(make_broken_ray(0.0, 1.0, -1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(second_leg_line(0.0, 3.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(chord_exit_distance({2.0, 0.0}, {1.0, 0.0}, 1.0), std::domain_error);
    // d = 0 and d = 2R are allowed
    CHECK_NOTHROW(make_broken_ray(1.0, 0.0, 1.0, 0.5));
    CHECK_NOTHROW(make_broken_ray(1.0, 2.0, 1.0, 0.5));
}

TEST_CASE("wrap_angle lands in [0, 2*pi)") {
    CHECK(wrap_angle(kTwoPi) == 0.0);
    CHECK(wrap_angle(-1e-9) < kTwoPi);
    CHECK(wrap_angle(-1e-9) >= 0.0);
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
    CHECK(wrap_angle(-1.0) == doctest::Approx(kTwoPi - 1.0));
}
