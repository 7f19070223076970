#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "vlt/fields.hpp"
#include "vlt/geometry.hpp"
#include "vlt/rng.hpp"

using namespace vlt;

namespace {

ScalarField linear_in_x() {
    return ScalarField::analytic(
        [](double x, double) { return x; }, 10.0, [](double, double) { return Vec2{1.0, 0.0}; },
        [](double, double) { return ScalarField::Hess{}; });
}

PhantomSpec random_mixture(SplitMix64& rng, double bound) {
    PhantomSpec spec;
    spec.kind = PhantomKind::mixture;
    spec.support_bound = bound;
    for (int k = 0; k < 2; ++k) {
        const double rad = rng.uniform(0.15, 0.3) * bound;
        const double c = rng.uniform(0.0, bound - rad - 0.05);
        const double ang = rng.uniform(0.0, kTwoPi);
        Bump b{{c * std::cos(ang), c * std::sin(ang)}, rad, rng.uniform(-2.0, 2.0)};
        if (k == 0)
            spec.potential_bumps.push_back(b);
        else
            spec.solenoidal_bumps.push_back(b);
    }
    return spec;
}

}  // namespace

TEST_CASE("gradients of a linear function") {
    const ScalarField phi = linear_in_x();
    const VectorField g = grad(phi);
    const VectorField gp = grad_perp(phi);
    CHECK(g(0.3, -0.2).x == doctest::Approx(1.0));
    CHECK(g(0.3, -0.2).y == doctest::Approx(0.0));
    CHECK(gp(0.1, 0.4).x == doctest::Approx(0.0));
    CHECK(gp(0.1, 0.4).y == doctest::Approx(1.0));
}

TEST_CASE("operator identities: curl(grad) = 0 and div(grad_perp) = 0") {
    const ScalarField phi = bump_scalar({{{0.1, -0.05}, 0.4, 1.3}});

    SUBCASE("analytic") {
        const ScalarField c = curl(grad(phi));
        const ScalarField d = divergence(grad_perp(phi));
        SplitMix64 rng(5);
        double worst = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double x = rng.uniform(-0.6, 0.6);
            const double y = rng.uniform(-0.6, 0.6);
            worst = std::max({worst, std::abs(c(x, y)), std::abs(d(x, y))});
        }
        CHECK(worst <= 1e-10);
    }

    SUBCASE("grid, second-order residual") {
        auto residual = [&](int n) {
            const VectorField fg = sample_to_grid(grad(phi), n, n, 1.0);
            const ScalarField c = curl(fg);
            double worst = 0.0;
            // skip the one-sided boundary ring; the bump vanishes there anyway
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i)
                    worst = std::max(worst, std::abs(c.grid_values()[size_t(j) * n + i]));
            return worst;
        };
        // the mollifier's edge layer needs fine grids before the O(h^2)
        // rate shows cleanly
        const double r256 = residual(256);
        const double r512 = residual(512);
        CHECK(r512 < r256 / 2.5);
    }
}

TEST_CASE("potential phantom vanishes outside its bump support") {
    PhantomSpec spec;
    spec.kind = PhantomKind::potential;
    spec.support_bound = 1.0;
    spec.potential_bumps = {{{0.0, 0.0}, 0.55, 2.0}};
    const VectorField f = make_phantom(spec);
    SplitMix64 rng(9);
    for (int k = 0; k < 300; ++k) {
        const double r = rng.uniform(0.55, 1.4);
        const double a = rng.uniform(0.0, kTwoPi);
        const Vec2 v = f(r * std::cos(a), r * std::sin(a));
        CHECK(v.x == 0.0);
        CHECK(v.y == 0.0);
    }
    // measured support never exceeds the declared radius
    double measured = 0.0;
    for (int k = 0; k < 4000; ++k) {
        const double r = rng.uniform(0.0, 1.0);
        const double a = rng.uniform(0.0, kTwoPi);
        const Vec2 v = f(r * std::cos(a), r * std::sin(a));
        if (std::hypot(v.x, v.y) > 1e-14) measured = std::max(measured, r);
    }
    CHECK(measured <= f.support_radius());
}

TEST_CASE("angular mode 0 is radially symmetric in f1 only") {
    PhantomSpec spec;
    spec.kind = PhantomKind::angular_mode;
    spec.support_bound = 1.0;
    spec.modes = {{0, 0.45, 0.25, 1.7, 0.0, 0.0, 0.0}};
    const VectorField f = make_phantom(spec);
    SplitMix64 rng(31);
    for (int k = 0; k < 200; ++k) {
        const double r = rng.uniform(0.0, 0.9);
        const double a1 = rng.uniform(0.0, kTwoPi);
        const double a2 = rng.uniform(0.0, kTwoPi);
        CHECK(f.polar(a1, r).x == doctest::Approx(f.polar(a2, r).x).epsilon(1e-12));
        CHECK(f.polar(a1, r).y == 0.0);
    }
}

TEST_CASE("angular mode coefficient extraction oracle") {
    PhantomSpec spec;
    spec.kind = PhantomKind::angular_mode;
    spec.support_bound = 1.0;
    const AngularMode mode{2, 0.4, 0.2, 1.2, 0.35, 0.8, -0.9};
    spec.modes = {mode};
    const VectorField f = make_phantom(spec);

    // quadrature of the coefficient integral (the trapezoid rule is exact
    // for band-limited integrands on a periodic grid)
    const int n_phi = 256;
    for (double r : {0.3, 0.4, 0.48}) {
        std::complex<double> acc1{}, acc2{};
        for (int k = 0; k < n_phi; ++k) {
            const double phi = kTwoPi * k / n_phi;
            const std::complex<double> w = std::polar(1.0 / n_phi, -2.0 * phi);
            acc1 += f.polar(phi, r).x * w;
            acc2 += f.polar(phi, r).y * w;
        }
        CHECK(std::abs(acc1 - angular_mode_coeff_a(mode, r)) < 1e-8);
        CHECK(std::abs(acc2 - angular_mode_coeff_b(mode, r)) < 1e-8);
    }
}

TEST_CASE("sampling reproduces cell-center values and zero fields") {
    SUBCASE("constant inside support is reproduced exactly at centers") {
        const ScalarField c = ScalarField::analytic([](double, double) { return 2.5; }, 0.7);
        const VectorField f{c, c};
        const VectorField g = sample_to_grid(f, 33, 33, 1.0);
        const GridSpec& spec = g.f1().grid_spec();
        for (int j = 0; j < 33; ++j)
            for (int i = 0; i < 33; ++i) {
                const double x = spec.x(i), y = spec.y(j);
                CHECK(g.f1()(x, y) == g.f1().grid_values()[size_t(j) * 33 + i]);
            }
    }
    SUBCASE("zero field samples to an all-zero grid") {
        const ScalarField z = ScalarField::analytic([](double, double) { return 0.0; }, 0.5);
        const VectorField g = sample_to_grid({z, z}, 16, 16, 1.0);
        for (double v : g.f1().grid_values()) CHECK(v == 0.0);
        for (double v : g.f2().grid_values()) CHECK(v == 0.0);
    }
    SUBCASE("downsampling a refined grid agrees to second order") {
        SplitMix64 rng(77);
        const VectorField f = make_phantom(random_mixture(rng, 0.8));
        auto downsample_err = [&](int n) {
            const VectorField coarse = sample_to_grid(f, n, n, 1.0);
            const VectorField fine = sample_to_grid(f, 2 * n, 2 * n, 1.0);
            double worst = 0.0;
            const auto& cv = coarse.f1().grid_values();
            const auto& fv = fine.f1().grid_values();
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double avg = 0.25 * (fv[size_t(2 * j) * 2 * n + 2 * i] +
                                               fv[size_t(2 * j) * 2 * n + 2 * i + 1] +
                                               fv[size_t(2 * j + 1) * 2 * n + 2 * i] +
                                               fv[size_t(2 * j + 1) * 2 * n + 2 * i + 1]);
                    worst = std::max(worst, std::abs(avg - cv[size_t(j) * n + i]));
                }
            return worst;
        };
        const double e128 = downsample_err(128);
        const double e256 = downsample_err(256);
        CHECK(e256 < e128 / 2.5);
    }
}

TEST_CASE("polar evaluation matches Cartesian") {
    SplitMix64 rng(19);
    const VectorField f = make_phantom(random_mixture(rng, 0.9));
    for (int k = 0; k < 300; ++k) {
        const double r = rng.uniform(0.0, 1.0);
        const double phi = rng.uniform(0.0, kTwoPi);
        const Vec2 a = f.polar(phi, r);
        const Vec2 b = f(r * std::cos(phi), r * std::sin(phi));
        CHECK(std::abs(a.x - b.x) < 1e-12);
        CHECK(std::abs(a.y - b.y) < 1e-12);
    }
}

TEST_CASE("perp rotates the field a quarter turn") {
    SplitMix64 rng(21);
    const VectorField f = make_phantom(random_mixture(rng, 0.9));
    const VectorField fp = perp(f);
    for (int k = 0; k < 100; ++k) {
        const double x = rng.uniform(-0.9, 0.9), y = rng.uniform(-0.9, 0.9);
        CHECK(fp(x, y).x == doctest::Approx(-f(x, y).y).epsilon(1e-14));
        CHECK(fp(x, y).y == doctest::Approx(f(x, y).x).epsilon(1e-14));
    }
}

TEST_CASE("phantom validation") {
    PhantomSpec spec;
    spec.kind = PhantomKind::potential;
    spec.support_bound = 0.5;
    spec.potential_bumps = {{{0.3, 0.0}, 0.3, 1.0}};  // support radius 0.6 > 0.5
    CHECK_THROWS_WITH_AS(make_phantom(spec), doctest::Contains("support radius"),
                         std::domain_error);

    PhantomSpec bad_mode;
    bad_mode.kind = PhantomKind::angular_mode;
    bad_mode.support_bound = 1.0;
    bad_mode.modes = {{3, 0.1, 0.2, 1.0, 0.0, 0.0, 0.0}};  // profile reaches the origin
    CHECK_THROWS_AS(make_phantom(bad_mode), std::domain_error);

    SplitMix64 rng(1);
    CHECK_THROWS_AS(sample_to_grid(make_phantom(random_mixture(rng, 0.9)), 2, 16, 1.0),
                    std::domain_error);
}

TEST_CASE("grid construction rejects bad input") {
    CHECK_THROWS_AS(ScalarField::grid({4, 4, 1.0}, std::vector<double>(15)), std::domain_error);
    std::vector<double> nan_values(16, 0.0);
    nan_values[3] = std::nan("");
    CHECK_THROWS_AS(ScalarField::grid({4, 4, 1.0}, nan_values), std::domain_error);
    CHECK_THROWS_AS(VectorField(ScalarField::grid({4, 4, 1.0}, std::vector<double>(16)),
                                ScalarField::grid({4, 5, 1.0}, std::vector<double>(20))),
                    std::domain_error);
}
