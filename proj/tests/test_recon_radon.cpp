#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlt/recon_radon.hpp"
#include "vlt/rng.hpp"

using namespace vlt;

namespace {

PhantomSpec mixture_spec(SplitMix64& rng, double bound) {
    PhantomSpec spec;
    spec.kind = PhantomKind::mixture;
    spec.support_bound = bound;
    for (int k = 0; k < 2; ++k) {
        const double rad = rng.uniform(0.2, 0.32) * bound;
        const double c = rng.uniform(0.0, bound - rad - 0.02 * bound);
        const double ang = rng.uniform(0.0, kTwoPi);
        Bump b{{c * std::cos(ang), c * std::sin(ang)}, rad, rng.uniform(-2.0, 2.0)};
        if (k == 0)
            spec.potential_bumps.push_back(b);
        else
            spec.solenoidal_bumps.push_back(b);
    }
    return spec;
}

double data_scale(const SSinogram& s) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::abs(v));
    return std::max(m, 1e-30);
}

double rel_l2_inside(const VectorField& recon, const VectorField& truth, double radius) {
    const GridSpec& spec = recon.f1().grid_spec();
    double num = 0.0, den = 0.0;
    for (int j = 0; j < spec.ny; ++j)
        for (int i = 0; i < spec.nx; ++i) {
            const double x = spec.x(i), y = spec.y(j);
            if (x * x + y * y >= radius * radius) continue;
            const Vec2 r = recon(x, y);
            const Vec2 t = truth(x, y);
            num += (r.x - t.x) * (r.x - t.x) + (r.y - t.y) * (r.y - t.y);
            den += t.x * t.x + t.y * t.y;
        }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("combination identities against the straight-line oracle") {
    SplitMix64 rng(201);
    const double R = 1.0, theta = 1.1;
    const VectorField f = make_phantom(mixture_spec(rng, R * std::sin(theta) * 0.8));
    const int n_beta = 64, n_d = 65;
    auto [L, T] = simulate_vsinograms(f, R, theta, n_beta, n_d, 0.0, 2.0 * R, R / 1500.0);
    const SSinogram I = combine_to_lrt(L);
    const SSinogram J = combine_to_trt(T);
    const double scale = std::max(data_scale(I), data_scale(J));

    for (int k = 0; k < 50; ++k) {
        const int i = static_cast<int>(rng.next() % n_beta);
        const int j = static_cast<int>(rng.next() % n_d);
        const double direct_i =
            line_transform(SKind::longitudinal_ray, f, I.psi(i), I.p(j), R, R / 1500.0);
        const double direct_j =
            line_transform(SKind::transverse_ray, f, J.psi(i), J.p(j), R, R / 1500.0);
        CHECK(std::abs(I.at(i, j) - direct_i) <= 1e-6 * scale);
        CHECK(std::abs(J.at(i, j) - direct_j) <= 1e-6 * scale);
    }
}

TEST_CASE("combined data of annihilated fields vanishes") {
    const double R = 1.0, theta = 0.9;

    PhantomSpec pot;
    pot.kind = PhantomKind::potential;
    pot.support_bound = 0.7;
    pot.potential_bumps = {{{0.1, -0.05}, 0.3, 1.5}};
    auto [Lp, Tp] = simulate_vsinograms(make_phantom(pot), R, theta, 32, 33, 0.0, 2.0 * R,
                                        R / 1000.0);
    const SSinogram Ip = combine_to_lrt(Lp);
    for (double v : Ip.values) CHECK(std::abs(v) <= 1e-7);

    PhantomSpec sol;
    sol.kind = PhantomKind::solenoidal;
    sol.support_bound = 0.7;
    sol.solenoidal_bumps = {{{-0.1, 0.1}, 0.3, 1.2}};
    auto [Ls, Ts] = simulate_vsinograms(make_phantom(sol), R, theta, 32, 33, 0.0, 2.0 * R,
                                        R / 1000.0);
    const SSinogram Js = combine_to_trt(Ts);
    for (double v : Js.values) CHECK(std::abs(v) <= 1e-7);
}

TEST_CASE("transverse combination equals the quarter-turned longitudinal one") {
    SplitMix64 rng(207);
    const double R = 1.0, theta = 0.8;
    const VectorField f = make_phantom(mixture_spec(rng, 0.7));
    auto [L, T] = simulate_vsinograms(f, R, theta, 16, 17, 0.0, 2.0 * R, R / 500.0);
    auto [Lp, Tp] = simulate_vsinograms(perp(f), R, theta, 16, 17, 0.0, 2.0 * R, R / 500.0);
    // T f = -L f_perp row by row, so both combinations produce the same values
    const SSinogram JT = combine_to_trt(T);
    const SSinogram ILp = combine_to_lrt(Lp);
    for (size_t k = 0; k < JT.values.size(); ++k)
        CHECK(JT.values[k] == doctest::Approx(ILp.values[k]).epsilon(1e-12));
}

TEST_CASE("the middle d row maps to p = 0 exactly") {
    VSinogram L;
    L.kind = VKind::longitudinal;
    L.R = 1.3;
    L.theta = 0.7;
    L.n_beta = 8;
    L.n_d = 33;
    L.d_min = 0.0;
    L.d_max = 2.6;
    L.values.assign(8 * 33, 0.0);
    const SSinogram I = combine_to_lrt(L);
    CHECK(I.p(16) == 0.0);
    CHECK(I.p(0) == -I.p(32));
}

TEST_CASE("combine validates its grid") {
    VSinogram L;
    L.kind = VKind::longitudinal;
    L.R = 1.0;
    L.theta = 0.7;
    L.n_beta = 7;  // odd
    L.n_d = 33;
    L.d_min = 0.0;
    L.d_max = 2.0;
    L.values.assign(7 * 33, 0.0);
    CHECK_THROWS_AS(combine_to_lrt(L), std::domain_error);
    L.n_beta = 8;
    L.n_d = 32;  // even
    L.values.assign(8 * 32, 0.0);
    CHECK_THROWS_AS(combine_to_lrt(L), std::domain_error);
    L.n_d = 33;
    L.d_max = 1.5;  // not 2R
    L.values.assign(8 * 33, 0.0);
    CHECK_THROWS_AS(combine_to_lrt(L), std::domain_error);
    L.kind = VKind::transverse;
    L.d_max = 2.0;
    CHECK_THROWS_AS(combine_to_lrt(L), std::domain_error);
}

TEST_CASE("solve_components fixed values and involution") {
    SSinogram I;
    I.kind = SKind::longitudinal_ray;
    I.R = 1.0;
    I.n_psi = 4;
    I.n_p = 3;
    I.psi0 = 0.0;
    I.p_max = 0.5;
    I.values.assign(12, 0.0);
    SSinogram J = I;
    J.kind = SKind::transverse_ray;

    // (I, J) = (0, 1) at psi = 0 -> (Rf1, Rf2) = (1, 0)
    for (int j = 0; j < 3; ++j) J.at(0, j) = 1.0;
    // (I, J) = (1, 0) at psi = pi/2 (view index 1) -> (-1, 0)
    for (int j = 0; j < 3; ++j) I.at(1, j) = 1.0;
    const ComponentSinograms c = solve_components(I, J);
    CHECK(c.r1.at(0, 1) == doctest::Approx(1.0));
    CHECK(c.r2.at(0, 1) == doctest::Approx(0.0));
    CHECK(c.r1.at(1, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(c.r2.at(1, 1)) < 1e-15);

    // applying the same 2x2 map twice is the identity: det = -1, symmetric
    SplitMix64 rng(211);
    for (int k = 0; k < 50; ++k) {
        const double psi = rng.uniform(0.0, kTwoPi);
        const double iv = rng.uniform(-2.0, 2.0), jv = rng.uniform(-2.0, 2.0);
        const double r1 = -std::sin(psi) * iv + std::cos(psi) * jv;
        const double r2 = std::cos(psi) * iv + std::sin(psi) * jv;
        const double iv2 = -std::sin(psi) * r1 + std::cos(psi) * r2;
        const double jv2 = std::cos(psi) * r1 + std::sin(psi) * r2;
        CHECK(iv2 == doctest::Approx(iv).epsilon(1e-14));
        CHECK(jv2 == doctest::Approx(jv).epsilon(1e-14));
    }
}

TEST_CASE("component Radon data matches direct Radon of the components") {
    SplitMix64 rng(213);
    const double R = 1.0, theta = 1.1;
    const VectorField f = make_phantom(mixture_spec(rng, R * std::sin(theta) * 0.75));
    auto [L, T] = simulate_vsinograms(f, R, theta, 32, 33, 0.0, 2.0 * R, R / 1000.0);
    const ComponentSinograms c = solve_components(combine_to_lrt(L), combine_to_trt(T));
    const double scale = std::max(data_scale(c.r1), data_scale(c.r2));
    for (int k = 0; k < 40; ++k) {
        const int i = static_cast<int>(rng.next() % 32);
        const int j = static_cast<int>(rng.next() % 33);
        const double d1 = radon_transform(f.f1(), c.r1.psi(i), c.r1.p(j), R, R / 1000.0);
        const double d2 = radon_transform(f.f2(), c.r2.psi(i), c.r2.p(j), R, R / 1000.0);
        CHECK(std::abs(c.r1.at(i, j) - d1) <= 1e-6 * scale);
        CHECK(std::abs(c.r2.at(i, j) - d2) <= 1e-6 * scale);
    }
}

TEST_CASE("filtered backprojection on analytic Radon data") {
    SUBCASE("zero sinogram reconstructs to zero") {
        SSinogram s;
        s.kind = SKind::radon;
        s.R = 1.0;
        s.n_psi = 16;
        s.n_p = 17;
        s.psi0 = 0.3;
        s.p_max = 0.8;
        s.values.assign(16 * 17, 0.0);
        const ScalarField img = fbp_invert(s, 32, 32);
        for (double v : img.grid_values()) CHECK(v == 0.0);
    }

    SUBCASE("radial bump center value and translation") {
        const double R = 1.0;
        const ScalarField phi = bump_scalar({{{0.0, 0.0}, 0.3, 1.0}});
        SSinogram s;
        s.kind = SKind::radon;
        s.R = R;
        s.n_psi = 360;
        s.n_p = 257;
        s.psi0 = 0.0;
        s.p_max = R;
        s.values.resize(static_cast<size_t>(s.n_psi) * s.n_p);
        for (int i = 0; i < s.n_psi; ++i)
            for (int j = 0; j < s.n_p; ++j)
                s.values[static_cast<size_t>(i) * s.n_p + j] =
                    radon_transform(phi, s.psi(i), s.p(j), R, R / 800.0);
        const ScalarField img = fbp_invert(s, 256, 256);
        const GridSpec& spec = img.grid_spec();
        const double center = img(spec.x(127), spec.y(127));
        CHECK(center == doctest::Approx(phi(spec.x(127), spec.y(127))).epsilon(0.05));

        // translated phantom: the peak moves by the same shift within a cell
        const ScalarField phi2 = bump_scalar({{{0.1, 0.0}, 0.3, 1.0}});
        SSinogram s2 = s;
        for (int i = 0; i < s2.n_psi; ++i)
            for (int j = 0; j < s2.n_p; ++j)
                s2.values[static_cast<size_t>(i) * s2.n_p + j] =
                    radon_transform(phi2, s2.psi(i), s2.p(j), R, R / 800.0);
        const ScalarField img2 = fbp_invert(s2, 256, 256);
        int best = 0;
        double best_v = -1.0;
        for (int k = 0; k < 256 * 256; ++k)
            if (img2.grid_values()[k] > best_v) {
                best_v = img2.grid_values()[k];
                best = k;
            }
        const double px = spec.x(best % 256);
        const double py = spec.y(best / 256);
        const double cell = 2.0 * R / 256;
        CHECK(std::abs(px - 0.1) <= cell);
        CHECK(std::abs(py - 0.0) <= cell);
    }
}

TEST_CASE("full reconstruction pipeline") {
    SplitMix64 rng(217);
    const double R = 1.0, theta = 1.1;
    const double srad = R * std::sin(theta);

    SUBCASE("zero data reconstructs to zero") {
        const ScalarField z = ScalarField::analytic([](double, double) { return 0.0; }, 0.5);
        auto [L, T] = simulate_vsinograms({z, z}, R, theta, 8, 9, 0.0, 2.0 * R, 0.05);
        const FullReconResult res = reconstruct_full(L, T, 16, 16);
        for (double v : res.field.f1().grid_values()) CHECK(v == 0.0);
        for (double v : res.field.f2().grid_values()) CHECK(v == 0.0);
        CHECK_FALSE(res.support_warning);
    }

    SUBCASE("mixed phantom, moderate resolution") {
        const VectorField f = make_phantom(mixture_spec(rng, 0.8 * srad));
        auto [L, T] = simulate_vsinograms(f, R, theta, 180, 129, 0.0, 2.0 * R, R / 600.0);
        const FullReconResult res = reconstruct_full(L, T, 128, 128);
        CHECK_FALSE(res.support_warning);
        CHECK(rel_l2_inside(res.field, f, srad) <= 0.08);
        // pixels outside the recoverable disk are exactly zero
        const GridSpec& spec = res.field.f1().grid_spec();
        for (int j = 0; j < spec.ny; ++j)
            for (int i = 0; i < spec.nx; ++i)
                if (spec.x(i) * spec.x(i) + spec.y(j) * spec.y(j) >= srad * srad)
                    CHECK(res.field.f1().grid_values()[size_t(j) * spec.nx + i] == 0.0);
    }

    SUBCASE("potential phantom leaves the longitudinal channel empty") {
        PhantomSpec pot;
        pot.kind = PhantomKind::potential;
        pot.support_bound = 0.75 * srad;
        pot.potential_bumps = {{{0.1, 0.05}, 0.28, 1.5}};
        const VectorField f = make_phantom(pot);
        auto [L, T] = simulate_vsinograms(f, R, theta, 180, 129, 0.0, 2.0 * R, R / 600.0);
        const FullReconResult res = reconstruct_full(L, T, 128, 128);
        CHECK(rel_l2_inside(res.field, f, srad) <= 0.08);
    }

    SUBCASE("linearity of the pipeline") {
        const VectorField fa = make_phantom(mixture_spec(rng, 0.7 * srad));
        const VectorField fb = make_phantom(mixture_spec(rng, 0.7 * srad));
        auto [La, Ta] = simulate_vsinograms(fa, R, theta, 32, 33, 0.0, 2.0 * R, R / 300.0);
        auto [Lb, Tb] = simulate_vsinograms(fb, R, theta, 32, 33, 0.0, 2.0 * R, R / 300.0);
        VSinogram Lsum = La, Tsum = Ta;
        for (size_t k = 0; k < Lsum.values.size(); ++k) {
            Lsum.values[k] += Lb.values[k];
            Tsum.values[k] += Tb.values[k];
        }
        const VectorField ra = reconstruct_full(La, Ta, 48, 48).field;
        const VectorField rb = reconstruct_full(Lb, Tb, 48, 48).field;
        const VectorField rsum = reconstruct_full(Lsum, Tsum, 48, 48).field;
        double scale = 1e-30;
        for (double v : rsum.f1().grid_values()) scale = std::max(scale, std::abs(v));
        for (size_t k = 0; k < rsum.f1().grid_values().size(); ++k) {
            const double lin = ra.f1().grid_values()[k] + rb.f1().grid_values()[k];
            CHECK(std::abs(rsum.f1().grid_values()[k] - lin) <= 1e-10 * scale);
        }
    }

    SUBCASE("support violation raises the boundary-mass warning") {
        // support radius 0.95 R exceeds R sin(theta) ~ 0.891 R, so the
        // combined lines cannot see all of the field
        PhantomSpec wide;
        wide.kind = PhantomKind::solenoidal;
        wide.support_bound = R;
        wide.solenoidal_bumps = {{{0.0, 0.0}, 0.95 * R, 2.0}};
        const VectorField f = make_phantom(wide);
        auto [L, T] = simulate_vsinograms(f, R, theta, 64, 65, 0.0, 2.0 * R, R / 400.0);
        const FullReconResult res = reconstruct_full(L, T, 64, 64);
        CHECK(res.support_warning);
        CHECK(res.boundary_mass_fraction > 1e-3);
    }
}
