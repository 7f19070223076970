#include "vlt/forward.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "vlt/errors.hpp"

namespace vlt {

void parallel_for(int n, const std::function<void(int)>& fn, int threads) {
    if (n <= 0) return;
    int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nt = std::max(1, std::min(nt, n));
    if (nt == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

namespace {

// Composite Simpson over [0, len] with an even interval count sized so the
// step is at most quad_step.
double simpson(const std::function<double(double)>& g, double len, double quad_step) {
    if (len <= 0.0) return 0.0;
    int m = static_cast<int>(std::ceil(len / quad_step));
    m += m % 2;
    m = std::max(m, 2);
    const double h = len / m;
    double sum = g(0.0) + g(len);
    for (int k = 1; k < m; ++k) sum += g(k * h) * (k % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

double vline_transform(VKind kind, const VectorField& field, double beta, double d, double R,
                       double theta, double quad_step) {
    if (quad_step <= 0.0) throw std::domain_error("vline_transform: quad_step must be positive");
    const BrokenRay br = make_broken_ray(beta, d, R, theta);
    const Vec2 dir1 = kind == VKind::longitudinal ? br.u : br.u.perp();
    const Vec2 dir2 = kind == VKind::longitudinal ? br.v : br.v.perp();

    const double leg1 = simpson(
        [&](double s) { return dir1.dot(field(br.base + s * br.u)); }, br.d, quad_step);
    const double leg2 = simpson(
        [&](double s) { return dir2.dot(field(br.vertex + s * br.v)); }, br.second_leg_exit,
        quad_step);
    const double value = leg1 + leg2;
    if (!std::isfinite(value))
        throw NumericError("vline_transform: non-finite value at beta=" + std::to_string(beta) +
                           ", d=" + std::to_string(d));
    return value;
}

namespace {

double chord_integral(const std::function<double(const Vec2&)>& integrand, double psi, double p,
                      double R, double quad_step) {
    if (quad_step <= 0.0) throw std::domain_error("line transform: quad_step must be positive");
    if (std::abs(p) >= R) return 0.0;
    const LineParams line = make_line(psi, p);
    const double half = std::sqrt(R * R - p * p);
    const Vec2 start = p * line.w - half * line.w_perp;
    const double value = simpson(
        [&](double s) { return integrand(start + s * line.w_perp); }, 2.0 * half, quad_step);
    if (!std::isfinite(value))
        throw NumericError("line transform: non-finite value at psi=" + std::to_string(psi) +
                           ", p=" + std::to_string(p));
    return value;
}

}  // namespace

double line_transform(SKind kind, const VectorField& field, double psi, double p, double R,
                      double quad_step) {
    if (kind == SKind::radon)
        throw std::domain_error("line_transform: radon kind takes a scalar field");
    const LineParams line = make_line(psi, p);
    const Vec2 dir = kind == SKind::longitudinal_ray ? line.w_perp : line.w;
    return chord_integral([&](const Vec2& pt) { return dir.dot(field(pt)); }, psi, p, R,
                          quad_step);
}

double radon_transform(const ScalarField& field, double psi, double p, double R,
                       double quad_step) {
    return chord_integral([&](const Vec2& pt) { return field(pt.x, pt.y); }, psi, p, R,
                          quad_step);
}

std::pair<VSinogram, VSinogram> simulate_vsinograms(const VectorField& field, double R,
                                                    double theta, int n_beta, int n_d,
                                                    double d_min, double d_max, double quad_step,
                                                    int threads) {
    if (n_beta < 2 || n_d < 2)
        throw std::domain_error("simulate_vsinograms: grid sizes must be >= 2");
    if (d_min < 0.0 || d_max > 2.0 * R || d_min >= d_max)
        throw std::domain_error("simulate_vsinograms: d range must satisfy 0 <= d_min < d_max <= 2R");

    VSinogram L{VKind::longitudinal, R, theta, n_beta, n_d, d_min, d_max,
                std::vector<double>(static_cast<size_t>(n_beta) * n_d)};
    VSinogram T = L;
    T.kind = VKind::transverse;

    parallel_for(
        n_beta,
        [&](int i) {
            const double beta = L.beta(i);
            for (int j = 0; j < n_d; ++j) {
                const double d = L.d(j);
                L.at(i, j) = vline_transform(VKind::longitudinal, field, beta, d, R, theta,
                                             quad_step);
                T.at(i, j) = vline_transform(VKind::transverse, field, beta, d, R, theta,
                                             quad_step);
            }
        },
        threads);
    return {std::move(L), std::move(T)};
}

}  // namespace vlt
