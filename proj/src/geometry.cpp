#include "vlt/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlt {

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod can return exactly 2*pi after the negative branch when a is a
    // tiny negative number; tie-break to 0.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

LineParams make_line(double psi, double p) {
    LineParams lp;
    lp.psi = wrap_angle(psi);
    lp.p = p;
    lp.w = unit_vec(lp.psi);
    lp.w_perp = lp.w.perp();
    return lp;
}

double chord_exit_distance(const Vec2& point, const Vec2& dir, double R) {
    if (R <= 0.0) throw std::domain_error("chord_exit_distance: R must be positive");
    const double r2 = point.dot(point);
    const double c = r2 - R * R;
    if (c > 1e-12 * R * R) {
        throw std::domain_error("chord_exit_distance: point lies outside the disk (|point| = " +
                                std::to_string(std::sqrt(r2)) + ", R = " + std::to_string(R) + ")");
    }
    const double k = point.dot(dir);
    // s^2 + 2ks + c = 0; with c <= 0 the two roots straddle zero and the
    // nonnegative one is the exit.
    const double disc = k * k - std::min(c, 0.0);
    const double s = -k + std::sqrt(disc);
    return std::max(s, 0.0);
}

BrokenRay make_broken_ray(double beta, double d, double R, double theta) {
    if (R <= 0.0) throw std::domain_error("make_broken_ray: R must be positive");
    if (d < 0.0 || d > 2.0 * R)
        throw std::domain_error("make_broken_ray: d = " + std::to_string(d) +
                                " outside [0, 2R] with R = " + std::to_string(R));
    if (!(theta > 0.0 && theta < kPi / 2.0))
        throw std::domain_error("make_broken_ray: theta = " + std::to_string(theta) +
                                " outside (0, pi/2)");

    BrokenRay br;
    br.beta = wrap_angle(beta);
    br.d = d;
    br.R = R;
    br.theta = theta;
    br.base = R * unit_vec(br.beta);
    br.u = -unit_vec(br.beta);
    br.v = -unit_vec(theta + br.beta);
    br.vertex = br.base + d * br.u;
    // The vertex sits at distance |R - d| from the origin; rounding can put
    // it a hair outside the disk when d is close to 0 or 2R.
    br.second_leg_exit = chord_exit_distance(br.vertex, br.v, R);
    return br;
}

LineParams second_leg_line(double beta, double d, double R, double theta) {
    if (R <= 0.0) throw std::domain_error("second_leg_line: R must be positive");
    if (d < 0.0 || d > 2.0 * R)
        throw std::domain_error("second_leg_line: d = " + std::to_string(d) +
                                " outside [0, 2R] with R = " + std::to_string(R));
    if (!(theta > 0.0 && theta < kPi / 2.0))
        throw std::domain_error("second_leg_line: theta = " + std::to_string(theta) +
                                " outside (0, pi/2)");
    return make_line(beta + theta + kPi / 2.0, (d - R) * std::sin(theta));
}

}  // namespace vlt
