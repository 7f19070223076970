#pragma once

#include <numbers>

#include "vlt/vec2.hpp"

namespace vlt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Normalize an angle into [0, 2*pi). Values within one ulp of 2*pi wrap to 0.
double wrap_angle(double a);

/// A broken ray: enters the disk of radius R at `base` heading radially
/// inward along `u`, turns at `vertex` (after distance d) and continues
/// along `v`, which makes the angle pi - theta with the incoming direction.
/// The second leg is truncated where it leaves the disk, since all fields
/// handled here vanish outside it.
struct BrokenRay {
    double beta = 0.0;   // boundary angle of the entry point
    double d = 0.0;      // distance traveled along the first leg, in [0, 2R]
    double R = 1.0;      // disk radius
    double theta = 0.0;  // fixed scattering angle, in (0, pi/2)

    Vec2 base;               // (R cos beta, R sin beta)
    Vec2 u;                  // first-leg unit direction, -(cos beta, sin beta)
    Vec2 v;                  // second-leg unit direction, -(cos(theta+beta), sin(theta+beta))
    Vec2 vertex;             // base + d * u
    double second_leg_exit = 0.0;  // arclength at which the second leg meets the boundary
};

/// A straight line {x : x . w = p} with unit normal w = (cos psi, sin psi)
/// and direction w_perp = (-sin psi, cos psi).
struct LineParams {
    double psi = 0.0;
    double p = 0.0;
    Vec2 w;
    Vec2 w_perp;
};

LineParams make_line(double psi, double p);

/// Smallest s >= 0 with |point + s*dir| = R, for |point| <= R and unit dir.
/// Returns 0 when the point is on the boundary and dir points outward.
/// Throws std::domain_error when |point| > R (beyond a 1e-12 slack).
double chord_exit_distance(const Vec2& point, const Vec2& dir, double R);

/// Build the broken ray for parameters (beta, d) in the disk of radius R
/// with scattering angle theta. Throws std::domain_error when d is outside
/// [0, 2R] or theta outside (0, pi/2).
BrokenRay make_broken_ray(double beta, double d, double R, double theta);

/// The line containing the second leg of BR(beta,d):
///   psi = (beta + theta + pi/2) mod 2*pi,   p = (d - R) sin theta.
LineParams second_leg_line(double beta, double d, double R, double theta);

}  // namespace vlt
