#pragma once

#include <cmath>

namespace vlt {

/// Plain 2D double vector with the handful of operations the ray code needs.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    double norm() const { return std::hypot(x, y); }

    /// Counter-clockwise quarter turn: (x,y) -> (-y,x).
    constexpr Vec2 perp() const { return {-y, x}; }
};

/// Unit vector at polar angle a.
inline Vec2 unit_vec(double a) { return {std::cos(a), std::sin(a)}; }

}  // namespace vlt
