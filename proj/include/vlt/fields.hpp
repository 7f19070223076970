#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "vlt/vec2.hpp"

namespace vlt {

/// Cell-centered Cartesian grid over the square [-R,R]^2.
/// Sample (i,j) sits at x = -R + (i+0.5)*2R/nx, y = -R + (j+0.5)*2R/ny.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double R = 1.0;

    double x(int i) const { return -R + (i + 0.5) * (2.0 * R / nx); }
    double y(int j) const { return -R + (j + 0.5) * (2.0 * R / ny); }
    bool operator==(const GridSpec&) const = default;
};

/// A scalar field over the plane, either an analytic rule (with optional
/// analytic first and second derivatives) or samples on a GridSpec lattice
/// evaluated by bilinear interpolation. Both carry a support radius; the
/// field is treated as identically zero outside it.
class ScalarField {
public:
    using ValueFn = std::function<double(double, double)>;
    using GradFn = std::function<Vec2(double, double)>;
    struct Hess {
        double xx = 0.0, xy = 0.0, yy = 0.0;
    };
    using HessFn = std::function<Hess(double, double)>;

    ScalarField() = default;

    static ScalarField analytic(ValueFn value, double support_radius, GradFn grad = {},
                                HessFn hess = {});
    /// Takes ownership of row-major samples (index j*nx + i). All values must
    /// be finite.
    static ScalarField grid(const GridSpec& spec, std::vector<double> values);

    bool is_grid() const { return is_grid_; }
    double support_radius() const { return support_radius_; }
    const GridSpec& grid_spec() const;
    const std::vector<double>& grid_values() const;

    double operator()(double x, double y) const;
    /// Analytic gradient when available, centered differences on grids
    /// (one-sided at the boundary). Throws when neither applies.
    Vec2 gradient(double x, double y) const;
    Hess hessian(double x, double y) const;

    bool has_gradient() const;
    bool has_hessian() const { return static_cast<bool>(hess_); }

private:
    bool is_grid_ = false;
    double support_radius_ = 0.0;
    ValueFn value_;
    GradFn grad_;
    HessFn hess_;
    GridSpec spec_;
    std::vector<double> values_;

    double grid_value(double x, double y) const;
};

/// A planar vector field as a pair of scalar components sharing support and
/// (when gridded) grid geometry.
class VectorField {
public:
    VectorField() = default;
    VectorField(ScalarField f1, ScalarField f2);

    Vec2 operator()(double x, double y) const;
    Vec2 operator()(const Vec2& pt) const { return (*this)(pt.x, pt.y); }
    /// Evaluation in polar coordinates: the value at (r cos phi, r sin phi).
    Vec2 polar(double phi, double r) const;

    const ScalarField& f1() const { return f1_; }
    const ScalarField& f2() const { return f2_; }
    bool is_grid() const { return f1_.is_grid(); }
    double support_radius() const;

    /// Pointwise sum; both operands analytic or both grids on equal specs.
    VectorField operator+(const VectorField& other) const;

private:
    ScalarField f1_, f2_;
};

// First-order differential operators. Analytic inputs must carry analytic
// derivatives (gradients for div/curl, hessians for grad/grad_perp so the
// result still has a gradient); grid inputs need nx, ny >= 3.
VectorField grad(const ScalarField& phi);
VectorField grad_perp(const ScalarField& phi);
ScalarField divergence(const VectorField& f);
ScalarField curl(const VectorField& f);

/// Rotate a vector field by a quarter turn: f -> (-f2, f1).
VectorField perp(const VectorField& f);

/// One C-infinity mollifier bump: amplitude * exp(1/(q-1)) with
/// q = |x-center|^2 / radius^2 < 1, zero elsewhere.
struct Bump {
    Vec2 center;
    double radius = 0.5;
    double amplitude = 1.0;
};

/// One angular harmonic: component 1 gets the polar Fourier coefficient
/// a_n(r) = amp_a * e^{i phase_a} * g(r) (and component 2 likewise with
/// amp_b/phase_b), where g is a 1D mollifier bump on [r_center - r_width,
/// r_center + r_width]; the -n coefficient is the conjugate so the field is
/// real. Mode 0 requires zero phases.
struct AngularMode {
    int n = 0;
    double r_center = 0.5;
    double r_width = 0.2;
    double amp_a = 1.0;
    double phase_a = 0.0;
    double amp_b = 0.0;
    double phase_b = 0.0;
};

enum class PhantomKind { potential, solenoidal, angular_mode, mixture };

struct PhantomSpec {
    PhantomKind kind = PhantomKind::potential;
    std::vector<Bump> potential_bumps;   // potential phi is the sum of these
    std::vector<Bump> solenoidal_bumps;  // stream function for the d-perp part
    std::vector<AngularMode> modes;
    double support_bound = 1.0;  // resulting support radius must be strictly below this
};

/// Scalar sum of mollifier bumps with analytic gradient and hessian.
ScalarField bump_scalar(const std::vector<Bump>& bumps);

/// 1D mollifier profile used by angular modes, and its derivative.
double bump_profile(double r, double center, double width);
double bump_profile_deriv(double r, double center, double width);

/// The exact polar Fourier coefficients of an angular-mode phantom term.
std::complex<double> angular_mode_coeff_a(const AngularMode& m, double r);
std::complex<double> angular_mode_coeff_b(const AngularMode& m, double r);

VectorField make_phantom(const PhantomSpec& spec);

/// Cell-centered sampling of an analytic field; samples outside the support
/// radius are exactly zero. Requires nx, ny >= 3.
VectorField sample_to_grid(const VectorField& field, int nx, int ny, double R);

}  // namespace vlt
