#include "vlt/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vlt {

namespace {

void check_grid_spec(const GridSpec& spec, const char* who) {
    if (spec.nx < 1 || spec.ny < 1)
        throw std::domain_error(std::string(who) + ": grid must be at least 1x1");
    if (spec.R <= 0.0) throw std::domain_error(std::string(who) + ": R must be positive");
}

// exp(1/(q-1)) for q < 1, with its first two derivatives in q. Returns zeros
// once the true value underflows anyway.
struct MollifierQ {
    double m = 0.0, m1 = 0.0, m2 = 0.0;
};

MollifierQ mollifier_q(double q) {
    MollifierQ out;
    if (q >= 1.0 - 1e-8) return out;
    const double w = 1.0 / (q - 1.0);
    out.m = std::exp(w);
    out.m1 = -out.m * w * w;                      // d/dq exp(1/(q-1))
    out.m2 = out.m * (w * w * w * w + 2.0 * w * w * w);
    return out;
}

}  // namespace

ScalarField ScalarField::analytic(ValueFn value, double support_radius, GradFn grad, HessFn hess) {
    if (!value) throw std::domain_error("ScalarField::analytic: value function required");
    if (support_radius < 0.0)
        throw std::domain_error("ScalarField::analytic: support_radius must be nonnegative");
    ScalarField f;
    f.is_grid_ = false;
    f.value_ = std::move(value);
    f.grad_ = std::move(grad);
    f.hess_ = std::move(hess);
    f.support_radius_ = support_radius;
    return f;
}

ScalarField ScalarField::grid(const GridSpec& spec, std::vector<double> values) {
    check_grid_spec(spec, "ScalarField::grid");
    if (static_cast<int>(values.size()) != spec.nx * spec.ny)
        throw std::domain_error("ScalarField::grid: value count " + std::to_string(values.size()) +
                                " does not match " + std::to_string(spec.nx) + "x" +
                                std::to_string(spec.ny));
    for (double v : values)
        if (!std::isfinite(v)) throw std::domain_error("ScalarField::grid: non-finite sample");
    ScalarField f;
    f.is_grid_ = true;
    f.spec_ = spec;
    f.values_ = std::move(values);
    f.support_radius_ = spec.R;
    return f;
}

const GridSpec& ScalarField::grid_spec() const {
    if (!is_grid_) throw std::logic_error("ScalarField: not a grid field");
    return spec_;
}

const std::vector<double>& ScalarField::grid_values() const {
    if (!is_grid_) throw std::logic_error("ScalarField: not a grid field");
    return values_;
}

double ScalarField::grid_value(double x, double y) const {
    const double R = spec_.R;
    if (x < -R || x > R || y < -R || y > R) return 0.0;
    const double hx = 2.0 * R / spec_.nx;
    const double hy = 2.0 * R / spec_.ny;
    // fractional cell-center coordinates, clamped so boundary evaluation
    // degenerates to the outermost samples; snapped onto exact centers so
    // re-evaluating at a sample point returns the stored value bit-for-bit
    double fx = (x + R) / hx - 0.5;
    double fy = (y + R) / hy - 0.5;
    if (std::abs(fx - std::round(fx)) < 1e-9) fx = std::round(fx);
    if (std::abs(fy - std::round(fy)) < 1e-9) fy = std::round(fy);
    fx = std::clamp(fx, 0.0, static_cast<double>(spec_.nx - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(spec_.ny - 1));
    const int i0 = std::min(static_cast<int>(fx), spec_.nx - 2 >= 0 ? spec_.nx - 2 : 0);
    const int j0 = std::min(static_cast<int>(fy), spec_.ny - 2 >= 0 ? spec_.ny - 2 : 0);
    const int i1 = std::min(i0 + 1, spec_.nx - 1);
    const int j1 = std::min(j0 + 1, spec_.ny - 1);
    const double tx = fx - i0;
    const double ty = fy - j0;
    const double v00 = values_[static_cast<size_t>(j0) * spec_.nx + i0];
    const double v10 = values_[static_cast<size_t>(j0) * spec_.nx + i1];
    const double v01 = values_[static_cast<size_t>(j1) * spec_.nx + i0];
    const double v11 = values_[static_cast<size_t>(j1) * spec_.nx + i1];
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

double ScalarField::operator()(double x, double y) const {
    if (is_grid_) return grid_value(x, y);
    if (x * x + y * y >= support_radius_ * support_radius_) return 0.0;
    return value_(x, y);
}

bool ScalarField::has_gradient() const { return is_grid_ || static_cast<bool>(grad_); }

Vec2 ScalarField::gradient(double x, double y) const {
    if (!is_grid_) {
        if (!grad_) throw std::domain_error("ScalarField::gradient: no analytic gradient");
        if (x * x + y * y >= support_radius_ * support_radius_) return {};
        return grad_(x, y);
    }
    if (spec_.nx < 3 || spec_.ny < 3)
        throw std::domain_error("ScalarField::gradient: grid must be at least 3x3");
    // centered differences at the nearest cell center, one-sided at edges
    const double hx = 2.0 * spec_.R / spec_.nx;
    const double hy = 2.0 * spec_.R / spec_.ny;
    auto clampi = [](int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); };
    const int i = clampi(static_cast<int>(std::lround((x + spec_.R) / hx - 0.5)), 0, spec_.nx - 1);
    const int j = clampi(static_cast<int>(std::lround((y + spec_.R) / hy - 0.5)), 0, spec_.ny - 1);
    auto at = [&](int ii, int jj) { return values_[static_cast<size_t>(jj) * spec_.nx + ii]; };
    double gx, gy;
    if (i == 0)
        gx = (at(1, j) - at(0, j)) / hx;
    else if (i == spec_.nx - 1)
        gx = (at(i, j) - at(i - 1, j)) / hx;
    else
        gx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx);
    if (j == 0)
        gy = (at(i, 1) - at(i, 0)) / hy;
    else if (j == spec_.ny - 1)
        gy = (at(i, j) - at(i, j - 1)) / hy;
    else
        gy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * hy);
    return {gx, gy};
}

ScalarField::Hess ScalarField::hessian(double x, double y) const {
    if (is_grid_ || !hess_) throw std::domain_error("ScalarField::hessian: not available");
    if (x * x + y * y >= support_radius_ * support_radius_) return {};
    return hess_(x, y);
}

VectorField::VectorField(ScalarField f1, ScalarField f2) : f1_(std::move(f1)), f2_(std::move(f2)) {
    if (f1_.is_grid() != f2_.is_grid())
        throw std::domain_error("VectorField: components must both be analytic or both grids");
    if (f1_.is_grid() && !(f1_.grid_spec() == f2_.grid_spec()))
        throw std::domain_error("VectorField: component grids differ");
}

Vec2 VectorField::operator()(double x, double y) const { return {f1_(x, y), f2_(x, y)}; }

Vec2 VectorField::polar(double phi, double r) const {
    return (*this)(r * std::cos(phi), r * std::sin(phi));
}

double VectorField::support_radius() const {
    return std::max(f1_.support_radius(), f2_.support_radius());
}

VectorField VectorField::operator+(const VectorField& other) const {
    if (is_grid() != other.is_grid())
        throw std::domain_error("VectorField::operator+: mixed analytic/grid operands");
    if (is_grid()) {
        if (!(f1_.grid_spec() == other.f1_.grid_spec()))
            throw std::domain_error("VectorField::operator+: grid specs differ");
        std::vector<double> v1 = f1_.grid_values();
        std::vector<double> v2 = f2_.grid_values();
        const auto& o1 = other.f1_.grid_values();
        const auto& o2 = other.f2_.grid_values();
        for (size_t k = 0; k < v1.size(); ++k) {
            v1[k] += o1[k];
            v2[k] += o2[k];
        }
        return {ScalarField::grid(f1_.grid_spec(), std::move(v1)),
                ScalarField::grid(f2_.grid_spec(), std::move(v2))};
    }
    auto sum_component = [](const ScalarField& a, const ScalarField& b) {
        const double rad = std::max(a.support_radius(), b.support_radius());
        ScalarField::GradFn g;
        if (a.has_gradient() && b.has_gradient())
            g = [a, b](double x, double y) { return a.gradient(x, y) + b.gradient(x, y); };
        return ScalarField::analytic(
            [a, b](double x, double y) { return a(x, y) + b(x, y); }, rad, std::move(g));
    };
    return {sum_component(f1_, other.f1_), sum_component(f2_, other.f2_)};
}

namespace {

ScalarField grid_derivative(const ScalarField& in, bool along_x) {
    const GridSpec spec = in.grid_spec();
    if (spec.nx < 3 || spec.ny < 3)
        throw std::domain_error("differential operator: grid must be at least 3x3");
    const auto& v = in.grid_values();
    std::vector<double> out(v.size());
    const double hx = 2.0 * spec.R / spec.nx;
    const double hy = 2.0 * spec.R / spec.ny;
    auto at = [&](int i, int j) { return v[static_cast<size_t>(j) * spec.nx + i]; };
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            double d;
            if (along_x) {
                if (i == 0)
                    d = (at(1, j) - at(0, j)) / hx;
                else if (i == spec.nx - 1)
                    d = (at(i, j) - at(i - 1, j)) / hx;
                else
                    d = (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx);
            } else {
                if (j == 0)
                    d = (at(i, 1) - at(i, 0)) / hy;
                else if (j == spec.ny - 1)
                    d = (at(i, j) - at(i, j - 1)) / hy;
                else
                    d = (at(i, j + 1) - at(i, j - 1)) / (2.0 * hy);
            }
            out[static_cast<size_t>(j) * spec.nx + i] = d;
        }
    }
    return ScalarField::grid(spec, std::move(out));
}

// Component of an analytic gradient, carrying its own gradient from the
// parent's hessian so curl/divergence of the result stays analytic.
ScalarField gradient_component(const ScalarField& phi, bool second) {
    if (!phi.has_gradient())
        throw std::domain_error("grad: analytic input must carry an analytic gradient");
    ScalarField::GradFn g;
    if (phi.has_hessian()) {
        if (!second)
            g = [phi](double x, double y) {
                auto h = phi.hessian(x, y);
                return Vec2{h.xx, h.xy};
            };
        else
            g = [phi](double x, double y) {
                auto h = phi.hessian(x, y);
                return Vec2{h.xy, h.yy};
            };
    }
    return ScalarField::analytic(
        [phi, second](double x, double y) {
            Vec2 gv = phi.gradient(x, y);
            return second ? gv.y : gv.x;
        },
        phi.support_radius(), std::move(g));
}

}  // namespace

VectorField grad(const ScalarField& phi) {
    if (phi.is_grid())
        return {grid_derivative(phi, true), grid_derivative(phi, false)};
    return {gradient_component(phi, false), gradient_component(phi, true)};
}

VectorField grad_perp(const ScalarField& phi) {
    if (phi.is_grid()) {
        const ScalarField dx = grid_derivative(phi, true);
        const ScalarField dy = grid_derivative(phi, false);
        std::vector<double> neg = dy.grid_values();
        for (double& v : neg) v = -v;
        return {ScalarField::grid(phi.grid_spec(), std::move(neg)), dx};
    }
    const ScalarField px = gradient_component(phi, false);
    const ScalarField py = gradient_component(phi, true);
    ScalarField::GradFn ng;
    if (py.has_gradient())
        ng = [py](double x, double y) { return -1.0 * py.gradient(x, y); };
    ScalarField neg = ScalarField::analytic(
        [py](double x, double y) { return -py(x, y); }, py.support_radius(), std::move(ng));
    return {std::move(neg), px};
}

ScalarField divergence(const VectorField& f) {
    if (f.is_grid()) {
        const ScalarField d1 = grid_derivative(f.f1(), true);
        const ScalarField d2 = grid_derivative(f.f2(), false);
        std::vector<double> out = d1.grid_values();
        const auto& b = d2.grid_values();
        for (size_t k = 0; k < out.size(); ++k) out[k] += b[k];
        return ScalarField::grid(f.f1().grid_spec(), std::move(out));
    }
    const ScalarField c1 = f.f1();
    const ScalarField c2 = f.f2();
    if (!c1.has_gradient() || !c2.has_gradient())
        throw std::domain_error("divergence: analytic components must carry gradients");
    return ScalarField::analytic(
        [c1, c2](double x, double y) { return c1.gradient(x, y).x + c2.gradient(x, y).y; },
        f.support_radius());
}

ScalarField curl(const VectorField& f) {
    if (f.is_grid()) {
        const ScalarField d2x = grid_derivative(f.f2(), true);
        const ScalarField d1y = grid_derivative(f.f1(), false);
        std::vector<double> out = d2x.grid_values();
        const auto& b = d1y.grid_values();
        for (size_t k = 0; k < out.size(); ++k) out[k] -= b[k];
        return ScalarField::grid(f.f1().grid_spec(), std::move(out));
    }
    const ScalarField c1 = f.f1();
    const ScalarField c2 = f.f2();
    if (!c1.has_gradient() || !c2.has_gradient())
        throw std::domain_error("curl: analytic components must carry gradients");
    return ScalarField::analytic(
        [c1, c2](double x, double y) { return c2.gradient(x, y).x - c1.gradient(x, y).y; },
        f.support_radius());
}

VectorField perp(const VectorField& f) {
    if (f.is_grid()) {
        std::vector<double> neg = f.f2().grid_values();
        for (double& v : neg) v = -v;
        return {ScalarField::grid(f.f1().grid_spec(), std::move(neg)), f.f1()};
    }
    const ScalarField c1 = f.f1();
    const ScalarField c2 = f.f2();
    ScalarField::GradFn ng;
    if (c2.has_gradient())
        ng = [c2](double x, double y) { return -1.0 * c2.gradient(x, y); };
    ScalarField neg = ScalarField::analytic(
        [c2](double x, double y) { return -c2(x, y); }, c2.support_radius(), std::move(ng));
    return {std::move(neg), c1};
}

ScalarField bump_scalar(const std::vector<Bump>& bumps) {
    if (bumps.empty()) throw std::domain_error("bump_scalar: at least one bump required");
    double rad = 0.0;
    for (const auto& b : bumps) {
        if (b.radius <= 0.0) throw std::domain_error("bump_scalar: bump radius must be positive");
        rad = std::max(rad, b.center.norm() + b.radius);
    }
    auto bumps_copy = bumps;
    auto value = [bumps_copy](double x, double y) {
        double s = 0.0;
        for (const auto& b : bumps_copy) {
            const Vec2 rel{x - b.center.x, y - b.center.y};
            s += b.amplitude * mollifier_q(rel.dot(rel) / (b.radius * b.radius)).m;
        }
        return s;
    };
    auto gradf = [bumps_copy](double x, double y) {
        Vec2 g;
        for (const auto& b : bumps_copy) {
            const Vec2 rel{x - b.center.x, y - b.center.y};
            const double inv_r2 = 1.0 / (b.radius * b.radius);
            const auto m = mollifier_q(rel.dot(rel) * inv_r2);
            g = g + (b.amplitude * m.m1 * 2.0 * inv_r2) * rel;
        }
        return g;
    };
    auto hessf = [bumps_copy](double x, double y) {
        ScalarField::Hess h;
        for (const auto& b : bumps_copy) {
            const Vec2 rel{x - b.center.x, y - b.center.y};
            const double inv_r2 = 1.0 / (b.radius * b.radius);
            const auto m = mollifier_q(rel.dot(rel) * inv_r2);
            const double qx = 2.0 * rel.x * inv_r2;
            const double qy = 2.0 * rel.y * inv_r2;
            h.xx += b.amplitude * (m.m2 * qx * qx + m.m1 * 2.0 * inv_r2);
            h.xy += b.amplitude * m.m2 * qx * qy;
            h.yy += b.amplitude * (m.m2 * qy * qy + m.m1 * 2.0 * inv_r2);
        }
        return h;
    };
    return ScalarField::analytic(std::move(value), rad, std::move(gradf), std::move(hessf));
}

double bump_profile(double r, double center, double width) {
    const double s = (r - center) / width;
    return mollifier_q(s * s).m;
}

double bump_profile_deriv(double r, double center, double width) {
    const double s = (r - center) / width;
    return mollifier_q(s * s).m1 * 2.0 * s / width;
}

std::complex<double> angular_mode_coeff_a(const AngularMode& m, double r) {
    return std::polar(m.amp_a, m.phase_a) * bump_profile(r, m.r_center, m.r_width);
}

std::complex<double> angular_mode_coeff_b(const AngularMode& m, double r) {
    return std::polar(m.amp_b, m.phase_b) * bump_profile(r, m.r_center, m.r_width);
}

namespace {

void validate_mode(const AngularMode& m) {
    if (m.n < 0) throw std::domain_error("make_phantom: angular mode index must be >= 0");
    if (m.r_width <= 0.0) throw std::domain_error("make_phantom: mode r_width must be positive");
    if (m.n > 0 && m.r_center - m.r_width <= 0.0)
        throw std::domain_error("make_phantom: mode n>0 profile must vanish at the origin");
    if (m.n == 0 && (m.phase_a != 0.0 || m.phase_b != 0.0))
        throw std::domain_error("make_phantom: mode 0 requires zero phases");
}

// f1 = 2 Re(a_n(r) e^{i n phi}), f2 likewise; for n = 0 the coefficient is
// the profile itself.
VectorField angular_mode_field(const AngularMode& m) {
    validate_mode(m);
    const double rad = m.r_center + m.r_width;
    const double lo = std::max(0.0, m.r_center - m.r_width);
    auto component = [m, rad, lo](double amp, double phase) {
        return ScalarField::analytic(
            [m, amp, phase, lo, rad](double x, double y) {
                const double r = std::hypot(x, y);
                if (r <= lo || r >= rad || amp == 0.0) return 0.0;
                const double g = amp * bump_profile(r, m.r_center, m.r_width);
                if (m.n == 0) return g;
                return 2.0 * g * std::cos(m.n * std::atan2(y, x) + phase);
            },
            rad);
    };
    return {component(m.amp_a, m.phase_a), component(m.amp_b, m.phase_b)};
}

double declared_support(const PhantomSpec& spec) {
    double rad = 0.0;
    for (const auto& b : spec.potential_bumps) rad = std::max(rad, b.center.norm() + b.radius);
    for (const auto& b : spec.solenoidal_bumps) rad = std::max(rad, b.center.norm() + b.radius);
    for (const auto& m : spec.modes) rad = std::max(rad, m.r_center + m.r_width);
    return rad;
}

}  // namespace

VectorField make_phantom(const PhantomSpec& spec) {
    const double rad = declared_support(spec);
    if (!(rad < spec.support_bound))
        throw std::domain_error("make_phantom: support radius " + std::to_string(rad) +
                                " violates bound " + std::to_string(spec.support_bound));

    std::vector<VectorField> parts;
    switch (spec.kind) {
        case PhantomKind::potential:
            parts.push_back(grad(bump_scalar(spec.potential_bumps)));
            break;
        case PhantomKind::solenoidal:
            parts.push_back(grad_perp(bump_scalar(spec.solenoidal_bumps)));
            break;
        case PhantomKind::angular_mode:
            if (spec.modes.size() != 1)
                throw std::domain_error("make_phantom: angular_mode kind takes exactly one mode");
            parts.push_back(angular_mode_field(spec.modes[0]));
            break;
        case PhantomKind::mixture:
            if (!spec.potential_bumps.empty())
                parts.push_back(grad(bump_scalar(spec.potential_bumps)));
            if (!spec.solenoidal_bumps.empty())
                parts.push_back(grad_perp(bump_scalar(spec.solenoidal_bumps)));
            for (const auto& m : spec.modes) parts.push_back(angular_mode_field(m));
            if (parts.empty()) throw std::domain_error("make_phantom: empty mixture");
            break;
    }
    VectorField out = parts[0];
    for (size_t k = 1; k < parts.size(); ++k) out = out + parts[k];
    return out;
}

VectorField sample_to_grid(const VectorField& field, int nx, int ny, double R) {
    if (nx < 3 || ny < 3) throw std::domain_error("sample_to_grid: nx, ny must be >= 3");
    if (R <= 0.0) throw std::domain_error("sample_to_grid: R must be positive");
    const GridSpec spec{nx, ny, R};
    std::vector<double> v1(static_cast<size_t>(nx) * ny);
    std::vector<double> v2(v1.size());
    const double sup = field.support_radius();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double x = spec.x(i);
            const double y = spec.y(j);
            const size_t k = static_cast<size_t>(j) * nx + i;
            if (x * x + y * y >= sup * sup) continue;  // exactly zero outside support
            const Vec2 val = field(x, y);
            v1[k] = val.x;
            v2[k] = val.y;
        }
    }
    return {ScalarField::grid(spec, std::move(v1)), ScalarField::grid(spec, std::move(v2))};
}

}  // namespace vlt
