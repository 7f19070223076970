#include "vlt/recon_mellin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vlt/errors.hpp"

namespace vlt {

namespace {

constexpr cplx kI{0.0, 1.0};

double parity_sign(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

struct QuadNodes {
    std::vector<double> x;
    std::vector<double> w;
};

// Composite Simpson nodes/weights on [a, b] with step <= target.
QuadNodes simpson_nodes(double a, double b, double target) {
    int m = static_cast<int>(std::ceil((b - a) / target));
    m += m % 2;
    m = std::max(m, 2);
    const double h = (b - a) / m;
    QuadNodes q;
    q.x.resize(m + 1);
    q.w.resize(m + 1);
    for (int k = 0; k <= m; ++k) {
        q.x[k] = a + k * h;
        double wk = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        q.w[k] = wk * h / 3.0;
    }
    return q;
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
QuadNodes gauss_legendre(int n) {
    QuadNodes q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return q;
}

// Panels of 16-point Gauss-Legendre over [a, b].
QuadNodes panel_gl(double a, double b, int panels) {
    static const QuadNodes base = gauss_legendre(16);
    QuadNodes q;
    q.x.reserve(static_cast<size_t>(panels) * base.x.size());
    q.w.reserve(q.x.capacity());
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (size_t k = 0; k < base.x.size(); ++k) {
            q.x.push_back(lo + 0.5 * h * (base.x[k] + 1.0));
            q.w.push_back(0.5 * h * base.w[k]);
        }
    }
    return q;
}

// out[j] += sum_k base[k] * exp(i * (om0 + j*dom) * L[k]), the shared inner
// loop of every contour-batched transform. One complex multiply per (k, j)
// via phase recurrence.
void accumulate_oscillatory(std::span<const cplx> base, std::span<const double> L, double om0,
                            double dom, std::span<cplx> out) {
    for (size_t k = 0; k < base.size(); ++k) {
        cplx phase = std::polar(1.0, om0 * L[k]);
        const cplx step = std::polar(1.0, dom * L[k]);
        const cplx b = base[k];
        for (size_t j = 0; j < out.size(); ++j) {
            out[j] += b * phase;
            phase *= step;
        }
    }
}

void check_theta(double theta, const char* who) {
    if (!(theta > 0.0 && theta < kPi / 2.0))
        throw std::domain_error(std::string(who) + ": theta outside (0, pi/2)");
}

}  // namespace

cplx FourierProfiles::interp(int n, double x) const {
    const auto& m = mode(n);
    if (n_t < 2) throw std::domain_error("FourierProfiles::interp: grid too small");
    const double f = std::clamp(x / t_max, 0.0, 1.0) * (n_t - 1);
    const int j0 = std::min(static_cast<int>(f), n_t - 2);
    const double lam = f - j0;
    return (1.0 - lam) * m[j0] + lam * m[j0 + 1];
}

FourierProfiles angular_fft_profiles(const VSinogram& sino, int max_mode) {
    if (max_mode < 0) throw std::domain_error("angular_fft_profiles: max_mode must be >= 0");
    if (sino.n_beta < 2 * max_mode + 2)
        throw std::domain_error("angular_fft_profiles: n_beta = " + std::to_string(sino.n_beta) +
                                " too small for max_mode = " + std::to_string(max_mode) +
                                " (need >= 2*max_mode + 2)");
    const double tol = 1e-9 * sino.R;
    if (std::abs(sino.d_min) > tol || std::abs(sino.d_max - sino.R) > tol)
        throw std::domain_error("angular_fft_profiles: d grid must cover [0, R]");

    FourierProfiles out;
    out.role = sino.kind == VKind::longitudinal ? ProfileRole::p_n : ProfileRole::q_n;
    out.max_mode = max_mode;
    out.n_t = sino.n_d;
    out.t_max = sino.R;
    out.coeff.assign(2 * max_mode + 1, std::vector<cplx>(sino.n_d));

    // t_j = R - d_{n_d-1-j}; discrete Fourier coefficient per row
    const double inv_nb = 1.0 / sino.n_beta;
    for (int n = -max_mode; n <= max_mode; ++n) {
        auto& row = out.mode(n);
        for (int i = 0; i < sino.n_beta; ++i) {
            const cplx w = std::polar(inv_nb, -n * sino.beta(i));
            const double* vals = &sino.values[static_cast<size_t>(i) * sino.n_d];
            for (int j = 0; j < sino.n_d; ++j) row[j] += vals[sino.n_d - 1 - j] * w;
        }
    }
    return out;
}

double kernel_psi(double theta, double t) {
    check_theta(theta, "kernel_psi");
    const double arg = t * std::sin(theta);
    if (arg > 1.0 || t < 0.0)
        throw std::domain_error("kernel_psi: t sin(theta) must lie in [0, 1]");
    return std::asin(arg) + theta;
}

namespace {

// kernel_h with a floor under 1 - t^2 sin^2(theta); the collocation assembly
// uses the floor to replace the edge pole by its quadrature-cell average.
cplx kernel_h_floored(int n, double theta, double t, double g_floor) {
    if (!(t >= 0.0)) throw std::domain_error("kernel_h: t must be nonnegative");
    if (t == 0.0)  // continuous limit from the right
        return parity_sign(n) * std::polar(1.0, (n + 1.0) * theta);
    const double st = std::sin(theta);
    if (t * st > 1.0) return {};  // beyond the reach of the scattered leg

    const double psi = std::asin(t * st) + theta;
    const double root = std::sqrt(std::max(g_floor, 1.0 - t * t * st * st));
    const cplx eit = std::polar(1.0, theta);

    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    const cplx first = parity_sign(n) * eit * std::polar(1.0, n * psi) *
                       ((1.0 + t * cpsi + t * t * spsi * st / root) /
                        std::sqrt(1.0 + t * t + 2.0 * t * cpsi));
    if (t <= 1.0) return first;

    const double phi2 = 2.0 * theta - psi;
    const double cphi = std::cos(phi2), sphi = std::sin(phi2);
    const cplx second = eit * std::polar(1.0, n * phi2) *
                        ((1.0 - t * cphi + t * t * sphi * st / root) /
                         std::sqrt(1.0 + t * t - 2.0 * t * cphi));
    return first - second;
}

}  // namespace

cplx kernel_h(int n, double theta, double t) {
    check_theta(theta, "kernel_h");
    return kernel_h_floored(n, theta, t, 0.0);
}

cplx kernel_h_times_cos(int n, double theta, double chi) {
    check_theta(theta, "kernel_h_times_cos");
    if (!(chi > 0.0 && chi <= kPi / 2.0))
        throw std::domain_error("kernel_h_times_cos: chi outside (0, pi/2]");
    const double st = std::sin(theta);
    const double tau = std::sin(chi) / st;
    const double cchi = std::cos(chi);
    const double psi = chi + theta;
    const cplx eit = std::polar(1.0, theta);

    const double cpsi = std::cos(psi), spsi = std::sin(psi);
    const cplx first = parity_sign(n) * eit * std::polar(1.0, n * psi) *
                       (((1.0 + tau * cpsi) * cchi + tau * tau * spsi * st) /
                        std::sqrt(1.0 + tau * tau + 2.0 * tau * cpsi));
    if (chi <= theta) return first;

    const double phi2 = theta - chi;  // = 2*theta - psi
    const double cphi = std::cos(phi2), sphi = std::sin(phi2);
    const cplx second = eit * std::polar(1.0, n * phi2) *
                        (((1.0 - tau * cphi) * cchi + tau * tau * sphi * st) /
                         std::sqrt(1.0 + tau * tau - 2.0 * tau * cphi));
    return first - second;
}

int ContourSpec::n_samples() const {
    if (omega_step <= 0.0 || omega_max <= 0.0)
        throw std::domain_error("ContourSpec: omega_max and omega_step must be positive");
    return 2 * static_cast<int>(std::lround(omega_max / omega_step)) + 1;
}

namespace {

cplx mellin_log_quadrature(const std::function<cplx(double)>& f, double r_max, cplx s,
                           int n_log_nodes, double floor_frac) {
    if (!(s.real() > 0.0)) throw std::domain_error("mellin_numeric: Re(s) must be positive");
    if (!(r_max > 0.0)) throw std::domain_error("mellin_numeric: r_max must be positive");
    if (!(floor_frac > 0.0 && floor_frac < 1.0))
        throw std::domain_error("mellin_numeric: floor_frac must lie in (0,1)");
    const double u_min = std::log(floor_frac * r_max);
    const double u_max = std::log(r_max);
    const QuadNodes q = simpson_nodes(u_min, u_max, (u_max - u_min) / std::max(2, n_log_nodes));
    cplx acc{};
    for (size_t k = 0; k < q.x.size(); ++k) {
        const double p = std::exp(q.x[k]);
        // p^{s-1} f(p) dp = e^{s u} f(e^u) du
        acc += q.w[k] * f(p) * std::polar(std::exp(s.real() * q.x[k]), s.imag() * q.x[k]);
    }
    // below the floor the profile is taken constant: f(p_min) p_min^s / s
    const double p_min = floor_frac * r_max;
    acc += f(p_min) * std::pow(cplx(p_min, 0.0), s) / s;
    return acc;
}

}  // namespace

cplx mellin_numeric(const std::function<cplx(double)>& f, double r_max, cplx s, int n_log_nodes,
                    double floor_frac) {
    return mellin_log_quadrature(f, r_max, s, n_log_nodes, floor_frac);
}

cplx mellin_numeric(std::span<const cplx> profile, double t_max, cplx s, int n_log_nodes,
                    double floor_frac) {
    if (profile.size() < 2) throw std::domain_error("mellin_numeric: profile too short");
    const double scale = (profile.size() - 1) / t_max;
    auto interp = [profile, scale](double p) {
        const double f = std::clamp(p * scale, 0.0, static_cast<double>(profile.size() - 1));
        const size_t j0 = std::min(static_cast<size_t>(f), profile.size() - 2);
        const double lam = f - j0;
        return (1.0 - lam) * profile[j0] + lam * profile[j0 + 1];
    };
    return mellin_log_quadrature(interp, t_max, s, n_log_nodes, floor_frac);
}

std::vector<cplx> mellin_contour(std::span<const cplx> profile, double t_max, double re_z,
                                 int n_omega, double omega_step, double floor_frac) {
    if (!(re_z > 0.0)) throw std::domain_error("mellin_contour: Re(z) must be positive");
    if (profile.size() < 2) throw std::domain_error("mellin_contour: profile too short");
    if (n_omega < 1 || omega_step <= 0.0)
        throw std::domain_error("mellin_contour: bad omega grid");
    const double om_hi = 0.5 * (n_omega - 1) * omega_step;
    const double om0 = -om_hi;

    const double u_min = std::log(floor_frac * t_max);
    const double u_max = std::log(t_max);
    const double du = std::min(0.01, 0.25 / std::max(1.0, om_hi));
    const QuadNodes q = simpson_nodes(u_min, u_max, du);

    const double scale = (profile.size() - 1) / t_max;
    std::vector<cplx> base(q.x.size());
    for (size_t k = 0; k < q.x.size(); ++k) {
        const double p = std::exp(q.x[k]);
        const double f = std::clamp(p * scale, 0.0, static_cast<double>(profile.size() - 1));
        const size_t j0 = std::min(static_cast<size_t>(f), profile.size() - 2);
        const double lam = f - j0;
        const cplx fp = (1.0 - lam) * profile[j0] + lam * profile[j0 + 1];
        base[k] = q.w[k] * fp * std::exp(re_z * q.x[k]);
    }

    std::vector<cplx> out(n_omega);
    accumulate_oscillatory(base, q.x, om0, omega_step, out);

    const double p_min = floor_frac * t_max;
    const cplx f_min = profile[0] + (profile[1] - profile[0]) * (p_min * scale);
    for (int j = 0; j < n_omega; ++j) {
        const cplx z{re_z, om0 + j * omega_step};
        out[j] += f_min * std::pow(cplx(p_min, 0.0), z) / z;
    }
    return out;
}

namespace {

constexpr double kHTailFloor = 1e-8;  // piece-1 log grid starts at this t

// Quadrature node set for M h_n at Re(z) = re_z, accurate for |Im z| up to
// om_hi: a log-grid piece over t in (kHTailFloor, 1] and an arcsine-
// substituted piece over [1, 1/sin theta] whose cos(chi) Jacobian cancels
// the kernel's edge singularity. Each entry contributes
// base[k] * e^{i Im(z) L[k]}; the analytic below-floor tail
// h_n(0+) e^{z u_min} / z is NOT included and must be added per z.
struct HQuad {
    std::vector<cplx> base;
    std::vector<double> L;
};

HQuad mellin_h_nodes(int n, double theta, double re_z, double om_hi) {
    HQuad out;
    const double u_min = std::log(kHTailFloor);
    const double du = std::min(0.01, 0.25 / std::max(1.0, om_hi));
    const QuadNodes q1 = simpson_nodes(u_min, 0.0, du);
    for (size_t k = 0; k < q1.x.size(); ++k) {
        const double t = std::exp(q1.x[k]);
        out.base.push_back(q1.w[k] * kernel_h(n, theta, t) * std::exp(re_z * q1.x[k]));
        out.L.push_back(q1.x[k]);
    }
    // t^{z-1} h_n(t) dt = e^{(z-1)L} [h_n cos(chi)] / sin(theta) dchi,
    // L = log(sin(chi)/sin(theta))
    const double st = std::sin(theta);
    const double span = std::log(1.0 / st);
    const int panels = std::max(24, static_cast<int>(std::ceil(om_hi * span / 2.0)));
    const QuadNodes q2 = panel_gl(theta, kPi / 2.0, panels);
    for (size_t k = 0; k < q2.x.size(); ++k) {
        const double chi = q2.x[k];
        const double L = std::log(std::sin(chi) / st);
        out.base.push_back(q2.w[k] * kernel_h_times_cos(n, theta, chi) / st *
                           std::exp((re_z - 1.0) * L));
        out.L.push_back(L);
    }
    return out;
}

cplx mellin_h_tail(int n, double theta, cplx z) {
    const cplx h0 = parity_sign(n) * std::polar(1.0, (n + 1.0) * theta);
    return h0 * std::exp(z * std::log(kHTailFloor)) / z;
}

}  // namespace

cplx mellin_h(int n, double theta, cplx z) {
    check_theta(theta, "mellin_h");
    if (!(z.real() > 0.0)) throw std::domain_error("mellin_h: Re(z) must be positive");
    const HQuad q = mellin_h_nodes(n, theta, z.real(), std::abs(z.imag()));
    cplx acc{};
    for (size_t k = 0; k < q.base.size(); ++k)
        acc += q.base[k] * std::polar(1.0, z.imag() * q.L[k]);
    return acc + mellin_h_tail(n, theta, z);
}

std::vector<cplx> mellin_h_contour(int n, double theta, double re_z, int n_omega,
                                   double omega_step) {
    check_theta(theta, "mellin_h_contour");
    if (!(re_z > 0.0)) throw std::domain_error("mellin_h_contour: Re(z) must be positive");
    const double om_hi = 0.5 * (n_omega - 1) * omega_step;
    const double om0 = -om_hi;

    const HQuad q = mellin_h_nodes(n, theta, re_z, om_hi);
    std::vector<cplx> out(n_omega);
    accumulate_oscillatory(q.base, q.L, om0, omega_step, out);
    for (int j = 0; j < n_omega; ++j)
        out[j] += mellin_h_tail(n, theta, {re_z, om0 + j * omega_step});
    return out;
}

ModeCoefficients mellin_coefficients(const FourierProfiles& p, const FourierProfiles& q, int n,
                                     const ContourSpec& contour, double theta, double denom_eps) {
    check_theta(theta, "mellin_coefficients");
    if (!(contour.c > 1.0))
        throw std::domain_error("mellin_coefficients: contour abscissa must exceed 1");
    if (p.n_t != q.n_t || p.max_mode != q.max_mode || p.t_max != q.t_max)
        throw std::domain_error("mellin_coefficients: p and q profiles on different grids");
    if (std::abs(p.t_max - 1.0) > 1e-12)
        throw std::domain_error(
            "mellin_coefficients: profiles must be in unit-radius coordinates (t_max = 1)");
    if (std::abs(n) + 1 > p.max_mode)
        throw std::domain_error("mellin_coefficients: modes n-1, n+1 not available");

    const int n_omega = contour.n_samples();
    const double re_z = contour.c - 1.0;

    // The data relations decouple in c+- = a_n +- i b_n:
    //   -(p_{n-1} + i q_{n-1}) pairs with c+ and the kernel phased by
    //   e^{-2 i theta}; -(p_{n+1} - i q_{n+1}) pairs with c- and the plain
    //   kernel. Mellin-transforming turns both into scalar quotients.
    std::vector<cplx> prof_plus(p.n_t), prof_minus(p.n_t);
    for (int j = 0; j < p.n_t; ++j) {
        prof_plus[j] = -(p.mode(n - 1)[j] + kI * q.mode(n - 1)[j]);
        prof_minus[j] = -(p.mode(n + 1)[j] - kI * q.mode(n + 1)[j]);
    }
    const std::vector<cplx> num_plus =
        mellin_contour(prof_plus, 1.0, re_z, n_omega, contour.omega_step);
    const std::vector<cplx> num_minus =
        mellin_contour(prof_minus, 1.0, re_z, n_omega, contour.omega_step);
    const std::vector<cplx> Mh = mellin_h_contour(n, theta, re_z, n_omega, contour.omega_step);
    const cplx phase = std::polar(1.0, -2.0 * theta);

    ModeCoefficients mc;
    mc.a.c = mc.b.c = contour.c;
    mc.a.omega_step = mc.b.omega_step = contour.omega_step;
    mc.a.values.resize(n_omega);
    mc.b.values.resize(n_omega);
    auto quotient = [&](cplx num, cplx den) {
        if (std::abs(den) < denom_eps) {
            ++mc.regularized;
            return num * std::conj(den) / (std::norm(den) + denom_eps * denom_eps);
        }
        return num / den;
    };
    for (int k = 0; k < n_omega; ++k) {
        const cplx z{re_z, contour.omega(k)};
        const cplx c_plus = quotient(num_plus[k], 1.0 / z + phase * Mh[k]);
        const cplx c_minus = quotient(num_minus[k], 1.0 / z + Mh[k]);
        mc.a.values[k] = 0.5 * (c_plus + c_minus);
        mc.b.values[k] = (c_plus - c_minus) / (2.0 * kI);
    }
    return mc;
}

std::vector<cplx> inverse_mellin(const MellinSamples& M, std::span<const double> r,
                                 OriginRule origin) {
    if (M.size() < 2) throw std::domain_error("inverse_mellin: too few contour samples");
    std::vector<cplx> out(r.size());
    // trapezoid weights: halve the endpoint samples
    std::vector<cplx> weighted(M.values);
    weighted.front() *= 0.5;
    weighted.back() *= 0.5;
    const double om0 = M.omega(0);

    int first_positive = -1;
    for (size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 0.0) throw std::domain_error("inverse_mellin: negative radius");
        if (r[i] == 0.0) continue;
        if (first_positive < 0) first_positive = static_cast<int>(i);
        const double lr = -std::log(r[i]);  // r^{-i omega} = e^{i omega * lr}
        cplx phase = std::polar(1.0, om0 * lr);
        const cplx step = std::polar(1.0, M.omega_step * lr);
        cplx acc{};
        for (int k = 0; k < M.size(); ++k) {
            acc += weighted[k] * phase;
            phase *= step;
        }
        out[i] = acc * std::pow(r[i], -M.c) * M.omega_step / kTwoPi;
    }
    for (size_t i = 0; i < r.size(); ++i) {
        if (r[i] == 0.0 && origin == OriginRule::copy_first_positive && first_positive >= 0)
            out[i] = out[static_cast<size_t>(first_positive)];
    }
    return out;
}

cplx kernel_convolution(const std::function<cplx(double)>& a, double r_sup, int n, double theta,
                        double t, int panels) {
    check_theta(theta, "kernel_convolution");
    if (t < 0.0) throw std::domain_error("kernel_convolution: t must be nonnegative");
    const double st = std::sin(theta);
    const double r_star = t * st;  // smallest radius the scattered leg reaches
    if (r_star >= r_sup) return {};

    cplx acc{};
    // middle-branch piece (r_star, min(t, r_sup)]: substitute r = r_star +
    // sigma^2 so the inverse-square-root edge becomes a smooth integrand
    const double mid_hi = std::min(t, r_sup);
    if (mid_hi > r_star) {
        const QuadNodes q = panel_gl(0.0, std::sqrt(mid_hi - r_star), panels);
        for (size_t k = 0; k < q.x.size(); ++k) {
            const double sigma = q.x[k];
            const double r = r_star + sigma * sigma;
            acc += q.w[k] * 2.0 * sigma * a(r) * kernel_h(n, theta, t / r);
        }
    }
    // smooth piece [t, r_sup] where t/r <= 1
    if (r_sup > t) {
        const QuadNodes q = panel_gl(std::max(t, 0.0), r_sup, panels);
        for (size_t k = 0; k < q.x.size(); ++k) {
            const double r = q.x[k];
            const cplx h = t == 0.0 ? parity_sign(n) * std::polar(1.0, (n + 1.0) * theta)
                                    : kernel_h(n, theta, t / r);
            acc += q.w[k] * a(r) * h;
        }
    }
    return acc;
}

CollocationResult direct_collocation_solve(const FourierProfiles& p, const FourierProfiles& q,
                                           int n, std::span<const double> r_nodes, double theta,
                                           int quad_refine) {
    check_theta(theta, "direct_collocation_solve");
    if (p.n_t != q.n_t || p.max_mode != q.max_mode || p.t_max != q.t_max)
        throw std::domain_error("direct_collocation_solve: p and q profiles on different grids");
    if (std::abs(n) + 1 > p.max_mode)
        throw std::domain_error("direct_collocation_solve: modes n-1, n+1 not available");
    if (r_nodes.size() < 2 || quad_refine < 1)
        throw std::domain_error("direct_collocation_solve: bad discretization parameters");
    for (size_t j = 0; j + 1 < r_nodes.size(); ++j)
        if (!(r_nodes[j] < r_nodes[j + 1]))
            throw std::domain_error("direct_collocation_solve: r_nodes must increase");

    const int n_t = p.n_t;
    const int n_r = static_cast<int>(r_nodes.size());
    const double t_max = p.t_max;
    const double st = std::sin(theta);

    // fine trapezoid grid refining the t grid
    const int n_f = quad_refine * (n_t - 1) + 1;
    const double hf = t_max / (n_f - 1);
    std::vector<double> hat_lo(n_f), hat_w(n_f);
    std::vector<int> hat_j(n_f);
    for (int f = 0; f < n_f; ++f) {
        const double r = f * hf;
        const auto it = std::upper_bound(r_nodes.begin(), r_nodes.end(), r);
        int j = static_cast<int>(it - r_nodes.begin()) - 1;
        j = std::clamp(j, 0, n_r - 2);
        const double lam = std::clamp((r - r_nodes[j]) / (r_nodes[j + 1] - r_nodes[j]), 0.0, 1.0);
        hat_j[f] = j;
        hat_w[f] = lam;
        hat_lo[f] = 1.0 - lam;
    }

    // The partial-integral matrix T comes from the trapezoid rule on the
    // refined grid; that is exact for the hat basis since every kink is a
    // fine node. The convolution matrix C needs more care: its integrand has
    // an integrable 1/sqrt edge at r = t sin(theta), so each row integrates
    // with Gauss-Legendre panels and the substitution r = edge + sigma^2
    // across the singular piece (a trapezoid row there leaves O(sqrt(h))
    // inconsistencies that the near-null directions of this smoothing
    // operator blow up).
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(n_t, n_r);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n_t, n_r);
    auto hat_cell = [&](double r, int& j, double& lam) {
        const auto it = std::upper_bound(r_nodes.begin(), r_nodes.end(), r);
        j = std::clamp(static_cast<int>(it - r_nodes.begin()) - 1, 0, n_r - 2);
        lam = std::clamp((r - r_nodes[j]) / (r_nodes[j + 1] - r_nodes[j]), 0.0, 1.0);
    };
    for (int i = 0; i < n_t; ++i) {
        const double t_i = p.t(i);
        const int f_start = i * quad_refine;
        for (int f = f_start; f < n_f && f_start < n_f - 1; ++f) {
            const double w = (f == f_start || f == n_f - 1) ? 0.5 * hf : hf;
            T(i, hat_j[f]) += hat_lo[f] * w;
            T(i, hat_j[f] + 1) += hat_w[f] * w;
        }

        const double edge = t_i * st;
        if (edge >= t_max) continue;
        auto add_nodes = [&](const QuadNodes& q, bool sigma_subst) {
            for (size_t k = 0; k < q.x.size(); ++k) {
                double r, w;
                if (sigma_subst) {
                    r = edge + q.x[k] * q.x[k];
                    w = q.w[k] * 2.0 * q.x[k];
                } else {
                    r = q.x[k];
                    w = q.w[k];
                }
                if (r <= 0.0) continue;
                const cplx hval = w * kernel_h(n, theta, t_i / r);
                int j;
                double lam;
                hat_cell(r, j, lam);
                C(i, j) += (1.0 - lam) * hval;
                C(i, j + 1) += lam * hval;
            }
        };
        const double mid = std::min(t_i, t_max);
        if (mid > edge) add_nodes(panel_gl(0.0, std::sqrt(mid - edge), 12), true);
        if (t_max > t_i) add_nodes(panel_gl(t_i, t_max, 12), false);
    }

    // c+- = a_n +- i b_n satisfy decoupled relations with the kernel phased
    // by e^{-2 i theta} in the plus channel
    Eigen::VectorXcd rhs_plus(n_t), rhs_minus(n_t);
    for (int i = 0; i < n_t; ++i) {
        rhs_plus(i) = -(p.mode(n - 1)[i] + kI * q.mode(n - 1)[i]);
        rhs_minus(i) = -(p.mode(n + 1)[i] - kI * q.mode(n + 1)[i]);
    }
    // first-kind systems are nearly rank-deficient at fine grids; the
    // minimum-norm least-squares solution keeps near-null components out
    const cplx phase = std::polar(1.0, -2.0 * theta);
    const Eigen::MatrixXcd A_plus = T + phase * C;
    const Eigen::MatrixXcd A_minus = T + C;
    auto solve_min_norm = [](const Eigen::MatrixXcd& A, const Eigen::VectorXcd& rhs) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod;
        cod.setThreshold(1e-10);  // must precede compute(): it shapes the completion
        cod.compute(A);
        return Eigen::VectorXcd(cod.solve(rhs));
    };
    const Eigen::VectorXcd x_plus = solve_min_norm(A_plus, rhs_plus);
    const Eigen::VectorXcd x_minus = solve_min_norm(A_minus, rhs_minus);

    CollocationResult res;
    res.a.resize(n_r);
    res.b.resize(n_r);
    for (int j = 0; j < n_r; ++j) {
        res.a[j] = 0.5 * (x_plus(j) + x_minus(j));
        res.b[j] = (x_plus(j) - x_minus(j)) / (2.0 * kI);
    }
    const double np = rhs_plus.norm(), nm = rhs_minus.norm();
    res.residual_a = np > 0.0 ? (A_plus * x_plus - rhs_plus).norm() / np : 0.0;
    res.residual_b = nm > 0.0 ? (A_minus * x_minus - rhs_minus).norm() / nm : 0.0;
    res.warning = res.residual_a > 1e-3 || res.residual_b > 1e-3;
    return res;
}

namespace {

FourierProfiles to_unit_radius(FourierProfiles prof, double R) {
    prof.t_max = 1.0;
    for (auto& row : prof.coeff)
        for (auto& v : row) v /= R;
    return prof;
}

}  // namespace

PartialReconResult reconstruct_partial(const VSinogram& L, const VSinogram& T, int max_mode,
                                       const ContourSpec& contour, int nx, int ny,
                                       PartialMethod method, int threads) {
    if (L.kind != VKind::longitudinal || T.kind != VKind::transverse)
        throw std::domain_error("reconstruct_partial: expects (longitudinal, transverse) data");
    if (L.R != T.R || L.theta != T.theta || L.n_beta != T.n_beta || L.n_d != T.n_d ||
        L.d_min != T.d_min || L.d_max != T.d_max)
        throw std::domain_error("reconstruct_partial: L and T grids differ");
    if (max_mode < 0) throw std::domain_error("reconstruct_partial: max_mode must be >= 0");
    if (nx < 1 || ny < 1) throw std::domain_error("reconstruct_partial: output grid too small");

    const double R = L.R;
    const double theta = L.theta;
    const FourierProfiles p = to_unit_radius(angular_fft_profiles(L, max_mode + 1), R);
    const FourierProfiles q = to_unit_radius(angular_fft_profiles(T, max_mode + 1), R);

    const int n_t = p.n_t;
    std::vector<double> r_grid(n_t);
    for (int j = 0; j < n_t; ++j) r_grid[j] = static_cast<double>(j) / (n_t - 1);

    FourierProfiles A, B;
    A.role = ProfileRole::a_n;
    B.role = ProfileRole::b_n;
    A.max_mode = B.max_mode = max_mode;
    A.n_t = B.n_t = n_t;
    A.t_max = B.t_max = 1.0;
    A.coeff.assign(2 * max_mode + 1, std::vector<cplx>(n_t));
    B.coeff.assign(2 * max_mode + 1, std::vector<cplx>(n_t));

    PartialReconResult result;
    double data_scale = 0.0;
    for (const FourierProfiles* prof : {&p, &q})
        for (const auto& row : prof->coeff)
            for (const cplx& v : row) data_scale = std::max(data_scale, std::abs(v));
    std::vector<int> reg_counts(2 * max_mode + 1, 0);
    std::vector<char> warn(2 * max_mode + 1, 0);
    parallel_for(
        2 * max_mode + 1,
        [&](int idx) {
            const int n = idx - max_mode;
            if (method == PartialMethod::mellin) {
                const ModeCoefficients mc = mellin_coefficients(p, q, n, contour, theta);
                const OriginRule rule =
                    n == 0 ? OriginRule::copy_first_positive : OriginRule::zero;
                A.coeff[idx] = inverse_mellin(mc.a, r_grid, rule);
                B.coeff[idx] = inverse_mellin(mc.b, r_grid, rule);
                reg_counts[idx] = mc.regularized;
            } else {
                // collocate all data rows onto unknowns at every other node:
                // the overdetermined system keeps the first-kind operator's
                // small singular values in check
                std::vector<double> nodes;
                for (int j = 0; j < n_t; j += 2) nodes.push_back(r_grid[j]);
                if (nodes.back() != r_grid.back()) nodes.push_back(r_grid.back());
                const CollocationResult cr = direct_collocation_solve(p, q, n, nodes, theta);
                auto lerp = [&](const std::vector<cplx>& v, double r) {
                    const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
                    const int j = std::clamp(static_cast<int>(it - nodes.begin()) - 1, 0,
                                             static_cast<int>(nodes.size()) - 2);
                    const double lam =
                        std::clamp((r - nodes[j]) / (nodes[j + 1] - nodes[j]), 0.0, 1.0);
                    return (1.0 - lam) * v[j] + lam * v[j + 1];
                };
                for (int j = 0; j < n_t; ++j) {
                    A.coeff[idx][j] = lerp(cr.a, r_grid[j]);
                    B.coeff[idx][j] = lerp(cr.b, r_grid[j]);
                }
                // residual ratios of channels whose combination is pure noise
                // mean nothing; gate each on its own right-hand side
                double mag_plus = 0.0, mag_minus = 0.0;
                for (int j = 0; j < n_t; ++j) {
                    mag_plus = std::max(mag_plus, std::abs(p.mode(n - 1)[j] + kI * q.mode(n - 1)[j]));
                    mag_minus = std::max(mag_minus, std::abs(p.mode(n + 1)[j] - kI * q.mode(n + 1)[j]));
                }
                const bool warn_plus = cr.residual_a > 1e-3 && mag_plus > 1e-6 * data_scale;
                const bool warn_minus = cr.residual_b > 1e-3 && mag_minus > 1e-6 * data_scale;
                warn[idx] = (warn_plus || warn_minus) ? 1 : 0;
            }
        },
        threads);
    for (int c : reg_counts) result.regularized += c;
    for (char w : warn) result.collocation_warning |= (w != 0);

    // conjugate-symmetry defect, then enforce realness of the resummation
    double scale = 0.0, defect = 0.0;
    for (const auto* prof : {&A, &B})
        for (const auto& row : prof->coeff)
            for (const cplx& v : row) scale = std::max(scale, std::abs(v));
    for (auto* prof : {&A, &B}) {
        for (int n = 0; n <= max_mode; ++n) {
            auto& pos = prof->mode(n);
            auto& neg = prof->mode(-n);
            for (int j = 0; j < n_t; ++j) {
                defect = std::max(defect, 0.5 * std::abs(pos[j] - std::conj(neg[j])));
                const cplx sym = 0.5 * (pos[j] + std::conj(neg[j]));
                pos[j] = sym;
                if (n > 0) neg[j] = std::conj(sym);
            }
        }
    }
    result.max_imag_residual = scale > 0.0 ? defect / scale : 0.0;

    // resum on the Cartesian grid; after symmetrization the series is real
    const GridSpec spec{nx, ny, R};
    std::vector<double> v1(static_cast<size_t>(nx) * ny);
    std::vector<double> v2(v1.size());
    parallel_for(
        ny,
        [&](int j) {
            const double y = spec.y(j);
            for (int i = 0; i < nx; ++i) {
                const double x = spec.x(i);
                const double rho = std::hypot(x, y) / R;
                if (rho > 1.0) continue;
                const double phi = std::atan2(y, x);
                const cplx e1 = std::polar(1.0, phi);
                cplx en{1.0, 0.0};
                double s1 = A.interp(0, rho).real();
                double s2 = B.interp(0, rho).real();
                for (int m = 1; m <= max_mode; ++m) {
                    en *= e1;
                    s1 += 2.0 * (A.interp(m, rho) * en).real();
                    s2 += 2.0 * (B.interp(m, rho) * en).real();
                }
                v1[static_cast<size_t>(j) * nx + i] = s1;
                v2[static_cast<size_t>(j) * nx + i] = s2;
            }
        },
        threads);
    result.field = VectorField(ScalarField::grid(spec, std::move(v1)),
                               ScalarField::grid(spec, std::move(v2)));

    // report profiles in physical radius
    A.t_max = B.t_max = R;
    result.a = std::move(A);
    result.b = std::move(B);
    return result;
}

}  // namespace vlt
