#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "vlt/forward.hpp"

namespace vlt {

using cplx = std::complex<double>;

enum class ProfileRole { a_n, b_n, p_n, q_n };

/// Radial profiles indexed by angular mode n in [-max_mode, max_mode], all
/// sampled on the uniform grid t_j = j * t_max / (n_t - 1).
struct FourierProfiles {
    ProfileRole role = ProfileRole::p_n;
    int max_mode = 0;
    int n_t = 0;
    double t_max = 0.0;
    std::vector<std::vector<cplx>> coeff;  // [n + max_mode]

    double t(int j) const { return t_max * j / (n_t - 1); }
    const std::vector<cplx>& mode(int n) const { return coeff[static_cast<size_t>(n + max_mode)]; }
    std::vector<cplx>& mode(int n) { return coeff[static_cast<size_t>(n + max_mode)]; }
    /// Linear interpolation of mode n at radius/offset x in [0, t_max].
    cplx interp(int n, double x) const;
};

/// Angular Fourier coefficients of V-line data reparametrized to t = R - d.
/// Requires a uniform beta grid with n_beta >= 2*max_mode + 2 and d covering
/// [0, R]. Row j of the result is the coefficient at t_j = j*R/(n_d-1).
FourierProfiles angular_fft_profiles(const VSinogram& sino, int max_mode);

/// psi(t) = asin(t sin theta) + theta, the polar angle parameter of the
/// scattered leg. Requires t sin(theta) <= 1.
double kernel_psi(double theta, double t);

/// The mode-n scattering kernel h_n(t) in unit-radius coordinates:
/// piecewise over (0,1], (1, 1/sin theta), and zero beyond 1/sin theta.
/// Branch points evaluate by left limit; the value at t = 1/sin theta is the
/// (unbounded) middle-branch expression, which quadratures never sample.
/// t = 0 returns the continuous limit (-1)^n e^{i(n+1)theta}.
cplx kernel_h(int n, double theta, double t);

/// h_n(sin(chi)/sin(theta)) * cos(chi) for chi in (0, pi/2]: the cos factor
/// cancels the inverse-square-root singularity at t = 1/sin theta, which
/// makes this the form all kernel quadratures integrate.
cplx kernel_h_times_cos(int n, double theta, double chi);

/// Mellin samples along the vertical contour Re(s) = c at the uniform
/// frequencies omega_k = (k - n/2) * omega_step.
struct MellinSamples {
    double c = 2.0;
    double omega_step = 0.05;
    std::vector<cplx> values;

    int size() const { return static_cast<int>(values.size()); }
    double omega(int k) const { return (k - (size() - 1) / 2) * omega_step; }
    cplx s(int k) const { return {c, omega(k)}; }
};

// Default abscissa: the denominators 1/(s-1) + (phase) M h_n(s-1) vanish at
// integer s-1 = |n|-1 (a range condition of the data combinations), so c
// must keep s-1 away from the integers; c - 1 = 0.3 also keeps the r^{-c}
// factor of the inversion from amplifying contour noise at small radii.
struct ContourSpec {
    double c = 1.3;          // contour abscissa, > 1 for the coefficient formulas
    double omega_max = 100.0;
    double omega_step = 0.05;

    int n_samples() const;
    double omega(int k) const { return (k - (n_samples() - 1) / 2) * omega_step; }
};

/// Numerical Mellin transform of a function supported on [0, r_max]:
/// log-substituted Simpson quadrature on [floor_frac*r_max, r_max] plus the
/// small-argument correction f(p_min) p_min^s / s. Requires Re(s) > 0.
cplx mellin_numeric(const std::function<cplx(double)>& f, double r_max, cplx s,
                    int n_log_nodes = 4000, double floor_frac = 1e-6);
/// Same for a uniformly sampled profile on [0, t_max] (linear interpolation).
cplx mellin_numeric(std::span<const cplx> profile, double t_max, cplx s, int n_log_nodes = 4000,
                    double floor_frac = 1e-6);

/// Mellin transform of h_n at z, Re(z) > 0. Uses a log grid on (0,1] and a
/// singularity-cancelling arcsine substitution on [1, 1/sin theta].
cplx mellin_h(int n, double theta, cplx z);

/// Batched Mellin transforms along a contour Re(z) = re_z at uniform
/// frequencies; one quadrature node set shared by all frequencies.
std::vector<cplx> mellin_contour(std::span<const cplx> profile, double t_max, double re_z,
                                 int n_omega, double omega_step, double floor_frac = 1e-6);
std::vector<cplx> mellin_h_contour(int n, double theta, double re_z, int n_omega,
                                   double omega_step);

struct ModeCoefficients {
    MellinSamples a;      // Mellin transform of a_n along Re(s) = c
    MellinSamples b;      // Mellin transform of b_n
    int regularized = 0;  // contour samples where |denominator| < eps
};

/// The quotient formulas for M a_n and M b_n from the data-side Mellin
/// transforms of p_{n+1} + p_{n-1}, q_{n+1} - q_{n-1} (and the companion
/// combination for b_n), divided by 2[1/(s-1) + M h_n(s-1)]. Profiles must
/// be in unit-radius coordinates (t_max = 1). Near-zero denominators are
/// replaced by the Tikhonov quotient num*conj(den)/(|den|^2 + eps^2).
ModeCoefficients mellin_coefficients(const FourierProfiles& p, const FourierProfiles& q, int n,
                                     const ContourSpec& contour, double theta,
                                     double denom_eps = 1e-8);

enum class OriginRule { zero, copy_first_positive };

/// Trapezoid discretization of the Mellin inversion integral:
/// f(r) ~ (1/2 pi) sum_k r^{-c - i omega_k} M(omega_k) delta_omega.
/// r = 0 follows `origin`: exact zero (modes n != 0) or a copy of the value
/// at the first positive node (mode 0).
std::vector<cplx> inverse_mellin(const MellinSamples& M, std::span<const double> r,
                                 OriginRule origin = OriginRule::zero);

/// Accurate evaluation of the multiplicative convolution
/// {[r a(r)] x h_n}(t) = int a(r) h_n(t/r) dr for a profile supported on
/// [0, r_sup]; Gauss-Legendre panels with a square-root substitution across
/// the kernel's singular edge. Used as the independent oracle for the data
/// relation and the collocation assembly.
cplx kernel_convolution(const std::function<cplx(double)>& a, double r_sup, int n, double theta,
                        double t, int panels = 32);

struct CollocationResult {
    std::vector<cplx> a, b;   // on the r_nodes grid
    double residual_a = 0.0;  // relative residual of the a+ib channel
    double residual_b = 0.0;  // relative residual of the a-ib channel
    bool warning = false;     // a residual exceeded 1e-3 * ||rhs||
};

/// Independent route to (a_n, b_n): collocate the two decoupled data
/// relations (in a_n +- i b_n) at every profile node, with unknowns as hat
/// functions on r_nodes. The running integral uses the trapezoid rule on a
/// `quad_refine`-times finer grid (exact for hats); the kernel convolution
/// integrates each row by Gauss-Legendre panels with a square-root
/// substitution across the kernel edge. Solved least-squares (minimum-norm).
/// Pass r_nodes strictly coarser than the data grid (every other node works
/// well): a square system sits too close to numerical rank deficiency for
/// this smoothing operator.
CollocationResult direct_collocation_solve(const FourierProfiles& p, const FourierProfiles& q,
                                           int n, std::span<const double> r_nodes, double theta,
                                           int quad_refine = 8);

enum class PartialMethod { mellin, collocation };

struct PartialReconResult {
    VectorField field;  // grid over [-R,R]^2
    FourierProfiles a;  // recovered radial profiles on the physical r grid
    FourierProfiles b;
    int regularized = 0;             // total regularized contour samples (mellin route)
    double max_imag_residual = 0.0;  // conjugate-symmetry defect before symmetrization,
                                     // relative to the largest profile value
    bool collocation_warning = false;
};

/// Partial-data pipeline: angular Fourier analysis of V-line data given for
/// d in [0, R], per-mode recovery of a_n/b_n for |n| <= max_mode (via the
/// Mellin quotient or the collocation solver), conjugate symmetrization, and
/// resummation onto a Cartesian grid. Inputs are rescaled to unit radius
/// internally and mapped back.
PartialReconResult reconstruct_partial(const VSinogram& L, const VSinogram& T, int max_mode,
                                       const ContourSpec& contour, int nx, int ny,
                                       PartialMethod method, int threads = 0);

}  // namespace vlt
