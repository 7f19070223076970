#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "vlt/fields.hpp"
#include "vlt/geometry.hpp"

namespace vlt {

enum class VKind { longitudinal, transverse };
enum class SKind { longitudinal_ray, transverse_ray, radon };

/// V-line transform data on a (beta, d) grid. beta is uniform on [0, 2*pi)
/// without the right endpoint; d is uniform on [d_min, d_max] inclusive.
/// Values are beta-major.
struct VSinogram {
    VKind kind = VKind::longitudinal;
    double R = 1.0;
    double theta = 0.0;
    int n_beta = 0;
    int n_d = 0;
    double d_min = 0.0;
    double d_max = 0.0;
    std::vector<double> values;

    double beta(int i) const { return kTwoPi * i / n_beta; }
    double d(int j) const { return d_min + j * (d_max - d_min) / (n_d - 1); }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n_d + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n_d + j]; }
};

/// Straight-line transform data. psi runs over the uniform wrap-around grid
/// psi0 + i*2*pi/n_psi; p is uniform on [-p_max, p_max], computed as
/// p_max*(2j - (n_p-1))/(n_p-1) so the center sample of an odd grid is
/// exactly 0.
struct SSinogram {
    SKind kind = SKind::radon;
    double R = 1.0;
    int n_psi = 0;
    int n_p = 0;
    double psi0 = 0.0;
    double p_max = 0.0;
    std::vector<double> values;

    double psi(int i) const { return wrap_angle(psi0 + kTwoPi * i / n_psi); }
    double p(int j) const { return p_max * (2.0 * j - (n_p - 1)) / (n_p - 1); }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n_p + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n_p + j]; }
};

/// Run fn(i) for i in [0, n) on up to `threads` workers (0 = all hardware
/// threads). Each index is processed exactly once; callers write disjoint
/// output slots so the result is identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

/// Longitudinal or transverse V-line transform of `field` for the broken ray
/// BR(beta, d) in the disk of radius R with scattering angle theta.
/// Composite Simpson quadrature with step <= quad_step on both legs; the
/// second leg is truncated at its boundary exit. Throws NumericError if the
/// accumulated value is not finite.
double vline_transform(VKind kind, const VectorField& field, double beta, double d, double R,
                       double theta, double quad_step);

/// Longitudinal (w_perp . f) or transverse (w . f) ray transform along the
/// chord of the disk of radius R on the line L(psi, p). Zero when |p| >= R.
double line_transform(SKind kind, const VectorField& field, double psi, double p, double R,
                      double quad_step);

/// Radon transform of a scalar field over the same chord.
double radon_transform(const ScalarField& field, double psi, double p, double R,
                       double quad_step);

/// Evaluate both V-line transforms of `field` on a full (beta, d) grid.
/// Nodes are independent and computed in parallel.
std::pair<VSinogram, VSinogram> simulate_vsinograms(const VectorField& field, double R,
                                                    double theta, int n_beta, int n_d,
                                                    double d_min, double d_max, double quad_step,
                                                    int threads = 0);

}  // namespace vlt
