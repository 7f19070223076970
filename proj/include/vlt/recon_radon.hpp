#pragma once

#include "vlt/forward.hpp"

namespace vlt {

/// Componentwise Radon data of a vector field on a shared (psi, p) grid.
struct ComponentSinograms {
    SSinogram r1;  // Radon transform of f1
    SSinogram r2;  // Radon transform of f2
};

/// Combine longitudinal V-line data into the longitudinal ray transform:
///   If(psi_beta, t_d) = Lf(beta,d) - Lf(beta+pi, 2R-d) - Lf(beta, 2R)
/// with psi_beta = beta + theta + pi/2 and t_d = (d - R) sin theta. Both
/// maps are affine in the grid indices, so the output grid is uniform and
/// no interpolation happens. Requires n_beta even and a d grid covering
/// [0, 2R] with an odd number of samples (so 2R - d stays on-grid).
SSinogram combine_to_lrt(const VSinogram& L);

/// Transverse counterpart producing the transverse ray transform on the
/// same (psi_beta, t_d) grid:
///   Jf(psi_beta, t_d) = -Tf(beta,d) + Tf(beta+pi, 2R-d) + Tf(beta, 2R).
/// The sign follows from rerunning the two-leg cancellation with the fixed
/// quarter-turn convention shared by all transforms here; it is pinned by
/// the forward-oracle tests.
SSinogram combine_to_trt(const VSinogram& T);

/// Solve the pointwise 2x2 system expressing (If, Jf) through the component
/// Radon transforms:
///   Rf1 = -sin(psi) If + cos(psi) Jf,   Rf2 = cos(psi) If + sin(psi) Jf.
ComponentSinograms solve_components(const SSinogram& I, const SSinogram& J);

/// Filtered backprojection of Radon data onto an nx-by-ny cell-centered grid
/// over [-R,R]^2. Per view, the p-profile is ramp-filtered in the frequency
/// domain (|nu| up to the grid Nyquist, zero-padded to a power of two), then
/// backprojected with linear interpolation in p. Views cover [0, 2*pi), so
/// each line is seen twice; the accumulated sum carries the matching factor
/// delta_psi / 2. Pixels with |x| >= p_max carry no measured lines and are
/// set to zero.
ScalarField fbp_invert(const SSinogram& radon_sino, int nx, int ny, int threads = 0);

struct FullReconResult {
    VectorField field;                    // grid over [-R,R]^2, zero outside R sin(theta)
    bool support_warning = false;         // combined data has significant mass near |p| = R sin(theta)
    double boundary_mass_fraction = 0.0;  // that mass as a fraction of the total
};

/// Full pipeline: combine both V-line sinograms, solve for the component
/// Radon data, invert each component by filtered backprojection.
FullReconResult reconstruct_full(const VSinogram& L, const VSinogram& T, int nx, int ny,
                                 int threads = 0);

}  // namespace vlt
