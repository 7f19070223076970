#include "vlt/recon_radon.hpp"

#include <cmath>
#include <stdexcept>

#include "vlt/fft.hpp"

namespace vlt {

namespace {

void check_combinable(const VSinogram& s, const char* who) {
    if (s.n_beta < 2 || s.n_beta % 2 != 0)
        throw std::domain_error(std::string(who) + ": n_beta must be even so beta+pi is on-grid");
    if (s.n_d < 3 || s.n_d % 2 != 1)
        throw std::domain_error(std::string(who) +
                                ": n_d must be odd so the d grid is symmetric about R");
    const double tol = 1e-9 * s.R;
    if (std::abs(s.d_min) > tol || std::abs(s.d_max - 2.0 * s.R) > tol)
        throw std::domain_error(std::string(who) + ": d grid must cover [0, 2R]");
    if (!(s.theta > 0.0 && s.theta < kPi / 2.0))
        throw std::domain_error(std::string(who) + ": theta outside (0, pi/2)");
}

SSinogram combined_shell(const VSinogram& s, SKind kind) {
    SSinogram out;
    out.kind = kind;
    out.R = s.R;
    out.n_psi = s.n_beta;
    out.n_p = s.n_d;
    out.psi0 = wrap_angle(s.theta + kPi / 2.0);
    out.p_max = s.R * std::sin(s.theta);
    out.values.resize(static_cast<size_t>(out.n_psi) * out.n_p);
    return out;
}

}  // namespace

SSinogram combine_to_lrt(const VSinogram& L) {
    if (L.kind != VKind::longitudinal)
        throw std::domain_error("combine_to_lrt: longitudinal data required");
    check_combinable(L, "combine_to_lrt");
    SSinogram out = combined_shell(L, SKind::longitudinal_ray);
    const int nb = L.n_beta, nd = L.n_d;
    for (int i = 0; i < nb; ++i) {
        const int i_pi = (i + nb / 2) % nb;
        const double diameter = L.at(i, nd - 1);
        for (int j = 0; j < nd; ++j)
            out.at(i, j) = L.at(i, j) - L.at(i_pi, nd - 1 - j) - diameter;
    }
    return out;
}

SSinogram combine_to_trt(const VSinogram& T) {
    if (T.kind != VKind::transverse)
        throw std::domain_error("combine_to_trt: transverse data required");
    check_combinable(T, "combine_to_trt");
    SSinogram out = combined_shell(T, SKind::transverse_ray);
    const int nb = T.n_beta, nd = T.n_d;
    for (int i = 0; i < nb; ++i) {
        const int i_pi = (i + nb / 2) % nb;
        const double diameter = T.at(i, nd - 1);
        for (int j = 0; j < nd; ++j)
            out.at(i, j) = -T.at(i, j) + T.at(i_pi, nd - 1 - j) + diameter;
    }
    return out;
}

ComponentSinograms solve_components(const SSinogram& I, const SSinogram& J) {
    if (I.kind != SKind::longitudinal_ray || J.kind != SKind::transverse_ray)
        throw std::domain_error("solve_components: expects (longitudinal_ray, transverse_ray)");
    if (I.n_psi != J.n_psi || I.n_p != J.n_p || I.psi0 != J.psi0 || I.p_max != J.p_max ||
        I.R != J.R)
        throw std::domain_error("solve_components: grids differ");

    ComponentSinograms out;
    out.r1 = I;
    out.r1.kind = SKind::radon;
    out.r2 = out.r1;
    for (int i = 0; i < I.n_psi; ++i) {
        const double psi = I.psi(i);
        const double c = std::cos(psi), s = std::sin(psi);
        for (int j = 0; j < I.n_p; ++j) {
            const double iv = I.at(i, j);
            const double jv = J.at(i, j);
            out.r1.at(i, j) = -s * iv + c * jv;
            out.r2.at(i, j) = c * iv + s * jv;
        }
    }
    return out;
}

ScalarField fbp_invert(const SSinogram& sino, int nx, int ny, int threads) {
    if (sino.kind != SKind::radon) throw std::domain_error("fbp_invert: radon data required");
    if (sino.n_p < 2 || sino.n_psi < 2) throw std::domain_error("fbp_invert: grid too small");
    if (!(sino.p_max > 0.0)) throw std::domain_error("fbp_invert: p_max must be positive");
    if (nx < 1 || ny < 1) throw std::domain_error("fbp_invert: output grid too small");

    const int n_p = sino.n_p, n_psi = sino.n_psi;
    const double dp = 2.0 * sino.p_max / (n_p - 1);
    const size_t n_pad = next_pow2(2 * static_cast<size_t>(n_p));

    // ramp-filter every view: Q = IDFT[ |nu_k| DFT[row] ], |nu| in cycles
    // per unit length, band-limited at the grid Nyquist by construction
    std::vector<double> filtered(static_cast<size_t>(n_psi) * n_p);
    std::vector<double> freq(n_pad);
    for (size_t k = 0; k < n_pad; ++k) {
        const size_t sym = std::min(k, n_pad - k);
        freq[k] = static_cast<double>(sym) / (static_cast<double>(n_pad) * dp);
    }
    parallel_for(
        n_psi,
        [&](int i) {
            std::vector<std::complex<double>> buf(n_pad);
            for (int j = 0; j < n_p; ++j) buf[j] = sino.at(i, j);
            fft_inplace(buf, false);
            for (size_t k = 0; k < n_pad; ++k) buf[k] *= freq[k];
            fft_inplace(buf, true);
            for (int j = 0; j < n_p; ++j)
                filtered[static_cast<size_t>(i) * n_p + j] = buf[j].real();
        },
        threads);

    // backprojection; each pixel sums views in index order so the result is
    // independent of the pixel-level parallelism
    std::vector<double> w_x(n_psi), w_y(n_psi);
    for (int i = 0; i < n_psi; ++i) {
        const double psi = sino.psi(i);
        w_x[i] = std::cos(psi);
        w_y[i] = std::sin(psi);
    }
    const GridSpec spec{nx, ny, sino.R};
    std::vector<double> img(static_cast<size_t>(nx) * ny);
    const double view_weight = kPi / n_psi;  // (2*pi/n_psi) / 2: every line appears twice
    const double mask2 = sino.p_max * sino.p_max;
    parallel_for(
        ny,
        [&](int j) {
            const double y = spec.y(j);
            for (int i = 0; i < nx; ++i) {
                const double x = spec.x(i);
                if (x * x + y * y >= mask2) continue;
                double acc = 0.0;
                for (int v = 0; v < n_psi; ++v) {
                    const double p = x * w_x[v] + y * w_y[v];
                    const double fj = (p + sino.p_max) / dp;
                    const int j0 = static_cast<int>(fj);
                    if (j0 < 0 || j0 >= n_p - 1) continue;  // |p| < p_max keeps this in range
                    const double t = fj - j0;
                    const double* row = &filtered[static_cast<size_t>(v) * n_p];
                    acc += (1.0 - t) * row[j0] + t * row[j0 + 1];
                }
                img[static_cast<size_t>(j) * nx + i] = acc * view_weight;
            }
        },
        threads);
    return ScalarField::grid(spec, std::move(img));
}

FullReconResult reconstruct_full(const VSinogram& L, const VSinogram& T, int nx, int ny,
                                 int threads) {
    if (L.R != T.R || L.theta != T.theta || L.n_beta != T.n_beta || L.n_d != T.n_d ||
        L.d_min != T.d_min || L.d_max != T.d_max)
        throw std::domain_error("reconstruct_full: L and T grids differ");

    const SSinogram I = combine_to_lrt(L);
    const SSinogram J = combine_to_trt(T);

    // Mass near |p| = R sin(theta) signals support outside the recoverable
    // disk (the combined lines cannot reach beyond it).
    FullReconResult result;
    {
        const int edge = std::max(2, I.n_p / 50);
        double total = 0.0, boundary = 0.0;
        for (const SSinogram* s : {&I, &J}) {
            for (int i = 0; i < s->n_psi; ++i)
                for (int j = 0; j < s->n_p; ++j) {
                    const double a = std::abs(s->at(i, j));
                    total += a;
                    if (j < edge || j >= s->n_p - edge) boundary += a;
                }
        }
        result.boundary_mass_fraction = total > 0.0 ? boundary / total : 0.0;
        result.support_warning = result.boundary_mass_fraction > 1e-3;
    }

    const ComponentSinograms comps = solve_components(I, J);
    ScalarField f1 = fbp_invert(comps.r1, nx, ny, threads);
    ScalarField f2 = fbp_invert(comps.r2, nx, ny, threads);
    result.field = VectorField(std::move(f1), std::move(f2));
    return result;
}

}  // namespace vlt
