#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vlt/io.hpp"
#include "vlt/recon_mellin.hpp"
#include "vlt/recon_radon.hpp"
#include "vlt/rng.hpp"
#include "vlt/selftest.hpp"

namespace {

using namespace vlt;

std::vector<double> parse_csv_numbers(const std::string& s, size_t expect, const char* what) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw std::domain_error(std::string("bad number in ") + what + ": '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.size() != expect)
        throw std::domain_error(std::string(what) + " needs " + std::to_string(expect) +
                                " comma-separated numbers");
    return out;
}

int cmd_phantom(const std::string& kind, double R, int nx, int ny, double support_bound,
                const std::vector<std::string>& bumps, const std::vector<std::string>& sol_bumps,
                const std::vector<std::string>& modes, const std::string& out_path) {
    PhantomSpec spec;
    if (kind == "potential")
        spec.kind = PhantomKind::potential;
    else if (kind == "solenoidal")
        spec.kind = PhantomKind::solenoidal;
    else if (kind == "angular-mode")
        spec.kind = PhantomKind::angular_mode;
    else if (kind == "mixture")
        spec.kind = PhantomKind::mixture;
    else
        throw std::domain_error("unknown phantom kind '" + kind + "'");
    spec.support_bound = support_bound > 0.0 ? support_bound : R;

    for (const auto& s : bumps) {
        const auto v = parse_csv_numbers(s, 4, "--bump");
        spec.potential_bumps.push_back({{v[0], v[1]}, v[2], v[3]});
    }
    for (const auto& s : sol_bumps) {
        const auto v = parse_csv_numbers(s, 4, "--sol-bump");
        spec.solenoidal_bumps.push_back({{v[0], v[1]}, v[2], v[3]});
    }
    for (const auto& s : modes) {
        const auto v = parse_csv_numbers(s, 7, "--mode");
        AngularMode m;
        m.n = static_cast<int>(v[0]);
        m.r_center = v[1];
        m.r_width = v[2];
        m.amp_a = v[3];
        m.phase_a = v[4];
        m.amp_b = v[5];
        m.phase_b = v[6];
        spec.modes.push_back(m);
    }
    // defaults so a bare `phantom --kind ...` produces something useful
    if (spec.potential_bumps.empty() && (spec.kind == PhantomKind::potential))
        spec.potential_bumps.push_back({{0.15 * R, 0.1 * R}, 0.35 * R, 1.0});
    if (spec.solenoidal_bumps.empty() && spec.kind == PhantomKind::solenoidal)
        spec.solenoidal_bumps.push_back({{-0.1 * R, 0.05 * R}, 0.3 * R, 1.0});
    if (spec.modes.empty() && spec.kind == PhantomKind::angular_mode)
        spec.modes.push_back({2, 0.35 * R, 0.2 * R, 1.0, 0.0, 0.5, 0.0});

    const VectorField field = make_phantom(spec);
    write_vfld(out_path, sample_to_grid(field, nx, ny, R));
    return 0;
}

int cmd_forward(const std::string& field_path, double theta, int n_beta, int n_d, double d_min,
                double d_max, double quad_step, double noise, uint64_t seed, int threads,
                const std::string& out_l, const std::string& out_t) {
    const VectorField field = read_vfld(field_path);
    const double R = field.f1().grid_spec().R;
    if (d_max <= 0.0) d_max = 2.0 * R;
    if (quad_step <= 0.0) quad_step = R / 2000.0;
    auto [L, T] = simulate_vsinograms(field, R, theta, n_beta, n_d, d_min, d_max, quad_step,
                                      threads);
    if (noise > 0.0) {
        SplitMix64 rng(seed);
        for (double& v : L.values) v += noise * rng.gaussian();
        for (double& v : T.values) v += noise * rng.gaussian();
    }
    write_vsin(out_l, L);
    write_vsin(out_t, T);
    return 0;
}

int cmd_recon_full(const std::string& in_l, const std::string& in_t, int nx, int ny, int threads,
                   const std::string& out_path) {
    const VSinogram L = read_vsin(in_l);
    const VSinogram T = read_vsin(in_t);
    const FullReconResult res = reconstruct_full(L, T, nx, ny, threads);
    if (res.support_warning)
        std::cerr << "warning: " << res.boundary_mass_fraction
                  << " of the combined sinogram mass sits near |p| = R sin(theta); the field "
                     "likely extends beyond the recoverable disk\n";
    write_vfld(out_path, res.field);
    return 0;
}

int cmd_recon_partial(const std::string& in_l, const std::string& in_t, int max_mode,
                      const ContourSpec& contour, const std::string& method_name, int nx, int ny,
                      int threads, const std::string& out_path, const std::string& csv_path) {
    const VSinogram L = read_vsin(in_l);
    const VSinogram T = read_vsin(in_t);
    PartialMethod method;
    if (method_name == "mellin")
        method = PartialMethod::mellin;
    else if (method_name == "collocation")
        method = PartialMethod::collocation;
    else
        throw std::domain_error("unknown method '" + method_name + "'");
    const PartialReconResult res =
        reconstruct_partial(L, T, max_mode, contour, nx, ny, method, threads);
    if (res.regularized > 0)
        std::cerr << "note: " << res.regularized
                  << " contour samples had near-zero denominators and were regularized\n";
    if (res.collocation_warning)
        std::cerr << "warning: collocation residual exceeded 1e-3 of the data norm\n";
    std::cerr << "conjugate-symmetry defect before symmetrization: " << res.max_imag_residual
              << " (relative)\n";
    write_vfld(out_path, res.field);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw FormatError("cannot open '" + csv_path + "' for writing");
        csv << "n,r,re_a,im_a,re_b,im_b\n";
        for (int n = -max_mode; n <= max_mode; ++n)
            for (int j = 0; j < res.a.n_t; ++j) {
                const cplx a = res.a.mode(n)[j];
                const cplx b = res.b.mode(n)[j];
                csv << n << ',' << res.a.t(j) << ',' << a.real() << ',' << a.imag() << ','
                    << b.real() << ',' << b.imag() << '\n';
            }
    }
    return 0;
}

std::string sniff_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "' for reading");
    char magic[4] = {};
    in.read(magic, 4);
    if (!in) throw FormatError("'" + path + "': unexpected end of file reading magic at offset 0");
    return std::string(magic, 4);
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    const std::string magic = sniff_magic(a_path);
    Metrics m;
    std::string tag;
    if (magic == "VFLD") {
        const VectorField a = read_vfld(a_path);
        const VectorField b = read_vfld(b_path);
        if (!(a.f1().grid_spec() == b.f1().grid_spec()))
            throw std::domain_error("compare: field grids differ");
        std::vector<double> av = a.f1().grid_values();
        av.insert(av.end(), a.f2().grid_values().begin(), a.f2().grid_values().end());
        std::vector<double> bv = b.f1().grid_values();
        bv.insert(bv.end(), b.f2().grid_values().begin(), b.f2().grid_values().end());
        m = compare_values(av, bv);
        tag = "vfld";
    } else if (magic == "VSIN") {
        const VSinogram a = read_vsin(a_path);
        const VSinogram b = read_vsin(b_path);
        if (a.n_beta != b.n_beta || a.n_d != b.n_d)
            throw std::domain_error("compare: sinogram grids differ");
        m = compare_values(a.values, b.values);
        tag = "vsin";
    } else {
        throw FormatError("'" + a_path + "': unknown magic");
    }
    std::printf("%s,%.17g,%.17g\n", tag.c_str(), m.rel_l2, m.max_abs);
    return 0;
}

int cmd_render(const std::string& in_path, const std::string& out_base) {
    const std::string magic = sniff_magic(in_path);
    if (magic == "VFLD") {
        const VectorField f = read_vfld(in_path);
        const GridSpec& spec = f.f1().grid_spec();
        // image rows run top-down; grid rows run bottom-up
        auto flip = [&](const std::vector<double>& v) {
            std::vector<double> img(v.size());
            for (int j = 0; j < spec.ny; ++j)
                for (int i = 0; i < spec.nx; ++i)
                    img[static_cast<size_t>(j) * spec.nx + i] =
                        v[static_cast<size_t>(spec.ny - 1 - j) * spec.nx + i];
            return img;
        };
        write_pgm(out_base + "_f1.pgm", spec.nx, spec.ny, flip(f.f1().grid_values()));
        write_pgm(out_base + "_f2.pgm", spec.nx, spec.ny, flip(f.f2().grid_values()));
        std::vector<double> mag(f.f1().grid_values().size());
        for (size_t k = 0; k < mag.size(); ++k)
            mag[k] = std::hypot(f.f1().grid_values()[k], f.f2().grid_values()[k]);
        write_pgm(out_base + "_mag.pgm", spec.nx, spec.ny, flip(mag));
    } else if (magic == "VSIN") {
        const VSinogram s = read_vsin(in_path);
        write_pgm(out_base + ".pgm", s.n_d, s.n_beta, s.values);
    } else {
        throw FormatError("'" + in_path + "': unknown magic");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"V-line transform simulation and inversion toolkit"};
    app.require_subcommand(1);

    // phantom
    auto* sc_phantom = app.add_subcommand("phantom", "generate a phantom field (VFLD)");
    std::string ph_kind = "mixture", ph_out;
    double ph_R = 1.0, ph_bound = 0.0;
    int ph_nx = 256, ph_ny = 256;
    std::vector<std::string> ph_bumps, ph_sol, ph_modes;
    sc_phantom->add_option("--kind", ph_kind, "potential|solenoidal|angular-mode|mixture");
    sc_phantom->add_option("--R", ph_R, "disk radius");
    sc_phantom->add_option("--nx", ph_nx);
    sc_phantom->add_option("--ny", ph_ny);
    sc_phantom->add_option("--support-bound", ph_bound, "strict bound on the support radius");
    sc_phantom->add_option("--bump", ph_bumps, "potential bump cx,cy,radius,amp (repeatable)");
    sc_phantom->add_option("--sol-bump", ph_sol, "stream-function bump cx,cy,radius,amp");
    sc_phantom->add_option("--mode", ph_modes,
                           "angular mode n,r_center,r_width,amp_a,phase_a,amp_b,phase_b");
    sc_phantom->add_option("--out", ph_out)->required();

    // forward
    auto* sc_forward = app.add_subcommand("forward", "simulate V-line sinograms (VSIN pair)");
    std::string fw_field, fw_out_l, fw_out_t;
    double fw_theta = 1.0, fw_dmin = 0.0, fw_dmax = -1.0, fw_step = -1.0, fw_noise = 0.0;
    int fw_nbeta = 360, fw_nd = 129, fw_threads = 0;
    uint64_t fw_seed = 1;
    sc_forward->add_option("--field", fw_field)->required();
    sc_forward->add_option("--theta", fw_theta, "scattering angle in (0, pi/2)")->required();
    sc_forward->add_option("--n-beta", fw_nbeta);
    sc_forward->add_option("--n-d", fw_nd);
    sc_forward->add_option("--d-min", fw_dmin);
    sc_forward->add_option("--d-max", fw_dmax, "default 2R");
    sc_forward->add_option("--quad-step", fw_step, "Simpson step (default R/2000)");
    sc_forward->add_option("--noise", fw_noise, "additive Gaussian sigma");
    sc_forward->add_option("--seed", fw_seed, "SplitMix64 noise seed");
    sc_forward->add_option("--threads", fw_threads);
    sc_forward->add_option("--out-l", fw_out_l)->required();
    sc_forward->add_option("--out-t", fw_out_t)->required();

    // recon-full
    auto* sc_full = app.add_subcommand("recon-full", "full-data reconstruction (d in [0,2R])");
    std::string rf_l, rf_t, rf_out;
    int rf_nx = 256, rf_ny = 256, rf_threads = 0;
    sc_full->add_option("--in-l", rf_l)->required();
    sc_full->add_option("--in-t", rf_t)->required();
    sc_full->add_option("--nx", rf_nx);
    sc_full->add_option("--ny", rf_ny);
    sc_full->add_option("--threads", rf_threads);
    sc_full->add_option("--out", rf_out)->required();

    // recon-partial
    auto* sc_part = app.add_subcommand("recon-partial", "partial-data reconstruction (d in [0,R])");
    std::string rp_l, rp_t, rp_out, rp_csv, rp_method = "mellin";
    int rp_N = 8, rp_nx = 256, rp_ny = 256, rp_threads = 0;
    ContourSpec rp_contour;
    sc_part->add_option("--in-l", rp_l)->required();
    sc_part->add_option("--in-t", rp_t)->required();
    sc_part->add_option("--max-mode", rp_N, "largest recovered angular mode");
    sc_part->add_option("--contour-c", rp_contour.c, "Mellin contour abscissa (> 1)");
    sc_part->add_option("--omega-max", rp_contour.omega_max);
    sc_part->add_option("--omega-step", rp_contour.omega_step);
    sc_part->add_option("--method", rp_method, "mellin|collocation");
    sc_part->add_option("--nx", rp_nx);
    sc_part->add_option("--ny", rp_ny);
    sc_part->add_option("--threads", rp_threads);
    sc_part->add_option("--profiles-csv", rp_csv, "per-mode profile diagnostics");
    sc_part->add_option("--out", rp_out)->required();

    // compare
    auto* sc_cmp = app.add_subcommand("compare", "print 'tag,rel_l2,max_abs' for two files");
    std::string cmp_a, cmp_b;
    sc_cmp->add_option("--a", cmp_a)->required();
    sc_cmp->add_option("--b", cmp_b)->required();

    // render
    auto* sc_render = app.add_subcommand("render", "write PGM images for a VFLD/VSIN file");
    std::string rd_in, rd_out;
    sc_render->add_option("--in", rd_in)->required();
    sc_render->add_option("--out", rd_out, "output base name")->required();

    // selftest
    app.add_subcommand("selftest", "run the built-in verification suite");

    try {
        app.parse(argc, argv);
        if (sc_phantom->parsed())
            return cmd_phantom(ph_kind, ph_R, ph_nx, ph_ny, ph_bound, ph_bumps, ph_sol, ph_modes,
                               ph_out);
        if (sc_forward->parsed())
            return cmd_forward(fw_field, fw_theta, fw_nbeta, fw_nd, fw_dmin, fw_dmax, fw_step,
                               fw_noise, fw_seed, fw_threads, fw_out_l, fw_out_t);
        if (sc_full->parsed()) return cmd_recon_full(rf_l, rf_t, rf_nx, rf_ny, rf_threads, rf_out);
        if (sc_part->parsed())
            return cmd_recon_partial(rp_l, rp_t, rp_N, rp_contour, rp_method, rp_nx, rp_ny,
                                     rp_threads, rp_out, rp_csv);
        if (sc_cmp->parsed()) return cmd_compare(cmp_a, cmp_b);
        if (sc_render->parsed()) return cmd_render(rd_in, rd_out);
        return vlt::run_selftest(std::cout) == 0 ? 0 : 3;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message / help text
        return code == 0 ? 0 : 1;
    } catch (const vlt::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const vlt::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
