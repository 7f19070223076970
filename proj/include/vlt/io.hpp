#pragma once

#include <span>
#include <string>

#include "vlt/errors.hpp"
#include "vlt/fields.hpp"
#include "vlt/forward.hpp"

namespace vlt {

// Binary formats, all little-endian.
//
// VSIN: "VSIN", u32 version=1, u8 kind (0 longitudinal, 1 transverse),
//       7 zero pad bytes, f64 R, f64 theta, u32 n_beta, u32 n_d, f64 d_min,
//       f64 d_max, then n_beta*n_d f64 values, beta-major.
// VFLD: "VFLD", u32 version=1, f64 R, u32 nx, u32 ny, then nx*ny (f1,f2)
//       f64 pairs, row-major (y rows from -R upward, x within a row).
// PGM:  binary P5, 8 bits per sample.
//
// Readers reject malformed input with FormatError naming the byte offset;
// nothing is returned for truncated files. write/read round-trips are
// bit-exact.

void write_vsin(const std::string& path, const VSinogram& sino);
VSinogram read_vsin(const std::string& path);

void write_vfld(const std::string& path, const VectorField& field);  // grid fields only
VectorField read_vfld(const std::string& path);

/// Min-max scaled 8-bit PGM: the minimum maps to 0, the maximum to 255, and
/// a constant image to 128. `values` is row-major, `w` samples per row.
void write_pgm(const std::string& path, int w, int h, std::span<const double> values);

struct Metrics {
    double rel_l2 = 0.0;   // ||a - b||_2 / ||b||_2, 0 when both empty or b = 0 and a = 0
    double max_abs = 0.0;  // max |a - b|
};

Metrics compare_values(std::span<const double> a, std::span<const double> b);

}  // namespace vlt
