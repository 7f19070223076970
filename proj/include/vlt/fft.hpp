#pragma once

#include <complex>
#include <vector>

namespace vlt {

/// In-place radix-2 FFT. Size must be a power of two. `inverse` applies the
/// conjugate transform including the 1/N factor.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

/// Smallest power of two >= n.
size_t next_pow2(size_t n);

}  // namespace vlt
