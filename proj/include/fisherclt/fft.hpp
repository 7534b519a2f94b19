#pragma once
#include <cstddef>
#include <vector>

namespace fclt {

// Thin deterministic wrappers over FFTW (FFTW_ESTIMATE plans, single thread,
// plan creation serialized).  All products are exact linear convolutions:
// inputs are zero-padded to a power of two >= the full output length, so no
// wrap-around ever occurs.

// c[k] = sum_j a[j] b[k-j],  k = 0..|a|+|b|-2.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

// Valid-mode cross-correlation: c[i] = sum_j a[i+j] b[j], i = 0..|a|-|b|.
// Requires |a| >= |b|.
std::vector<double> fft_correlate_valid(const std::vector<double>& a,
                                        const std::vector<double>& b);

// n-fold linear self-convolution via spectral binary powering; returns the
// full support, length n*(|a|-1)+1.  The transform length is a power of two
// chosen >= that, which keeps the powering alias-free by construction.
std::vector<double> fft_self_power(const std::vector<double>& a, int n);

}  // namespace fclt
