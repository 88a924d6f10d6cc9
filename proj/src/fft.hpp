#pragma once

#include <complex>
#include <span>

namespace mgt::detail {

/// In-place unnormalized complex DFT over a dim-dimensional cube with n points per axis.
/// sign = -1 is the forward direction. Plans are cached and safe to use from many threads.
void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign);

} // namespace mgt::detail
