#pragma once

#include "ncofdm/config.hpp"
#include "ncofdm/td_smoother.hpp"

namespace ncofdm {

/// Symbol body sampled at the non-oversampled points n = J m, zero elsewhere.
struct NonOversampledGrid {
    CVector values;  // length N
    int J = 1;       // oversampling factor N / K
};

/// Keeps y(J m) for m = 0..K-1 and zeroes the rest. Requires K | N.
NonOversampledGrid downsample_to_grid(const CVector& body, const SystemConfig& cfg);

/// Derivative of order v over the body, rebuilt as the cyclic convolution of
/// the grid with the order-v basis kernel.
///
/// The basis vectors peak at n = -N_cp (they carry the CP phase e^{-j phi k}),
/// so the kernel used here is the basis read from storage index 0, i.e.
/// f^(v)(n - N_cp) for n = 0..N-1, which is the phase-free kernel
/// (1/N) sum_k (j 2 pi k/N)^v e^{j 2 pi k n / N}. Sampling at every J-th
/// point scales the in-band spectrum by 1/J, which the kernel gain J undoes.
/// Convolution runs through length-N DFTs.
CVector cyclic_derivative(const NonOversampledGrid& grid, const BasisSet& basis, int v);

/// Phase-free kernel J * f^(v)(n - N_cp), n = 0..N-1, as used above.
CVector convolution_kernel(const BasisSet& basis, int v, int J);

}  // namespace ncofdm
