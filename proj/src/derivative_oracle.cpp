#include "ncofdm/derivative_oracle.hpp"

#include "ncofdm/fft.hpp"

namespace ncofdm {

NonOversampledGrid downsample_to_grid(const CVector& body, const SystemConfig& cfg)
{
    const int N = cfg.N();
    const int K = cfg.K();
    if (N % K != 0)
        throw ConfigError("downsample_to_grid: N must be a multiple of K");
    if (body.size() != N)
        throw ConfigError("downsample_to_grid: body length must equal N");
    NonOversampledGrid grid{CVector::Zero(N), N / K};
    for (int m = 0; m < K; ++m)
        grid.values[m * grid.J] = body[m * grid.J];
    return grid;
}

CVector convolution_kernel(const BasisSet& basis, int v, int J)
{
    if (v < 0 || v > basis.max_order())
        throw ConfigError("convolution_kernel: order outside the basis set");
    // Storage index n holds f^(v)(n - N_cp).
    return static_cast<double>(J) * basis.vectors[v].head(basis.N);
}

CVector cyclic_derivative(const NonOversampledGrid& grid, const BasisSet& basis, int v)
{
    const int N = basis.N;
    if (grid.values.size() != N)
        throw ConfigError("cyclic_derivative: grid length must equal N");
    const CVector kernel = convolution_kernel(basis, v, grid.J);

    Fft fft(N);
    CVector a(N), b(N), out(N);
    fft.forward({grid.values.data(), static_cast<std::size_t>(N)}, {a.data(), static_cast<std::size_t>(N)});
    fft.forward({kernel.data(), static_cast<std::size_t>(N)}, {b.data(), static_cast<std::size_t>(N)});
    const CVector prod = a.cwiseProduct(b);
    fft.backward({prod.data(), static_cast<std::size_t>(N)}, {out.data(), static_cast<std::size_t>(N)});
    return out / static_cast<double>(N);
}

}  // namespace ncofdm
