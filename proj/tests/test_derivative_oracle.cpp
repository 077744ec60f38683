#include <doctest.h>

#include "ncofdm/derivative_oracle.hpp"
#include "ncofdm/transmitter.hpp"
#include "test_util.hpp"

using namespace ncofdm;

namespace {

// Spectral derivative of the body: (1/N) sum_k (j 2 pi k/N)^v X_k e^{j 2 pi k n/N}.
CVector spectral_derivative(const CVector& X, const SystemConfig& cfg, int v)
{
    CVector out(cfg.N());
    for (int n = 0; n < cfg.N(); ++n)
        out[n] = evaluate_derivatives(X, n, v, cfg)[v];
    return out;
}

}  // namespace

TEST_SUITE("derivative_oracle")
{
    TEST_CASE("cyclic convolution of the sparse grid gives the spectral derivatives")
    {
        const SystemConfig cfg = build_system_config(8, 32, 4, 2);
        const BasisSet basis = build_basis_set(cfg, 4);
        const Payload p = random_payload(cfg, 5, 31);
        for (const auto& X : p.symbols) {
            const TimeSymbol y = idft_modulate(X, cfg);
            const NonOversampledGrid grid = downsample_to_grid(y.body(), cfg);
            CHECK(grid.J == 4);
            for (int v = 0; v <= 4; ++v) {
                const CVector ref = spectral_derivative(X.values, cfg, v);
                CHECK(testutil::max_abs(cyclic_derivative(grid, basis, v) - ref) < 1e-10);
            }
        }
    }

    TEST_CASE("two-subband superposition: each band with its own kernel")
    {
        // Bands {-8..-5} and {4..7}, each of width 4, on N = 32: J = 8 per band.
        std::vector<int> lo = {-8, -7, -6, -5}, hi = {4, 5, 6, 7};
        const SystemConfig cfg_lo = build_system_config(lo, 32, 4, 0);
        const SystemConfig cfg_hi = build_system_config(hi, 32, 4, 0);
        std::vector<int> both = lo;
        both.insert(both.end(), hi.begin(), hi.end());
        const SystemConfig cfg = build_system_config(both, 32, 4, 0);

        const Payload a = random_payload(cfg_lo, 1, 5);
        const Payload b = random_payload(cfg_hi, 1, 6);
        CVector X(8);
        X << a.symbols[0].values, b.symbols[0].values;

        const CVector y_lo = idft_modulate(a.symbols[0], cfg_lo).body();
        const CVector y_hi = idft_modulate(b.symbols[0], cfg_hi).body();
        const BasisSet basis_lo = build_basis_set(cfg_lo, 4);
        const BasisSet basis_hi = build_basis_set(cfg_hi, 4);
        for (int v = 0; v <= 4; ++v) {
            const CVector sum = cyclic_derivative(downsample_to_grid(y_lo, cfg_lo), basis_lo, v) +
                                cyclic_derivative(downsample_to_grid(y_hi, cfg_hi), basis_hi, v);
            CHECK(testutil::max_abs(sum - spectral_derivative(X, cfg, v)) < 1e-10);
        }
    }

    TEST_CASE("kernel is the phase-free basis read from storage index 0")
    {
        const SystemConfig cfg = build_system_config(8, 32, 4, 1);
        const BasisSet basis = build_basis_set(cfg);
        const CVector k0 = convolution_kernel(basis, 0, 4);
        CHECK(k0[0].real() == doctest::Approx(4.0 * 8.0 / 32.0));
        CHECK(std::abs(k0[0].imag()) < 1e-15);
        CHECK_THROWS_AS(convolution_kernel(basis, 3, 4), ConfigError);
    }

    TEST_CASE("grid preconditions")
    {
        const SystemConfig cfg = build_system_config(std::vector<int>{-3, -2, -1, 0, 1, 2}, 32, 4, 0);
        CHECK_THROWS_AS(downsample_to_grid(CVector::Zero(32), cfg), ConfigError);
        const SystemConfig ok = build_system_config(8, 32, 4, 0);
        CHECK_THROWS_AS(downsample_to_grid(CVector::Zero(31), ok), ConfigError);
    }
}
