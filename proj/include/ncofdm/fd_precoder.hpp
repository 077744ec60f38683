#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ncofdm/config.hpp"

namespace ncofdm {

/// Matrices of the frequency-domain N-continuous precoder
///   Xbar_i = (I - P) X_i + P Phi^H Xbar_{i-1},
///   P = Phi^H A^T (A A^T)^{-1} A Phi.
struct PrecoderMatrices {
    RMatrix A;                    // (V+1) x K, row v holds k_m^v * scale_v
    CVector phi_diag;             // e^{j phi k_m}
    CMatrix P;                    // K x K
    std::vector<double> row_scale;  // scale_v applied to row v of A
    double gram_condition = 0.0;    // 2-norm condition number of A A^T
};

enum class RowScaling { Scaled, Unscaled };

/// Row v of A is k_m^v, multiplied by (2/K)^v when scaling is requested.
RMatrix build_A(const SystemConfig& cfg, RowScaling scaling = RowScaling::Scaled);

/// Builds P through a Cholesky (LDL^T) solve against A A^T. Throws
/// NumericError when A A^T is numerically singular.
PrecoderMatrices build_P(const SystemConfig& cfg, RowScaling scaling = RowScaling::Scaled);

/// One precoder step. Without a previous symbol (i = 0) X is returned as is.
FreqSymbol fd_precode_step(const PrecoderMatrices& pm, const FreqSymbol& X,
                           const std::optional<FreqSymbol>& prev);

/// Stateful precoder for one stream; carries Xbar_{i-1} between calls.
class FdPrecoder {
public:
    explicit FdPrecoder(const SystemConfig& cfg);
    explicit FdPrecoder(PrecoderMatrices pm);

    const PrecoderMatrices& matrices() const noexcept { return pm_; }
    FreqSymbol step(const FreqSymbol& X);
    void reset() { prev_.reset(); }

private:
    PrecoderMatrices pm_;
    std::optional<FreqSymbol> prev_;
};

std::vector<FreqSymbol> fd_precode_stream(std::span<const FreqSymbol> X,
                                          const SystemConfig& cfg);

}  // namespace ncofdm
