#include "ncofdm/fd_precoder.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace ncofdm {

RMatrix build_A(const SystemConfig& cfg, RowScaling scaling)
{
    const int K = cfg.K();
    const int V = cfg.V();
    const double s = scaling == RowScaling::Scaled ? 2.0 / K : 1.0;
    RMatrix A(V + 1, K);
    for (int m = 0; m < K; ++m) {
        const double k = cfg.subcarriers()[m] * s;
        double p = 1.0;
        for (int v = 0; v <= V; ++v) {
            A(v, m) = p;
            p *= k;
        }
    }
    return A;
}

PrecoderMatrices build_P(const SystemConfig& cfg, RowScaling scaling)
{
    const int K = cfg.K();
    const int V = cfg.V();
    PrecoderMatrices pm;
    pm.A = build_A(cfg, scaling);
    const double s = scaling == RowScaling::Scaled ? 2.0 / K : 1.0;
    pm.row_scale.resize(V + 1);
    for (int v = 0; v <= V; ++v)
        pm.row_scale[v] = std::pow(s, v);

    const RMatrix gram = pm.A * pm.A.transpose();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    pm.gram_condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(pm.gram_condition < 1e13)) {
        std::ostringstream msg;
        msg << "A A^T is numerically singular (condition estimate " << pm.gram_condition << ")";
        throw NumericError(msg.str(), pm.gram_condition);
    }

    Eigen::LDLT<RMatrix> ldlt(gram);
    const RMatrix proj = pm.A.transpose() * ldlt.solve(pm.A);  // A^T (A A^T)^{-1} A

    pm.phi_diag.resize(K);
    for (int m = 0; m < K; ++m)
        pm.phi_diag[m] = std::polar(1.0, cfg.phi() * cfg.subcarriers()[m]);

    pm.P = pm.phi_diag.conjugate().asDiagonal() * proj.cast<cplx>() * pm.phi_diag.asDiagonal();
    return pm;
}

FreqSymbol fd_precode_step(const PrecoderMatrices& pm, const FreqSymbol& X,
                           const std::optional<FreqSymbol>& prev)
{
    if (X.values.size() != pm.P.rows())
        throw ConfigError("fd_precode_step: symbol length does not match precoder size");
    if (!prev)
        return X;
    if (prev->values.size() != pm.P.rows())
        throw ConfigError("fd_precode_step: previous symbol length does not match");
    // (I - P) X + P Phi^H Xprev  ==  X - P (X - Phi^H Xprev)
    const CVector diff = X.values - pm.phi_diag.conjugate().cwiseProduct(prev->values);
    return {X.values - pm.P * diff};
}

FdPrecoder::FdPrecoder(const SystemConfig& cfg) : pm_(build_P(cfg)) {}

FdPrecoder::FdPrecoder(PrecoderMatrices pm) : pm_(std::move(pm)) {}

FreqSymbol FdPrecoder::step(const FreqSymbol& X)
{
    FreqSymbol out = fd_precode_step(pm_, X, prev_);
    prev_ = out;
    return out;
}

std::vector<FreqSymbol> fd_precode_stream(std::span<const FreqSymbol> X, const SystemConfig& cfg)
{
    FdPrecoder pre(cfg);
    std::vector<FreqSymbol> out;
    out.reserve(X.size());
    for (const FreqSymbol& x : X)
        out.push_back(pre.step(x));
    return out;
}

}  // namespace ncofdm
