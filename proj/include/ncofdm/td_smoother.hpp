#pragma once

#include <span>
#include <vector>

#include <Eigen/LU>

#include "ncofdm/config.hpp"
#include "ncofdm/transmitter.hpp"

namespace ncofdm {

/// Derivative family of the band-limited kernel
///   f^(v)(n) = (1/N) sum_{k in K0} (j 2 pi k / N)^v e^{-j phi k} e^{j 2 pi k n / N}
/// sampled on n = -N_cp .. N-1, plus the edge values at n = -N_cp and n = N.
/// The kernel peaks at n = -N_cp, where every phase term cancels.
struct BasisSet {
    int N = 0;
    int N_cp = 0;
    std::vector<CVector> vectors;  // vectors[v][n + N_cp]
    CVector edge_start;            // f^(v)(-N_cp)
    CVector edge_end;              // f^(v)(N), equal to f^(v)(0)

    int max_order() const noexcept { return static_cast<int>(vectors.size()) - 1; }
    cplx value(int order, int n) const { return vectors[order][n + N_cp]; }
};

/// Orders 0 .. 2V, the set needed by the coordinate solve.
BasisSet build_basis_set(const SystemConfig& cfg);
/// Orders 0 .. max_order.
BasisSet build_basis_set(const SystemConfig& cfg, int max_order);

/// Closed-form Dirichlet kernel for f^(0) on a contiguous subcarrier block
/// {k0, ..., k0 + K - 1}; samples over n = -N_cp .. N-1. Throws if the
/// subcarrier set is not contiguous.
CVector dirichlet_kernel(const SystemConfig& cfg);

/// Derivatives of orders 0 .. max_order of the symbol carrying X at sample n,
/// with respect to the sample index:
///   y^(v)(n) = (1/N) sum_k (j 2 pi k / N)^v X_k e^{j 2 pi k n / N}.
CVector evaluate_derivatives(const CVector& X, int n, int max_order, const SystemConfig& cfg);

/// Precomputed operators of the time-domain smoother.
struct SmootherMatrices {
    int V = 0;
    CMatrix Pf;         // (V+1)x(V+1), {Pf}_{u,v} = f^(u+v)(-N_cp)
    CMatrix P1_tilde;   // V x K, row v-1: (1/N)(j 2 pi k/N)^v
    CMatrix PV;         // V x (V+1), {PV}_{u-1,v} = f^(u+v)(N)
    CMatrix P2;         // V x K, row v-1: (1/N)(j 2 pi k/N)^v e^{j phi k}
    CMatrix Qf;         // (N_cp+N) x (V+1), first V+1 basis vectors
    CVector P2_row0;    // (1/N) e^{j phi k}: y(-N_cp) from X
    CVector Qf_end;     // f^(v)(N), v = 0..V
    Eigen::VectorXd equilibration;            // diagonal scaling used by the solver
    Eigen::PartialPivLU<CMatrix> Pf_solver;   // LU of the equilibrated Pf
    double Pf_condition = 0.0;                // 1-norm condition of the equilibrated Pf

    /// Solves Pf b = rhs.
    CVector solve(const CVector& rhs) const;
};

SmootherMatrices build_smoother_matrices(const SystemConfig& cfg, const BasisSet& basis);

/// Per-stream memory of the smoother.
struct SmootherState {
    FreqSymbol prev_X;    // X_{i-1}
    CVector prev_b;       // b_{i-1}
    cplx prev_end_value;  // smoothed previous symbol at n = N
    std::size_t index = 0;

    static SmootherState initial(const SystemConfig& cfg);
};

/// Coordinates of the smooth signal for symbol i > 0 from the reduced recursion:
///   Pf b_i = [ ybar_{i-1}(N) - y_i(-N_cp) ;
///              P1~ X_{i-1} + PV b_{i-1} - P2 X_i ].
CVector compute_coordinates(const SmootherMatrices& mats, const SmootherState& state,
                            const FreqSymbol& X_i, cplx y_i_start);

/// Coordinates from the full-matrix form, which differentiates the previous
/// smoothed body directly: row v of P1 is (1/N) sum_k (j 2 pi k/N)^v e^{-j 2 pi k n/N}.
/// With include_zero_row the v = 0 entry also comes from P1/P2 instead of the
/// direct sample difference.
CVector compute_coordinates_unreduced(const SmootherMatrices& mats, const SystemConfig& cfg,
                                      const TimeSymbol& prev_smoothed, const FreqSymbol& X_i,
                                      bool include_zero_row);

/// ybar_i = y_i + Qf b_i.
TimeSymbol smooth_symbol(const TimeSymbol& y, const CVector& b, const SmootherMatrices& mats);

/// Spectrum of the smooth signal on the active subcarriers,
///   W_k = sum_v b_v (j 2 pi k / N)^v e^{-j phi k},
/// so that w(n) = (1/N) sum_k W_k e^{j 2 pi k n / N}.
CVector smooth_spectrum(const CVector& b, const SystemConfig& cfg);

/// Stateful time-domain smoother for one stream.
class TdSmoother {
public:
    explicit TdSmoother(const SystemConfig& cfg);

    const SystemConfig& config() const noexcept { return cfg_; }
    const SmootherMatrices& matrices() const noexcept { return mats_; }
    const BasisSet& basis() const noexcept { return basis_; }
    const SmootherState& state() const noexcept { return state_; }

    /// Smooths the next symbol. The first symbol passes through unchanged.
    TimeSymbol process(const FreqSymbol& X);
    /// Same as process() but also exposes the unsmoothed symbol and b_i.
    TimeSymbol process(const FreqSymbol& X, TimeSymbol& plain, CVector& b);

    void reset() { state_ = SmootherState::initial(cfg_); }

private:
    SystemConfig cfg_;
    BasisSet basis_;
    SmootherMatrices mats_;
    Modulator modulator_;
    SmootherState state_;
};

struct SmootherTraceEntry {
    FreqSymbol X;
    CVector b;
};

struct TdStreamResult {
    SampleStream stream;
    std::vector<SmootherTraceEntry> trace;
};

TdStreamResult td_smooth_stream(std::span<const FreqSymbol> X, const SystemConfig& cfg);

/// X_i + W_i for every trace entry: the spectral representation of the
/// smoothed symbols.
std::vector<FreqSymbol> composite_spectra(std::span<const SmootherTraceEntry> trace,
                                          const SystemConfig& cfg);

/// residual(i-1, v) = ybar_i^(v)(-N_cp) - ybar_{i-1}^(v)(N) for junctions
/// i = 1 .. count-1 and orders v = 0 .. max_order, evaluated spectrally.
CMatrix continuity_residuals(std::span<const FreqSymbol> spectra, const SystemConfig& cfg,
                             int max_order);

/// RMS magnitude of the order-v derivative of a symbol with unit-energy data,
///   sqrt(sum_k (2 pi k / N)^{2v}) / N,  v = 0 .. max_order.
std::vector<double> derivative_scale(const SystemConfig& cfg, int max_order);

/// Largest |residual(i, v)| / derivative_scale(v) over all junctions and orders.
double max_scaled_residual(std::span<const FreqSymbol> spectra, const SystemConfig& cfg,
                           int max_order);

}  // namespace ncofdm
