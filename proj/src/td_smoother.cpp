#include "ncofdm/td_smoother.hpp"

#include <algorithm>
#include <cmath>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {

// (j 2 pi k / N)^v
cplx derivative_factor(int k, int v, int N)
{
    return std::pow(kJ * (2.0 * kPi * k / N), v);
}

int wrap(int n, int N) { return ((n % N) + N) % N; }

}  // namespace

BasisSet build_basis_set(const SystemConfig& cfg) { return build_basis_set(cfg, 2 * cfg.V()); }

BasisSet build_basis_set(const SystemConfig& cfg, int max_order)
{
    if (max_order < 0)
        throw ConfigError("basis order must be non-negative");
    const int N = cfg.N();
    const int N_cp = cfg.N_cp();
    const auto& idx = cfg.subcarriers();

    BasisSet basis;
    basis.N = N;
    basis.N_cp = N_cp;
    basis.vectors.resize(max_order + 1);
    basis.edge_start.resize(max_order + 1);
    basis.edge_end.resize(max_order + 1);

    Fft fft(N);
    std::vector<cplx> spectrum(N), periodic(N);
    for (int v = 0; v <= max_order; ++v) {
        std::fill(spectrum.begin(), spectrum.end(), cplx{});
        cplx start{}, end{};
        for (int k : idx) {
            const cplx c = derivative_factor(k, v, N) * std::polar(1.0, -cfg.phi() * k);
            spectrum[cfg.bin(k)] = c;
            // e^{-j phi k} e^{-j 2 pi k N_cp / N} = 1 at n = -N_cp.
            start += derivative_factor(k, v, N);
            end += c;
        }
        fft.backward(spectrum, periodic);
        CVector q(N_cp + N);
        for (int n = -N_cp; n < N; ++n)
            q[n + N_cp] = periodic[wrap(n, N)] / static_cast<double>(N);
        basis.vectors[v] = std::move(q);
        basis.edge_start[v] = start / static_cast<double>(N);
        basis.edge_end[v] = end / static_cast<double>(N);
    }
    return basis;
}

CVector dirichlet_kernel(const SystemConfig& cfg)
{
    const auto& idx = cfg.subcarriers();
    const int K = cfg.K();
    const int N = cfg.N();
    const int N_cp = cfg.N_cp();
    for (int m = 1; m < K; ++m)
        if (idx[m] != idx[0] + m)
            throw ConfigError("dirichlet_kernel needs a contiguous ascending subcarrier block");
    // sum_{k=k0}^{k0+K-1} e^{j 2 pi k t / N}
    //   = e^{j pi (2 k0 + K - 1) t / N} sin(pi K t / N) / sin(pi t / N),  t = n + N_cp
    const double k0 = idx[0];
    CVector out(N_cp + N);
    for (int n = -N_cp; n < N; ++n) {
        const int t = n + N_cp;
        const double s = std::sin(kPi * t / N);
        double ratio;
        if (wrap(t, N) == 0) {
            // Limit K * cos(pi K t/N) / cos(pi t/N) at the kernel peaks.
            ratio = K * std::cos(kPi * K * t / N) / std::cos(kPi * t / N);
        } else {
            ratio = std::sin(kPi * K * t / N) / s;
        }
        out[t] = std::polar(ratio / N, kPi * (2.0 * k0 + K - 1) * t / N);
    }
    return out;
}

CVector evaluate_derivatives(const CVector& X, int n, int max_order, const SystemConfig& cfg)
{
    if (max_order < 0)
        throw ConfigError("derivative order must be non-negative");
    if (X.size() != cfg.K())
        throw ConfigError("evaluate_derivatives: symbol length does not match K");
    const int N = cfg.N();
    const auto& idx = cfg.subcarriers();
    CVector out = CVector::Zero(max_order + 1);
    for (int m = 0; m < cfg.K(); ++m) {
        const int k = idx[m];
        const cplx w = kJ * (2.0 * kPi * k / N);
        cplx term = X[m] * std::polar(1.0, 2.0 * kPi * static_cast<double>(wrap(k * n, N)) / N);
        for (int v = 0; v <= max_order; ++v) {
            out[v] += term;
            term *= w;
        }
    }
    return out / static_cast<double>(N);
}

CVector SmootherMatrices::solve(const CVector& rhs) const
{
    const CVector z = Pf_solver.solve(equilibration.cast<cplx>().cwiseProduct(rhs));
    return equilibration.cast<cplx>().cwiseProduct(z);
}

SmootherMatrices build_smoother_matrices(const SystemConfig& cfg, const BasisSet& basis)
{
    const int V = cfg.V();
    const int K = cfg.K();
    const int N = cfg.N();
    if (basis.max_order() < 2 * V)
        throw ConfigError("basis set must contain orders up to 2V");

    SmootherMatrices m;
    m.V = V;
    m.Pf.resize(V + 1, V + 1);
    for (int u = 0; u <= V; ++u)
        for (int v = 0; v <= V; ++v)
            m.Pf(u, v) = basis.edge_start[u + v];

    m.PV.resize(V, V + 1);
    for (int u = 1; u <= V; ++u)
        for (int v = 0; v <= V; ++v)
            m.PV(u - 1, v) = basis.edge_end[u + v];

    m.P1_tilde.resize(V, K);
    m.P2.resize(V, K);
    m.P2_row0.resize(K);
    for (int c = 0; c < K; ++c) {
        const int k = cfg.subcarriers()[c];
        const cplx phase = std::polar(1.0, cfg.phi() * k);
        m.P2_row0[c] = phase / static_cast<double>(N);
        for (int v = 1; v <= V; ++v) {
            const cplx d = derivative_factor(k, v, N) / static_cast<double>(N);
            m.P1_tilde(v - 1, c) = d;
            m.P2(v - 1, c) = d * phase;
        }
    }

    m.Qf.resize(basis.N_cp + N, V + 1);
    m.Qf_end.resize(V + 1);
    for (int v = 0; v <= V; ++v) {
        m.Qf.col(v) = basis.vectors[v];
        m.Qf_end[v] = basis.edge_end[v];
    }

    // Pf mixes moments spanning several orders of magnitude; a symmetric
    // diagonal equilibration keeps the LU well scaled without changing b.
    m.equilibration.resize(V + 1);
    for (int v = 0; v <= V; ++v)
        m.equilibration[v] = 1.0 / std::sqrt(std::abs(m.Pf(v, v)));
    const CMatrix scaled = m.equilibration.cast<cplx>().asDiagonal() * m.Pf *
                           m.equilibration.cast<cplx>().asDiagonal();
    m.Pf_solver.compute(scaled);
    m.Pf_condition = scaled.cwiseAbs().colwise().sum().maxCoeff() *
                     m.Pf_solver.inverse().cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(m.Pf_condition) || m.Pf_condition > 1e13)
        throw NumericError("Pf is numerically singular", m.Pf_condition);
    return m;
}

SmootherState SmootherState::initial(const SystemConfig& cfg)
{
    return {FreqSymbol::zeros(cfg), CVector::Zero(cfg.V() + 1), cplx{}, 0};
}

CVector compute_coordinates(const SmootherMatrices& mats, const SmootherState& state,
                            const FreqSymbol& X_i, cplx y_i_start)
{
    const int V = mats.V;
    if (X_i.values.size() != mats.P2.cols() || state.prev_X.values.size() != mats.P2.cols() ||
        state.prev_b.size() != V + 1)
        throw ConfigError("compute_coordinates: dimension mismatch");
    CVector rhs(V + 1);
    rhs[0] = state.prev_end_value - y_i_start;
    if (V > 0)
        rhs.tail(V) = mats.P1_tilde * state.prev_X.values + mats.PV * state.prev_b -
                      mats.P2 * X_i.values;
    return mats.solve(rhs);
}

CVector compute_coordinates_unreduced(const SmootherMatrices& mats, const SystemConfig& cfg,
                                      const TimeSymbol& prev_smoothed, const FreqSymbol& X_i,
                                      bool include_zero_row)
{
    const int V = mats.V;
    const int N = cfg.N();
    if (prev_smoothed.N() != N || X_i.values.size() != cfg.K())
        throw ConfigError("compute_coordinates_unreduced: dimension mismatch");
    CMatrix P1(V + 1, N);
    CMatrix P2(V + 1, cfg.K());
    for (int v = 0; v <= V; ++v) {
        for (int n = 0; n < N; ++n) {
            cplx acc{};
            for (int k : cfg.subcarriers())
                acc += derivative_factor(k, v, N) *
                       std::polar(1.0, -2.0 * kPi * static_cast<double>(wrap(k * n, N)) / N);
            P1(v, n) = acc / static_cast<double>(N);
        }
        for (int c = 0; c < cfg.K(); ++c) {
            const int k = cfg.subcarriers()[c];
            P2(v, c) = derivative_factor(k, v, N) * std::polar(1.0, cfg.phi() * k) /
                       static_cast<double>(N);
        }
    }
    CVector rhs = P1 * prev_smoothed.body() - P2 * X_i.values;
    if (!include_zero_row)
        rhs[0] = prev_smoothed.at(0) - P2.row(0).cwiseProduct(X_i.values.transpose()).sum();
    return mats.solve(rhs);
}

TimeSymbol smooth_symbol(const TimeSymbol& y, const CVector& b, const SmootherMatrices& mats)
{
    if (b.size() != mats.Qf.cols() || y.samples.size() != mats.Qf.rows())
        throw ConfigError("smooth_symbol: dimension mismatch");
    return {y.samples + mats.Qf * b, y.N_cp};
}

CVector smooth_spectrum(const CVector& b, const SystemConfig& cfg)
{
    const int N = cfg.N();
    CVector W(cfg.K());
    for (int c = 0; c < cfg.K(); ++c) {
        const int k = cfg.subcarriers()[c];
        cplx acc{};
        for (Eigen::Index v = 0; v < b.size(); ++v)
            acc += b[v] * derivative_factor(k, static_cast<int>(v), N);
        W[c] = acc * std::polar(1.0, -cfg.phi() * k);
    }
    return W;
}

TdSmoother::TdSmoother(const SystemConfig& cfg)
    : cfg_(cfg), basis_(build_basis_set(cfg)), mats_(build_smoother_matrices(cfg, basis_)),
      modulator_(cfg), state_(SmootherState::initial(cfg))
{
}

TimeSymbol TdSmoother::process(const FreqSymbol& X)
{
    TimeSymbol plain;
    CVector b;
    return process(X, plain, b);
}

TimeSymbol TdSmoother::process(const FreqSymbol& X, TimeSymbol& plain, CVector& b)
{
    plain = modulator_.modulate(X);
    TimeSymbol out;
    if (state_.index == 0) {
        b = CVector::Zero(cfg_.V() + 1);
        out = plain;
    } else {
        b = compute_coordinates(mats_, state_, X, plain.at(-cfg_.N_cp()));
        out = smooth_symbol(plain, b, mats_);
    }
    // The data part is N-periodic, so y_i(N) = y_i(0); the smooth part uses
    // the stored basis end values.
    state_.prev_end_value = plain.at(0) + mats_.Qf_end.cwiseProduct(b).sum();
    state_.prev_X = X;
    state_.prev_b = b;
    ++state_.index;
    return out;
}

TdStreamResult td_smooth_stream(std::span<const FreqSymbol> X, const SystemConfig& cfg)
{
    TdSmoother smoother(cfg);
    TdStreamResult res;
    res.stream.frame_len = cfg.frame_len();
    res.stream.symbol_count = X.size();
    res.stream.samples.reserve(X.size() * static_cast<std::size_t>(cfg.frame_len()));
    res.trace.reserve(X.size());
    TimeSymbol plain;
    CVector b;
    for (const FreqSymbol& x : X) {
        const TimeSymbol out = smoother.process(x, plain, b);
        res.stream.samples.insert(res.stream.samples.end(), out.samples.data(),
                                  out.samples.data() + out.samples.size());
        res.trace.push_back({x, b});
    }
    return res;
}

std::vector<FreqSymbol> composite_spectra(std::span<const SmootherTraceEntry> trace,
                                          const SystemConfig& cfg)
{
    std::vector<FreqSymbol> out;
    out.reserve(trace.size());
    for (const auto& e : trace)
        out.push_back({e.X.values + smooth_spectrum(e.b, cfg)});
    return out;
}

CMatrix continuity_residuals(std::span<const FreqSymbol> spectra, const SystemConfig& cfg,
                             int max_order)
{
    if (spectra.size() < 2)
        return CMatrix(0, max_order + 1);
    CMatrix res(static_cast<Eigen::Index>(spectra.size() - 1), max_order + 1);
    CVector prev_end = evaluate_derivatives(spectra[0].values, cfg.N(), max_order, cfg);
    for (std::size_t i = 1; i < spectra.size(); ++i) {
        const CVector start = evaluate_derivatives(spectra[i].values, -cfg.N_cp(), max_order, cfg);
        res.row(static_cast<Eigen::Index>(i - 1)) = (start - prev_end).transpose();
        prev_end = evaluate_derivatives(spectra[i].values, cfg.N(), max_order, cfg);
    }
    return res;
}

std::vector<double> derivative_scale(const SystemConfig& cfg, int max_order)
{
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
    const double N = cfg.N();
    for (int v = 0; v <= max_order; ++v) {
        double acc = 0.0;
        for (int k : cfg.subcarriers())
            acc += std::pow(2.0 * kPi * k / N, 2 * v);
        out[v] = std::sqrt(acc) / N;
    }
    return out;
}

double max_scaled_residual(std::span<const FreqSymbol> spectra, const SystemConfig& cfg,
                           int max_order)
{
    double worst = 0.0;
    if (spectra.size() < 2)
        return worst;
    const std::vector<double> scale = derivative_scale(cfg, max_order);
    CVector prev_end = evaluate_derivatives(spectra[0].values, cfg.N(), max_order, cfg);
    for (std::size_t i = 1; i < spectra.size(); ++i) {
        const CVector start = evaluate_derivatives(spectra[i].values, -cfg.N_cp(), max_order, cfg);
        for (int v = 0; v <= max_order; ++v) {
            worst = std::max(worst, std::abs(start[v] - prev_end[v]) / scale[v]);
        }
        prev_end = evaluate_derivatives(spectra[i].values, cfg.N(), max_order, cfg);
    }
    return worst;
}

}  // namespace ncofdm
