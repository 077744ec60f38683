#include "ncofdm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {

double sinc(double x)
{
    if (std::abs(x) < 1e-12)
        return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

void finalize_db(PsdEstimate& est)
{
    double ref = 0.0;
    for (std::size_t i = 0; i < est.freqs.size(); ++i) {
        const double f = est.freqs[i];
        const bool inband = est.inband_hi > est.inband_lo
                                ? (f >= est.inband_lo && f <= est.inband_hi)
                                : true;
        if (inband)
            ref = std::max(ref, est.psd[i]);
    }
    if (!(ref > 0.0))
        ref = *std::max_element(est.psd.begin(), est.psd.end());
    est.reference = ref > 0.0 ? ref : 1.0;
    est.psd_db.resize(est.psd.size());
    for (std::size_t i = 0; i < est.psd.size(); ++i)
        est.psd_db[i] = 10.0 * std::log10(std::max(est.psd[i], 1e-300) / est.reference);
}

void occupied_band(const SystemConfig& cfg, PsdEstimate& est)
{
    const auto [lo, hi] = std::minmax_element(cfg.subcarriers().begin(), cfg.subcarriers().end());
    est.inband_lo = (*lo - 0.5) * cfg.delta_f();
    est.inband_hi = (*hi + 0.5) * cfg.delta_f();
}

// e^{j pi f_m (1 - r)} sinc(f_m (1 + r)) for every subcarrier at frequency f.
void pulse_terms(double f, const SystemConfig& cfg, std::vector<cplx>& out)
{
    const double r = static_cast<double>(cfg.N_cp()) / cfg.N();
    const double fTs = f / cfg.delta_f();
    out.resize(cfg.subcarriers().size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double fm = cfg.subcarriers()[m] - fTs;
        out[m] = std::polar(sinc(fm * (1.0 + r)), kPi * fm * (1.0 - r));
    }
}

}  // namespace

double PsdEstimate::level_db(double f, double half_width) const
{
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (std::abs(freqs[i] - f) <= half_width) {
            acc += psd[i];
            ++count;
        }
    }
    if (count == 0)
        throw ConfigError("level_db: no frequency bins inside the requested window");
    return 10.0 * std::log10(acc / count / reference);
}

double PsdEstimate::total_power() const
{
    if (freqs.size() < 2)
        return 0.0;
    const double df = freqs[1] - freqs[0];
    double acc = 0.0;
    for (double p : psd)
        acc += p;
    return acc * df;
}

WelchAccumulator::WelchAccumulator(double sample_rate, const WelchOptions& opt)
    : fs_(sample_rate), L_(opt.segment_length), hop_(opt.segment_length - opt.overlap),
      fft_(opt.segment_length > 0 ? opt.segment_length : 1)
{
    if (L_ <= 0 || opt.overlap < 0 || hop_ <= 0)
        throw ConfigError("welch_psd: invalid segment length / overlap");
    if (!(fs_ > 0.0))
        throw ConfigError("welch_psd: sample rate must be positive");
    window_.resize(L_);
    for (int n = 0; n < L_; ++n) {
        window_[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / L_);
        window_power_ += window_[n] * window_[n];
    }
    seg_.resize(L_);
    spec_.resize(L_);
    acc_.assign(L_, 0.0);
}

void WelchAccumulator::consume_segment(std::size_t start)
{
    for (int n = 0; n < L_; ++n)
        seg_[n] = pending_[start + n] * window_[n];
    fft_.forward(seg_, spec_);
    for (int k = 0; k < L_; ++k)
        acc_[k] += std::norm(spec_[k]);
    ++segments_;
}

void WelchAccumulator::push(std::span<const cplx> samples)
{
    pending_.insert(pending_.end(), samples.begin(), samples.end());
    std::size_t start = 0;
    while (start + L_ <= pending_.size()) {
        consume_segment(start);
        start += hop_;
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(start));
}

PsdEstimate WelchAccumulator::result() const
{
    if (segments_ == 0)
        throw ConfigError("welch_psd: stream shorter than one segment");
    PsdEstimate est;
    est.window = "hann";
    est.segment_count = segments_;
    est.freqs.resize(L_);
    est.psd.resize(L_);
    const double scale = 1.0 / (static_cast<double>(segments_) * fs_ * window_power_);
    for (int i = 0; i < L_; ++i) {
        const int k = i - L_ / 2;
        est.freqs[i] = k * fs_ / L_;
        est.psd[i] = acc_[((k % L_) + L_) % L_] * scale;
    }
    finalize_db(est);
    return est;
}

PsdEstimate WelchAccumulator::result(const SystemConfig& cfg) const
{
    PsdEstimate est = result();
    occupied_band(cfg, est);
    finalize_db(est);
    return est;
}

PsdEstimate welch_psd(std::span<const cplx> samples, double sample_rate, const WelchOptions& opt)
{
    WelchAccumulator acc(sample_rate, opt);
    acc.push(samples);
    return acc.result();
}

PsdEstimate welch_psd(const SampleStream& stream, const SystemConfig& cfg, const WelchOptions& opt)
{
    PsdEstimate est = welch_psd(std::span<const cplx>(stream.samples), cfg.sample_rate(), opt);
    occupied_band(cfg, est);
    finalize_db(est);
    return est;
}

PsdEstimate analytical_psd_rect(std::span<const double> freqs, const SystemConfig& cfg,
                                std::span<const CVector> symbols)
{
    if (symbols.empty())
        throw ConfigError("analytical_psd_rect: empty symbol set");
    const double T = cfg.symbol_duration() + cfg.cp_duration();
    PsdEstimate est;
    est.window = "rect-model";
    est.segment_count = symbols.size();
    est.freqs.assign(freqs.begin(), freqs.end());
    est.psd.resize(freqs.size());
    std::vector<cplx> terms;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        pulse_terms(freqs[i], cfg, terms);
        const Eigen::Map<const CVector> t(terms.data(), static_cast<Eigen::Index>(terms.size()));
        double acc = 0.0;
        for (const CVector& X : symbols)
            acc += std::norm(t.cwiseProduct(X).sum());
        est.psd[i] = T * acc / static_cast<double>(symbols.size());
    }
    occupied_band(cfg, est);
    finalize_db(est);
    return est;
}

PsdEstimate analytical_psd_rect(std::span<const double> freqs, const SystemConfig& cfg,
                                int n_draws, std::uint64_t seed)
{
    if (n_draws <= 0)
        throw ConfigError("analytical_psd_rect: n_draws must be positive");
    const Constellation& c = constellation(cfg.modulation());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> pick(0, static_cast<unsigned>(c.order() - 1));
    std::vector<CVector> symbols(static_cast<std::size_t>(n_draws), CVector(cfg.K()));
    for (CVector& X : symbols)
        for (Eigen::Index m = 0; m < X.size(); ++m)
            X[m] = c.point(pick(rng));
    return analytical_psd_rect(freqs, cfg, symbols);
}

PsdEstimate analytical_psd_smoothed(std::span<const double> freqs, const SystemConfig& cfg,
                                    std::span<const SmoothedSymbol> ensemble)
{
    if (ensemble.empty())
        throw ConfigError("analytical_psd_smoothed: empty ensemble");
    const int V = cfg.V();
    const double T = cfg.symbol_duration() + cfg.cp_duration();
    const double Ts = cfg.symbol_duration();

    std::vector<CVector> composite;
    composite.reserve(ensemble.size());
    for (const auto& s : ensemble)
        composite.push_back(s.X + s.W);

    CVector kpow(cfg.K());
    for (int m = 0; m < cfg.K(); ++m)
        kpow[m] = std::pow(static_cast<double>(cfg.subcarriers()[m]), V);

    PsdEstimate est;
    est.window = "smoothed-model";
    est.segment_count = ensemble.size();
    est.freqs.assign(freqs.begin(), freqs.end());
    est.psd.resize(freqs.size());
    std::vector<cplx> terms;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double f = freqs[i];
        pulse_terms(f, cfg, terms);
        const Eigen::Map<const CVector> t(terms.data(), static_cast<Eigen::Index>(terms.size()));
        const bool singular = V > 0 && std::abs(f * Ts) < 1e-12;
        const CVector weights = singular ? t : CVector(t.cwiseProduct(kpow));
        double acc = 0.0;
        for (const CVector& Z : composite)
            acc += std::norm(weights.cwiseProduct(Z).sum());
        acc /= static_cast<double>(composite.size());
        est.psd[i] = singular ? T * acc : T * acc / std::pow(Ts * f, 2 * V);
    }
    occupied_band(cfg, est);

    // Shared dB reference: in-band peak of the rectangular-pulse model of X + W.
    const PsdEstimate rect = analytical_psd_rect(freqs, cfg, composite);
    est.reference = rect.reference;
    est.psd_db.resize(est.psd.size());
    for (std::size_t i = 0; i < est.psd.size(); ++i)
        est.psd_db[i] = 10.0 * std::log10(std::max(est.psd[i], 1e-300) / est.reference);
    return est;
}

DecayFit estimate_decay_exponent(const PsdEstimate& psd, double f_lo, double f_hi,
                                 int bins_per_octave)
{
    if (!(f_lo > 0.0) || !(f_hi > f_lo))
        throw ConfigError("estimate_decay_exponent: need 0 < f_lo < f_hi");
    if (f_lo <= psd.inband_hi)
        throw ConfigError("estimate_decay_exponent: fit band overlaps the occupied spectrum");
    if (bins_per_octave <= 0)
        throw ConfigError("estimate_decay_exponent: bins_per_octave must be positive");

    const double octaves = std::log2(f_hi / f_lo);
    const int nbins = std::max(1, static_cast<int>(std::ceil(octaves * bins_per_octave - 1e-9)));
    std::vector<double> best(nbins, -1.0), best_f(nbins, 0.0);
    for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
        const double f = psd.freqs[i];
        if (f < f_lo || f > f_hi)
            continue;
        int b = static_cast<int>(std::floor(std::log2(f / f_lo) * bins_per_octave));
        b = std::clamp(b, 0, nbins - 1);
        if (psd.psd[i] > best[b]) {
            best[b] = psd.psd[i];
            best_f[b] = f;
        }
    }
    std::vector<double> xs, ys;
    for (int b = 0; b < nbins; ++b) {
        if (best[b] > 0.0) {
            xs.push_back(std::log10(best_f[b]));
            ys.push_back(std::log10(best[b]));
        }
    }
    if (xs.size() < 3)
        throw ConfigError("estimate_decay_exponent: fewer than three envelope points in band");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        sse += r * r;
    }
    DecayFit fit;
    fit.exponent = -slope;
    fit.std_error = std::sqrt(sse / std::max(1.0, n - 2.0) / sxx);
    fit.points = xs.size();
    return fit;
}

void write_psd_csv(std::ostream& os, const PsdEstimate& psd)
{
    os << "freq_hz,psd_db\n";
    char line[64];
    for (std::size_t i = 0; i < psd.freqs.size(); ++i) {
        std::snprintf(line, sizeof line, "%.6f,%.6f\n", psd.freqs[i], psd.psd_db[i]);
        os << line;
    }
}

}  // namespace ncofdm
