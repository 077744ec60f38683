#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/fft.hpp"
#include "ncofdm/transmitter.hpp"

namespace ncofdm {

/// PSD on an increasing frequency axis (Hz). psd is linear power per Hz;
/// psd_db is 10 log10(psd) shifted so the in-band maximum sits at 0 dB.
struct PsdEstimate {
    std::vector<double> freqs;
    std::vector<double> psd;
    std::vector<double> psd_db;
    std::size_t segment_count = 0;
    std::string window;
    double inband_lo = 0.0;  // occupied band, Hz
    double inband_hi = 0.0;
    double reference = 1.0;  // linear level mapped to 0 dB

    /// Mean linear PSD over [f - half_width, f + half_width], in dB relative
    /// to the same reference as psd_db.
    double level_db(double f, double half_width) const;
    /// Integral of the linear PSD over the whole axis.
    double total_power() const;
};

struct WelchOptions {
    int segment_length = 2048;
    int overlap = 512;
};

/// Incremental Welch estimator: samples may arrive in arbitrary chunks and
/// segments straddling chunk boundaries are handled as in one long stream.
class WelchAccumulator {
public:
    WelchAccumulator(double sample_rate, const WelchOptions& opt = {});
    WelchAccumulator(WelchAccumulator&&) noexcept = default;
    WelchAccumulator& operator=(WelchAccumulator&&) noexcept = default;

    void push(std::span<const cplx> samples);
    std::size_t segment_count() const noexcept { return segments_; }
    /// Throws ConfigError if no complete segment has been seen.
    PsdEstimate result() const;
    /// Same, with the occupied band of cfg as the dB reference.
    PsdEstimate result(const SystemConfig& cfg) const;

private:
    void consume_segment(std::size_t start);

    double fs_;
    int L_;
    int hop_;
    std::vector<double> window_;
    double window_power_ = 0.0;
    Fft fft_;
    std::vector<cplx> pending_;
    std::vector<cplx> seg_, spec_;
    std::vector<double> acc_;
    std::size_t segments_ = 0;
};

/// Averaged modified periodogram with a periodic Hann window; segments of
/// segment_length samples advance by segment_length - overlap. Output is
/// FFT-shifted onto [-fs/2, fs/2) and normalized so that integrating the
/// linear PSD over frequency gives the mean sample power.
PsdEstimate welch_psd(std::span<const cplx> samples, double sample_rate,
                      const WelchOptions& opt = {});

/// Welch estimate of a stream with the occupied band of cfg as the dB reference.
PsdEstimate welch_psd(const SampleStream& stream, const SystemConfig& cfg,
                      const WelchOptions& opt = {});

/// Monte Carlo evaluation of the rectangular-pulse OFDM PSD
///   (T_s + T_cp) E| sum_m X_m sinc(f_m (1 + r)) e^{j pi f_m (1 - r)} |^2,
///   f_m = k_m - f T_s,  r = T_cp / T_s,
/// averaged over n_draws random constellation symbols.
PsdEstimate analytical_psd_rect(std::span<const double> freqs, const SystemConfig& cfg,
                                int n_draws, std::uint64_t seed);

/// Same expression evaluated over a given set of data symbols.
PsdEstimate analytical_psd_rect(std::span<const double> freqs, const SystemConfig& cfg,
                                std::span<const CVector> symbols);

struct SmoothedSymbol {
    CVector X;  // data
    CVector W;  // spectrum of the smooth signal on the active subcarriers
};

/// Monte Carlo evaluation of the smoothed-signal PSD model
///   (T_s + T_cp)/(T_s f)^{2V} E| sum_m k_m^V (X+W)_m sinc(f_m (1 + r)) e^{j pi f_m (1 - r)} |^2.
/// The model is singular at f = 0 for V > 0; that point takes the
/// rectangular-pulse value of X + W. The dB reference is the in-band maximum
/// of the rectangular-pulse PSD of X + W, so both models share one scale.
PsdEstimate analytical_psd_smoothed(std::span<const double> freqs, const SystemConfig& cfg,
                                    std::span<const SmoothedSymbol> ensemble);

struct DecayFit {
    double exponent = 0.0;   // p in envelope ~ f^{-p}
    double std_error = 0.0;  // standard error of the fitted slope
    std::size_t points = 0;  // envelope points used in the regression
};

/// Fits log10(envelope) against log10(f) on the positive-frequency side over
/// [f_lo, f_hi]. The envelope is the maximum of the linear PSD in each
/// log-spaced bin (bins_per_octave per octave), which skips sinc nulls.
DecayFit estimate_decay_exponent(const PsdEstimate& psd, double f_lo, double f_hi,
                                 int bins_per_octave = 4);

/// Writes "freq_hz,psd_db" rows.
void write_psd_csv(std::ostream& os, const PsdEstimate& psd);

}  // namespace ncofdm
