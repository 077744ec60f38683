#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/fft.hpp"
#include "ncofdm/transmitter.hpp"

namespace ncofdm {

/// Power-delay profile of a tapped-delay-line channel.
struct TapProfile {
    std::string name;
    std::string source;
    std::vector<double> delays_ns;
    std::vector<double> powers_db;
};

/// Extended Vehicular A profile, 3GPP TS 36.104 Annex B.2 (Table B.2-3).
const TapProfile& eva_profile();

/// One Rayleigh-fading realization. Each tap is a sum of oscillators
///   h_l(t) = sqrt(p_l / M) sum_n exp(j (2 pi f_d cos(a_n) t + c_n)),
///   a_n = (2 pi n + theta_l) / M,
/// with random theta_l and c_n, which gives the Jakes autocorrelation
/// p_l J0(2 pi f_d tau). Gains are held constant over each OFDM frame and
/// evaluated at the frame centre.
class ChannelRealization {
public:
    const std::vector<int>& tap_delays() const noexcept { return delays_; }
    const std::vector<double>& tap_powers() const noexcept { return powers_; }
    double doppler() const noexcept { return f_d_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t symbol_count() const noexcept { return gains_.size(); }
    int max_delay() const;

    /// Continuous-time tap gain at t seconds.
    cplx tap_gain(std::size_t tap, double t) const;
    /// Gains of all taps during frame i.
    const std::vector<cplx>& gains(std::size_t i) const { return gains_.at(i); }
    /// sum_l |h_l|^2 during frame i.
    double power(std::size_t i) const;
    /// H_k = sum_l h_l e^{-j 2 pi k tau_l / N} on the active subcarriers.
    CVector frequency_response(std::size_t i, const SystemConfig& cfg) const;

    friend ChannelRealization generate_taps(const TapProfile&, const SystemConfig&, double,
                                            std::size_t, std::uint64_t, int);
    friend ChannelRealization identity_channel(std::size_t);

private:
    std::vector<int> delays_;
    std::vector<double> powers_;
    double f_d_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<std::vector<double>> osc_freq_;
    std::vector<std::vector<double>> osc_phase_;
    std::vector<std::vector<cplx>> gains_;
};

/// Delays are snapped to the nearest sample at N * delta_f; taps landing on
/// the same sample are merged by adding their powers. Mean tap powers are
/// normalized to sum to one. Throws if the delay spread exceeds N_cp or
/// symbol_count is zero.
ChannelRealization generate_taps(const TapProfile& profile, const SystemConfig& cfg, double f_d,
                                 std::size_t symbol_count, std::uint64_t seed,
                                 int oscillators = 32);

ChannelRealization generate_eva_taps(const SystemConfig& cfg, double f_d,
                                     std::size_t symbol_count, std::uint64_t seed);

/// Single unit tap at delay 0.
ChannelRealization identity_channel(std::size_t symbol_count);

/// Tapped-delay-line convolution; samples before the stream start are zero.
/// Frame i of the stream uses the channel gains of frame first_symbol + i, so
/// a long transmission can be processed in blocks. Because the delay spread
/// never exceeds the CP, the zero history only touches the first CP.
SampleStream apply_multipath(const SampleStream& stream, const ChannelRealization& ch,
                             std::size_t first_symbol = 0);

/// Per-sample complex noise variance for a bit SNR of ebno_db. The bit
/// energy counts the unsmoothed transmit power K/N^2 per sample over a whole
/// frame (CP included) divided by the K log2(M) bits it carries:
///   sigma^2 = (N + N_cp) / (N^2 log2(M)) / (Eb/N0).
double noise_variance(double ebno_db, const SystemConfig& cfg);

/// Adds circular complex Gaussian noise of the given per-sample variance.
SampleStream add_awgn(const SampleStream& stream, double variance, std::mt19937_64& rng);
SampleStream add_awgn(const SampleStream& stream, double ebno_db, const SystemConfig& cfg,
                      std::mt19937_64& rng);

struct ReceiveResult {
    std::vector<std::uint8_t> bits;
    std::vector<FreqSymbol> symbols;  // equalized, per frame
};

/// CP removal, N-point DFT, one-tap zero forcing with the exact per-frame
/// channel response, hard demapping.
ReceiveResult ofdm_receive(const SampleStream& stream, const ChannelRealization& ch,
                           const SystemConfig& cfg, std::size_t first_symbol = 0);

struct SinrRecord {
    double ebno_db = 0.0;
    double measured_sinr_db = 0.0;
    double closed_form_sinr_db = 0.0;
    int V = 0;
};

/// SINR = (K/N) / (sigma_n^2 / G + 2 (V + 1) / N), where sigma_n^2 is the
/// in-band noise energy per symbol body and G the channel power gain.
double closed_form_sinr(const SystemConfig& cfg, double channel_gain, double sigma_n2);

/// Received-energy bookkeeping for SINR: the data part and the smooth part
/// of the transmit signal are sent through the channel separately, and the
/// in-band energy of each (plus that of a unit-variance noise stream) is
/// accumulated per symbol body. Measured SINR is the ratio of the averages.
/// Blocks are pushed in transmission order.
class SinrMeter {
public:
    SinrMeter(const ChannelRealization& ch, const SystemConfig& cfg, std::uint64_t noise_seed);
    /// Whole transmission in one block.
    SinrMeter(const SampleStream& data_part, const SampleStream& smooth_part,
              const ChannelRealization& ch, const SystemConfig& cfg, std::uint64_t noise_seed);

    void push(const SampleStream& data_part, const SampleStream& smooth_part);

    std::size_t symbol_count() const noexcept { return count_; }
    /// Mean in-band energies per symbol body.
    double data_energy() const;
    double smooth_energy() const;
    /// In-band noise energy per body at unit per-sample variance.
    double unit_noise_energy() const;
    /// Mean |H_k|^2 over active subcarriers and frames.
    double channel_gain() const;

    SinrRecord record(double ebno_db) const;

private:
    const ChannelRealization* ch_;
    SystemConfig cfg_;
    Fft fft_;
    std::mt19937_64 rng_;
    std::size_t count_ = 0;
    double data_sum_ = 0.0;
    double smooth_sum_ = 0.0;
    double noise_sum_ = 0.0;
    double gain_sum_ = 0.0;
};

SinrRecord measure_sinr(const SampleStream& data_part, const SampleStream& smooth_part,
                        const ChannelRealization& ch, const SystemConfig& cfg, double ebno_db,
                        std::uint64_t noise_seed);

struct BerPoint {
    double ebno_db = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;

    double ber() const { return bits ? static_cast<double>(errors) / bits : 0.0; }
};

/// Sends blocks of a transmission through ch, adds noise for each Eb/N0 and
/// counts bit errors. The noise for point j comes from a generator seeded
/// with noise_seed + j that persists across blocks, so different waveforms
/// pushed in the same block sizes see identical noise.
class BerCounter {
public:
    BerCounter(const ChannelRealization& ch, const SystemConfig& cfg,
               std::span<const double> ebno_db, std::uint64_t noise_seed);

    /// tx holds the next frames; reference holds their bits.
    void push(const SampleStream& tx, std::span<const std::uint8_t> reference);
    const std::vector<BerPoint>& points() const noexcept { return points_; }
    std::size_t symbol_count() const noexcept { return count_; }

private:
    const ChannelRealization* ch_;
    SystemConfig cfg_;
    std::vector<std::mt19937_64> rngs_;
    std::vector<BerPoint> points_;
    std::size_t count_ = 0;
};

/// One-block convenience wrapper around BerCounter.
std::vector<BerPoint> simulate_ber(const SampleStream& tx, std::span<const std::uint8_t> reference,
                                   const ChannelRealization& ch, const SystemConfig& cfg,
                                   std::span<const double> ebno_db, std::uint64_t noise_seed);

struct BerComparison {
    double z = 0.0;          // (ber_high - ber_low) / pooled standard error
    bool violated = false;   // ber_low significantly above ber_high
    bool separated = false;  // ber_high significantly above ber_low
};

/// Wilson score interval at the 95% level.
std::pair<double, double> wilson_interval(const BerPoint& p);

/// Two-proportion z-test at the two-sided 95% level for the claim
/// BER(low) <= BER(high).
BerComparison compare_ber(const BerPoint& low, const BerPoint& high);

}  // namespace ncofdm
