#include "ncofdm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ncofdm/fft.hpp"

namespace ncofdm {

namespace {

// Mean in-band body energy per frame of a frame-aligned stream.
double inband_energy(const SampleStream& s, const SystemConfig& cfg, Fft& fft)
{
    const int N = cfg.N();
    std::vector<cplx> out(N);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.symbol_count; ++i) {
        fft.forward(s.frame(i).subspan(cfg.N_cp(), N), out);
        for (int k : cfg.subcarriers())
            acc += std::norm(out[cfg.bin(k)]);
    }
    return s.symbol_count ? acc / N / static_cast<double>(s.symbol_count) : 0.0;
}

void check_stream(const SampleStream& s, const SystemConfig& cfg, const char* who)
{
    if (s.frame_len != cfg.frame_len())
        throw ConfigError(std::string(who) + ": stream frame length does not match the config");
    if (s.samples.size() != s.symbol_count * static_cast<std::size_t>(s.frame_len))
        throw ConfigError(std::string(who) + ": stream is not frame aligned");
}

}  // namespace

const TapProfile& eva_profile()
{
    static const TapProfile p{
        "EVA",
        "3GPP TS 36.104 V8.x Annex B.2, Table B.2-3 (Extended Vehicular A)",
        {0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
        {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9},
    };
    return p;
}

int ChannelRealization::max_delay() const
{
    return delays_.empty() ? 0 : *std::max_element(delays_.begin(), delays_.end());
}

cplx ChannelRealization::tap_gain(std::size_t tap, double t) const
{
    const auto& f = osc_freq_.at(tap);
    const auto& c = osc_phase_.at(tap);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n)
        acc += std::polar(1.0, 2.0 * kPi * f[n] * t + c[n]);
    return acc * std::sqrt(powers_[tap] / static_cast<double>(f.size()));
}

double ChannelRealization::power(std::size_t i) const
{
    double acc = 0.0;
    for (const cplx& h : gains(i))
        acc += std::norm(h);
    return acc;
}

CVector ChannelRealization::frequency_response(std::size_t i, const SystemConfig& cfg) const
{
    const auto& g = gains(i);
    CVector H = CVector::Zero(cfg.K());
    for (int m = 0; m < cfg.K(); ++m) {
        const int k = cfg.subcarriers()[m];
        for (std::size_t l = 0; l < g.size(); ++l)
            H[m] += g[l] * std::polar(1.0, -2.0 * kPi * k * delays_[l] / cfg.N());
    }
    return H;
}

ChannelRealization generate_taps(const TapProfile& profile, const SystemConfig& cfg, double f_d,
                                 std::size_t symbol_count, std::uint64_t seed, int oscillators)
{
    if (symbol_count == 0)
        throw ConfigError("generate_taps: symbol_count must be positive");
    if (oscillators < 1)
        throw ConfigError("generate_taps: need at least one oscillator per tap");
    if (!(f_d >= 0.0))
        throw ConfigError("generate_taps: Doppler frequency must be non-negative");
    if (profile.delays_ns.size() != profile.powers_db.size() || profile.delays_ns.empty())
        throw ConfigError("generate_taps: malformed tap profile");

    std::map<int, double> merged;
    for (std::size_t l = 0; l < profile.delays_ns.size(); ++l) {
        const int d = static_cast<int>(std::lround(profile.delays_ns[l] * 1e-9 * cfg.sample_rate()));
        merged[d] += std::pow(10.0, profile.powers_db[l] / 10.0);
    }
    if (merged.rbegin()->first > cfg.N_cp())
        throw ConfigError("generate_taps: delay spread of " + std::to_string(merged.rbegin()->first) +
                          " samples exceeds the cyclic prefix");

    ChannelRealization ch;
    ch.f_d_ = f_d;
    ch.seed_ = seed;
    double total = 0.0;
    for (const auto& [d, p] : merged)
        total += p;
    for (const auto& [d, p] : merged) {
        ch.delays_.push_back(d);
        ch.powers_.push_back(p / total);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    const std::size_t L = ch.delays_.size();
    ch.osc_freq_.assign(L, std::vector<double>(oscillators));
    ch.osc_phase_.assign(L, std::vector<double>(oscillators));
    for (std::size_t l = 0; l < L; ++l) {
        const double theta = uni(rng);
        for (int n = 0; n < oscillators; ++n) {
            const double alpha = (2.0 * kPi * n + theta) / oscillators;
            ch.osc_freq_[l][n] = f_d * std::cos(alpha);
            ch.osc_phase_[l][n] = uni(rng);
        }
    }

    const double frame_time = cfg.frame_len() / cfg.sample_rate();
    ch.gains_.assign(symbol_count, std::vector<cplx>(L));
    for (std::size_t i = 0; i < symbol_count; ++i)
        for (std::size_t l = 0; l < L; ++l)
            ch.gains_[i][l] = ch.tap_gain(l, (static_cast<double>(i) + 0.5) * frame_time);
    return ch;
}

ChannelRealization generate_eva_taps(const SystemConfig& cfg, double f_d,
                                     std::size_t symbol_count, std::uint64_t seed)
{
    return generate_taps(eva_profile(), cfg, f_d, symbol_count, seed);
}

ChannelRealization identity_channel(std::size_t symbol_count)
{
    if (symbol_count == 0)
        throw ConfigError("identity_channel: symbol_count must be positive");
    ChannelRealization ch;
    ch.delays_ = {0};
    ch.powers_ = {1.0};
    ch.osc_freq_ = {{0.0}};
    ch.osc_phase_ = {{0.0}};
    ch.gains_.assign(symbol_count, std::vector<cplx>{cplx(1.0, 0.0)});
    return ch;
}

SampleStream apply_multipath(const SampleStream& stream, const ChannelRealization& ch,
                             std::size_t first_symbol)
{
    if (stream.frame_len <= 0)
        throw ConfigError("apply_multipath: invalid frame length");
    if (ch.symbol_count() < first_symbol + stream.symbol_count)
        throw ConfigError("apply_multipath: channel realization shorter than the stream");
    SampleStream out = stream;
    const auto& delays = ch.tap_delays();
    const std::size_t total = stream.samples.size();
    for (std::size_t n = 0; n < total; ++n) {
        const auto& g = ch.gains(first_symbol + n / stream.frame_len);
        cplx acc = 0.0;
        for (std::size_t l = 0; l < delays.size(); ++l) {
            const std::size_t d = static_cast<std::size_t>(delays[l]);
            if (n >= d)
                acc += g[l] * stream.samples[n - d];
        }
        out.samples[n] = acc;
    }
    return out;
}

double noise_variance(double ebno_db, const SystemConfig& cfg)
{
    if (std::isinf(ebno_db) && ebno_db > 0)
        return 0.0;
    const double N = cfg.N();
    const double eb = (N + cfg.N_cp()) / (N * N * bits_per_symbol(cfg.modulation()));
    return eb / std::pow(10.0, ebno_db / 10.0);
}

SampleStream add_awgn(const SampleStream& stream, double variance, std::mt19937_64& rng)
{
    if (!(variance >= 0.0))
        throw ConfigError("add_awgn: variance must be non-negative");
    SampleStream out = stream;
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    for (cplx& s : out.samples) {
        const double re = g(rng);
        const double im = g(rng);
        s += cplx(re, im);
    }
    return out;
}

SampleStream add_awgn(const SampleStream& stream, double ebno_db, const SystemConfig& cfg,
                      std::mt19937_64& rng)
{
    return add_awgn(stream, noise_variance(ebno_db, cfg), rng);
}

ReceiveResult ofdm_receive(const SampleStream& stream, const ChannelRealization& ch,
                           const SystemConfig& cfg, std::size_t first_symbol)
{
    check_stream(stream, cfg, "ofdm_receive");
    if (ch.symbol_count() < first_symbol + stream.symbol_count)
        throw ConfigError("ofdm_receive: channel realization shorter than the stream");
    const int N = cfg.N();
    Fft fft(N);
    std::vector<cplx> spec(N);
    ReceiveResult res;
    res.symbols.reserve(stream.symbol_count);
    res.bits.reserve(stream.symbol_count * cfg.bits_per_ofdm_symbol());
    for (std::size_t i = 0; i < stream.symbol_count; ++i) {
        fft.forward(stream.frame(i).subspan(cfg.N_cp(), N), spec);
        const CVector H = ch.frequency_response(first_symbol + i, cfg);
        FreqSymbol X = FreqSymbol::zeros(cfg);
        for (int m = 0; m < cfg.K(); ++m)
            X.values[m] = spec[cfg.bin(cfg.subcarriers()[m])] / H[m];
        const auto bits = qam_demap(X, cfg);
        res.bits.insert(res.bits.end(), bits.begin(), bits.end());
        res.symbols.push_back(std::move(X));
    }
    return res;
}

double closed_form_sinr(const SystemConfig& cfg, double channel_gain, double sigma_n2)
{
    if (!(channel_gain > 0.0))
        throw ConfigError("closed_form_sinr: channel gain must be positive");
    const double N = cfg.N();
    return (cfg.K() / N) / (sigma_n2 / channel_gain + 2.0 * (cfg.V() + 1) / N);
}

SinrMeter::SinrMeter(const ChannelRealization& ch, const SystemConfig& cfg,
                     std::uint64_t noise_seed)
    : ch_(&ch), cfg_(cfg), fft_(cfg.N()), rng_(noise_seed)
{
}

SinrMeter::SinrMeter(const SampleStream& data_part, const SampleStream& smooth_part,
                     const ChannelRealization& ch, const SystemConfig& cfg,
                     std::uint64_t noise_seed)
    : SinrMeter(ch, cfg, noise_seed)
{
    push(data_part, smooth_part);
}

void SinrMeter::push(const SampleStream& data_part, const SampleStream& smooth_part)
{
    check_stream(data_part, cfg_, "SinrMeter");
    check_stream(smooth_part, cfg_, "SinrMeter");
    if (data_part.symbol_count != smooth_part.symbol_count)
        throw ConfigError("SinrMeter: data and smooth blocks differ in length");
    const std::size_t n = data_part.symbol_count;
    if (n == 0)
        return;
    const double w = static_cast<double>(n);
    data_sum_ += w * inband_energy(apply_multipath(data_part, *ch_, count_), cfg_, fft_);
    smooth_sum_ += w * inband_energy(apply_multipath(smooth_part, *ch_, count_), cfg_, fft_);

    SampleStream zero = data_part;
    std::fill(zero.samples.begin(), zero.samples.end(), cplx(0.0, 0.0));
    noise_sum_ += w * inband_energy(add_awgn(zero, 1.0, rng_), cfg_, fft_);

    for (std::size_t i = 0; i < n; ++i)
        gain_sum_ += ch_->frequency_response(count_ + i, cfg_).squaredNorm() / cfg_.K();
    count_ += n;
}

double SinrMeter::data_energy() const
{
    return count_ ? data_sum_ / static_cast<double>(count_) : 0.0;
}

double SinrMeter::smooth_energy() const
{
    return count_ ? smooth_sum_ / static_cast<double>(count_) : 0.0;
}

double SinrMeter::unit_noise_energy() const
{
    return count_ ? noise_sum_ / static_cast<double>(count_) : 0.0;
}

double SinrMeter::channel_gain() const
{
    return count_ ? gain_sum_ / static_cast<double>(count_) : 0.0;
}

SinrRecord SinrMeter::record(double ebno_db) const
{
    if (count_ == 0)
        throw ConfigError("SinrMeter: no symbols measured");
    const double var = noise_variance(ebno_db, cfg_);
    SinrRecord r;
    r.ebno_db = ebno_db;
    r.V = cfg_.V();
    r.measured_sinr_db =
        10.0 * std::log10(data_energy() / (unit_noise_energy() * var + smooth_energy()));
    r.closed_form_sinr_db =
        10.0 * std::log10(closed_form_sinr(cfg_, channel_gain(), cfg_.K() * var));
    return r;
}

SinrRecord measure_sinr(const SampleStream& data_part, const SampleStream& smooth_part,
                        const ChannelRealization& ch, const SystemConfig& cfg, double ebno_db,
                        std::uint64_t noise_seed)
{
    return SinrMeter(data_part, smooth_part, ch, cfg, noise_seed).record(ebno_db);
}

BerCounter::BerCounter(const ChannelRealization& ch, const SystemConfig& cfg,
                       std::span<const double> ebno_db, std::uint64_t noise_seed)
    : ch_(&ch), cfg_(cfg)
{
    for (std::size_t j = 0; j < ebno_db.size(); ++j) {
        rngs_.emplace_back(noise_seed + j);
        points_.push_back(BerPoint{ebno_db[j], 0, 0});
    }
}

void BerCounter::push(const SampleStream& tx, std::span<const std::uint8_t> reference)
{
    check_stream(tx, cfg_, "BerCounter");
    if (reference.size() != tx.symbol_count * static_cast<std::size_t>(cfg_.bits_per_ofdm_symbol()))
        throw ConfigError("BerCounter: reference bit count does not match the block");
    const SampleStream faded = apply_multipath(tx, *ch_, count_);
    for (std::size_t j = 0; j < points_.size(); ++j) {
        const SampleStream rx = add_awgn(faded, points_[j].ebno_db, cfg_, rngs_[j]);
        const ReceiveResult res = ofdm_receive(rx, *ch_, cfg_, count_);
        points_[j].bits += reference.size();
        for (std::size_t b = 0; b < reference.size(); ++b)
            points_[j].errors += res.bits[b] != reference[b];
    }
    count_ += tx.symbol_count;
}

std::vector<BerPoint> simulate_ber(const SampleStream& tx, std::span<const std::uint8_t> reference,
                                   const ChannelRealization& ch, const SystemConfig& cfg,
                                   std::span<const double> ebno_db, std::uint64_t noise_seed)
{
    BerCounter counter(ch, cfg, ebno_db, noise_seed);
    counter.push(tx, reference);
    return counter.points();
}

std::pair<double, double> wilson_interval(const BerPoint& p)
{
    if (p.bits == 0)
        return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = static_cast<double>(p.bits);
    const double ph = p.ber();
    const double denom = 1.0 + z * z / n;
    const double centre = (ph + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

BerComparison compare_ber(const BerPoint& low, const BerPoint& high)
{
    BerComparison c;
    if (low.bits == 0 || high.bits == 0)
        throw ConfigError("compare_ber: empty BER point");
    const double n1 = static_cast<double>(low.bits);
    const double n2 = static_cast<double>(high.bits);
    const double p = (static_cast<double>(low.errors) + static_cast<double>(high.errors)) / (n1 + n2);
    const double se = std::sqrt(p * (1.0 - p) * (1.0 / n1 + 1.0 / n2));
    if (se > 0.0)
        c.z = (high.ber() - low.ber()) / se;
    c.violated = c.z < -1.96;
    c.separated = c.z > 1.96;
    return c;
}

}  // namespace ncofdm
