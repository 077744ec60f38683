#include "ncofdm/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ncofdm {

Modulation parse_modulation(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
    if (s == "QPSK" || s == "4QAM")
        return Modulation::Qpsk;
    if (s == "16QAM" || s == "QAM16")
        return Modulation::Qam16;
    if (s == "64QAM" || s == "QAM64")
        return Modulation::Qam64;
    throw ConfigError("unknown modulation '" + std::string(name) + "'");
}

std::string modulation_name(Modulation m)
{
    switch (m) {
    case Modulation::Qpsk:
        return "QPSK";
    case Modulation::Qam16:
        return "16QAM";
    case Modulation::Qam64:
        return "64QAM";
    }
    return "?";
}

int bits_per_symbol(Modulation m)
{
    switch (m) {
    case Modulation::Qpsk:
        return 2;
    case Modulation::Qam16:
        return 4;
    case Modulation::Qam64:
        return 6;
    }
    return 0;
}

SystemConfig build_system_config(std::vector<int> subcarriers, int N, int N_cp, int V,
                                 Modulation modulation, double delta_f)
{
    if (N <= 0)
        throw ConfigError("N must be positive");
    if (N_cp < 0)
        throw ConfigError("N_cp must be non-negative");
    if (V < 0)
        throw ConfigError("derivative order V must be non-negative");
    if (!(delta_f > 0.0))
        throw ConfigError("subcarrier spacing must be positive");
    const int K = static_cast<int>(subcarriers.size());
    if (K == 0)
        throw ConfigError("at least one active subcarrier is required");
    if (K > N)
        throw ConfigError("K = " + std::to_string(K) + " exceeds N = " + std::to_string(N));
    std::set<int> seen;
    for (int k : subcarriers) {
        if (k < -N / 2 || k > N / 2 - 1)
            throw ConfigError("subcarrier index " + std::to_string(k) + " outside [-N/2, N/2-1]");
        if (!seen.insert(k).second)
            throw ConfigError("duplicate subcarrier index " + std::to_string(k));
    }
    if (V + 1 > K)
        throw ConfigError("V + 1 must not exceed the number of subcarriers");

    SystemConfig cfg;
    cfg.N_ = N;
    cfg.N_cp_ = N_cp;
    cfg.V_ = V;
    cfg.delta_f_ = delta_f;
    cfg.modulation_ = modulation;
    cfg.subcarriers_ = std::move(subcarriers);
    return cfg;
}

SystemConfig build_system_config(int K, int N, int N_cp, int V, Modulation modulation,
                                 double delta_f)
{
    if (K <= 0)
        throw ConfigError("K must be positive");
    if (K > N)
        throw ConfigError("K = " + std::to_string(K) + " exceeds N = " + std::to_string(N));
    std::vector<int> idx(K);
    for (int m = 0; m < K; ++m)
        idx[m] = m - K / 2;
    return build_system_config(std::move(idx), N, N_cp, V, modulation, delta_f);
}

SystemConfig SystemConfig::with_order(int V) const
{
    return build_system_config(subcarriers_, N_, N_cp_, V, modulation_, delta_f_);
}

SystemConfig SystemConfig::with_subcarriers(std::vector<int> subcarriers) const
{
    return build_system_config(std::move(subcarriers), N_, N_cp_, V_, modulation_, delta_f_);
}

namespace {

unsigned gray_decode(unsigned g)
{
    unsigned b = g;
    for (unsigned shift = 1; shift < 32; shift <<= 1)
        b ^= b >> shift;
    return b;
}

}  // namespace

Constellation::Constellation(Modulation m)
    : modulation_(m), bits_(ncofdm::bits_per_symbol(m)), levels_(1 << (ncofdm::bits_per_symbol(m) / 2))
{
    // Mean energy of the L-level PAM alphabet {+-1, +-3, ...} is (L^2-1)/3 per axis.
    scale_ = std::sqrt(2.0 * (levels_ * levels_ - 1) / 3.0);
    axis_amplitude_.resize(levels_);
    for (int g = 0; g < levels_; ++g) {
        const int idx = static_cast<int>(gray_decode(static_cast<unsigned>(g)));
        axis_amplitude_[g] = (levels_ - 1 - 2 * idx) / scale_;
    }
    const int half = bits_ / 2;
    points_.resize(static_cast<std::size_t>(order()));
    for (unsigned label = 0; label < points_.size(); ++label) {
        const unsigned gi = label >> half;
        const unsigned gq = label & ((1u << half) - 1);
        points_[label] = {axis_amplitude_[gi], axis_amplitude_[gq]};
    }
}

unsigned Constellation::decide_axis(double x) const
{
    unsigned best = 0;
    double best_d = std::abs(x - axis_amplitude_[0]);
    for (int g = 1; g < levels_; ++g) {
        const double d = std::abs(x - axis_amplitude_[g]);
        // Labels are visited in increasing order, so a tie keeps the smaller one.
        if (d < best_d - 1e-12 * (1.0 + best_d)) {
            best = static_cast<unsigned>(g);
            best_d = d;
        }
    }
    return best;
}

unsigned Constellation::decide(cplx z) const
{
    const int half = bits_ / 2;
    return (decide_axis(z.real()) << half) | decide_axis(z.imag());
}

const Constellation& constellation(Modulation m)
{
    static const Constellation qpsk(Modulation::Qpsk);
    static const Constellation qam16(Modulation::Qam16);
    static const Constellation qam64(Modulation::Qam64);
    switch (m) {
    case Modulation::Qpsk:
        return qpsk;
    case Modulation::Qam16:
        return qam16;
    case Modulation::Qam64:
        return qam64;
    }
    return qam16;
}

FreqSymbol qam_map(const std::vector<std::uint8_t>& bits, const SystemConfig& cfg)
{
    const Constellation& c = constellation(cfg.modulation());
    const int b = c.bits_per_symbol();
    if (bits.size() != static_cast<std::size_t>(cfg.K()) * b)
        throw ConfigError("qam_map: expected " + std::to_string(cfg.K() * b) + " bits, got " +
                          std::to_string(bits.size()));
    FreqSymbol out{CVector(cfg.K())};
    for (int m = 0; m < cfg.K(); ++m) {
        unsigned label = 0;
        for (int i = 0; i < b; ++i)
            label = (label << 1) | (bits[static_cast<std::size_t>(m) * b + i] & 1u);
        out.values[m] = c.point(label);
    }
    return out;
}

std::vector<std::uint8_t> qam_demap(const FreqSymbol& symbol, const SystemConfig& cfg)
{
    const Constellation& c = constellation(cfg.modulation());
    const int b = c.bits_per_symbol();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbol.values.size()) * b);
    for (Eigen::Index m = 0; m < symbol.values.size(); ++m) {
        const unsigned label = c.decide(symbol.values[m]);
        for (int i = 0; i < b; ++i)
            bits[static_cast<std::size_t>(m) * b + i] =
                static_cast<std::uint8_t>((label >> (b - 1 - i)) & 1u);
    }
    return bits;
}

}  // namespace ncofdm
