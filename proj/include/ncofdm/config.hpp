#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ncofdm {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kJ{0.0, 1.0};

/// Raised for invalid parameters: bad configuration values, wrong vector
/// lengths, malformed inputs.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a linear system is too ill-conditioned to be trusted.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

enum class Modulation { Qpsk, Qam16, Qam64 };

Modulation parse_modulation(std::string_view name);
std::string modulation_name(Modulation m);
int bits_per_symbol(Modulation m);

/// Immutable waveform parameters shared by every stage of the chain.
///
/// Time is measured in samples of the oversampled grid: the useful symbol
/// body spans N samples, the cyclic prefix N_cp samples, and one sample lasts
/// 1/(N * delta_f) seconds.
class SystemConfig {
public:
    int K() const noexcept { return static_cast<int>(subcarriers_.size()); }
    int N() const noexcept { return N_; }
    int N_cp() const noexcept { return N_cp_; }
    int V() const noexcept { return V_; }
    int frame_len() const noexcept { return N_ + N_cp_; }
    double delta_f() const noexcept { return delta_f_; }
    Modulation modulation() const noexcept { return modulation_; }
    const std::vector<int>& subcarriers() const noexcept { return subcarriers_; }

    /// CP phase step, -2*pi*N_cp/N.
    double phi() const noexcept { return -2.0 * kPi * N_cp_ / N_; }
    double sample_rate() const noexcept { return N_ * delta_f_; }
    double symbol_duration() const noexcept { return 1.0 / delta_f_; }
    double cp_duration() const noexcept { return N_cp_ / sample_rate(); }
    int bits_per_ofdm_symbol() const noexcept { return K() * bits_per_symbol(modulation_); }

    /// FFT bin holding subcarrier index k (k may be negative).
    int bin(int k) const noexcept { return ((k % N_) + N_) % N_; }

    /// Same configuration with a different derivative order.
    SystemConfig with_order(int V) const;
    /// Same configuration restricted to another subcarrier set.
    SystemConfig with_subcarriers(std::vector<int> subcarriers) const;

    friend SystemConfig build_system_config(int, int, int, int, Modulation, double);
    friend SystemConfig build_system_config(std::vector<int>, int, int, int, Modulation,
                                            double);

private:
    SystemConfig() = default;

    int N_ = 0;
    int N_cp_ = 0;
    int V_ = 0;
    double delta_f_ = 15e3;
    Modulation modulation_ = Modulation::Qam16;
    std::vector<int> subcarriers_;
};

/// Contiguous band {-K/2, ..., K/2-1}.
SystemConfig build_system_config(int K, int N, int N_cp, int V,
                                 Modulation modulation = Modulation::Qam16,
                                 double delta_f = 15e3);

/// Arbitrary (possibly multi-subband) subcarrier set.
SystemConfig build_system_config(std::vector<int> subcarriers, int N, int N_cp, int V,
                                 Modulation modulation = Modulation::Qam16,
                                 double delta_f = 15e3);

/// Data symbols on the active subcarriers, ordered like
/// SystemConfig::subcarriers().
struct FreqSymbol {
    CVector values;

    static FreqSymbol zeros(const SystemConfig& cfg) { return {CVector::Zero(cfg.K())}; }
};

/// Samples of one transmitted symbol for n = -N_cp .. N-1, stored from
/// index 0 (n = -N_cp).
struct TimeSymbol {
    CVector samples;
    int N_cp = 0;

    cplx at(int n) const { return samples[n + N_cp]; }
    cplx& at(int n) { return samples[n + N_cp]; }
    /// Useful part n = 0 .. N-1.
    auto body() const { return samples.tail(samples.size() - N_cp); }
    int N() const { return static_cast<int>(samples.size()) - N_cp; }
};

/// Gray-coded square QAM with unit average symbol energy.
///
/// Bits are consumed MSB-first per symbol: the first half selects the
/// in-phase level, the second half the quadrature level. Within one axis
/// the Gray label g maps to level index gray_decode(g), and level index i
/// sits at amplitude (L - 1 - 2 i) / scale.
class Constellation {
public:
    explicit Constellation(Modulation m);

    Modulation modulation() const noexcept { return modulation_; }
    int bits_per_symbol() const noexcept { return bits_; }
    int order() const noexcept { return 1 << bits_; }
    /// Minimum distance between two points.
    double min_distance() const noexcept { return 2.0 / scale_; }

    cplx point(unsigned label) const { return points_.at(label); }
    const std::vector<cplx>& points() const noexcept { return points_; }

    /// Hard decision; on an exact tie the smaller label wins.
    unsigned decide(cplx z) const;

private:
    unsigned decide_axis(double x) const;

    Modulation modulation_;
    int bits_;
    int levels_;
    double scale_;
    std::vector<double> axis_amplitude_;  // indexed by per-axis Gray label
    std::vector<cplx> points_;            // indexed by symbol label
};

/// Shared immutable instance per modulation.
const Constellation& constellation(Modulation m);

/// Map K*log2(M) bits (one byte per bit, values 0/1) onto a frequency symbol.
FreqSymbol qam_map(const std::vector<std::uint8_t>& bits, const SystemConfig& cfg);
/// Minimum-distance hard demapping back to bits.
std::vector<std::uint8_t> qam_demap(const FreqSymbol& symbol, const SystemConfig& cfg);

}  // namespace ncofdm
