#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "ncofdm/config.hpp"
#include "ncofdm/fft.hpp"

namespace ncofdm {

/// Frame-aligned transmit signal: symbol i occupies
/// samples[i*frame_len, (i+1)*frame_len).
struct SampleStream {
    std::vector<cplx> samples;
    int frame_len = 0;
    std::size_t symbol_count = 0;

    std::span<const cplx> frame(std::size_t i) const
    {
        return std::span<const cplx>(samples).subspan(i * frame_len, frame_len);
    }
    std::span<cplx> frame(std::size_t i)
    {
        return std::span<cplx>(samples).subspan(i * frame_len, frame_len);
    }
    /// Mean |x|^2 per sample.
    double mean_power() const;
};

/// CP-OFDM modulator with the 1/N IDFT convention:
///   y(n) = (1/N) sum_{k in K0} X_k e^{j 2 pi k n / N},  n = -N_cp .. N-1.
class Modulator {
public:
    explicit Modulator(const SystemConfig& cfg);

    const SystemConfig& config() const noexcept { return cfg_; }

    TimeSymbol modulate(const FreqSymbol& X);
    /// Maps X onto an N-bin spectrum and inverse transforms it into out
    /// (body only, n = 0 .. N-1).
    void modulate_body(const CVector& X, std::span<cplx> out);

private:
    SystemConfig cfg_;
    Fft fft_;
    std::vector<cplx> spectrum_;
};

/// One-shot convenience wrapper around Modulator.
TimeSymbol idft_modulate(const FreqSymbol& X, const SystemConfig& cfg);

/// Concatenates equal-length symbols in order; no windowing, no overlap.
SampleStream assemble_stream(std::span<const TimeSymbol> symbols);

/// Uniform random bits and the QAM symbols they map to.
struct Payload {
    std::vector<std::uint8_t> bits;  // count * bits_per_ofdm_symbol
    std::vector<FreqSymbol> symbols;
};

/// Draws payload blocks from one generator; splitting a request into blocks
/// yields the same bits as a single request.
class PayloadSource {
public:
    PayloadSource(const SystemConfig& cfg, std::uint64_t seed);
    Payload next(std::size_t count);

private:
    SystemConfig cfg_;
    std::mt19937_64 rng_;
};

Payload random_payload(const SystemConfig& cfg, std::size_t count, std::uint64_t seed);

/// Plain CP-OFDM stream of the given symbols.
SampleStream modulate_stream(std::span<const FreqSymbol> symbols, const SystemConfig& cfg);

/// Interleaved little-endian float64 (re, im) dump of the whole stream.
void write_iq_dump(const SampleStream& stream, const std::filesystem::path& path);
SampleStream read_iq_dump(const std::filesystem::path& path, int frame_len);

}  // namespace ncofdm
