#include "ncofdm/transmitter.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace ncofdm {

double SampleStream::mean_power() const
{
    if (samples.empty())
        return 0.0;
    double acc = 0.0;
    for (const cplx& s : samples)
        acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

Modulator::Modulator(const SystemConfig& cfg)
    : cfg_(cfg), fft_(cfg.N()), spectrum_(static_cast<std::size_t>(cfg.N()))
{
}

void Modulator::modulate_body(const CVector& X, std::span<cplx> out)
{
    if (X.size() != cfg_.K())
        throw ConfigError("frequency symbol length does not match K");
    std::fill(spectrum_.begin(), spectrum_.end(), cplx{});
    const auto& idx = cfg_.subcarriers();
    for (int m = 0; m < cfg_.K(); ++m)
        spectrum_[cfg_.bin(idx[m])] = X[m];
    fft_.backward(spectrum_, out);
    const double inv_n = 1.0 / cfg_.N();
    for (cplx& v : out)
        v *= inv_n;
}

TimeSymbol Modulator::modulate(const FreqSymbol& X)
{
    const int N = cfg_.N();
    const int N_cp = cfg_.N_cp();
    TimeSymbol y{CVector(N_cp + N), N_cp};
    std::span<cplx> all(y.samples.data(), static_cast<std::size_t>(N_cp + N));
    modulate_body(X.values, all.subspan(N_cp));
    for (int n = 0; n < N_cp; ++n)
        all[n] = all[N + n];
    return y;
}

PayloadSource::PayloadSource(const SystemConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed)
{
}

Payload PayloadSource::next(std::size_t count)
{
    const std::size_t per = static_cast<std::size_t>(cfg_.bits_per_ofdm_symbol());
    Payload p;
    p.bits.resize(count * per);
    for (auto& b : p.bits)
        b = static_cast<std::uint8_t>(rng_() >> 63);
    p.symbols.reserve(count);
    std::vector<std::uint8_t> chunk(per);
    for (std::size_t i = 0; i < count; ++i) {
        std::copy_n(p.bits.begin() + static_cast<std::ptrdiff_t>(i * per), per, chunk.begin());
        p.symbols.push_back(qam_map(chunk, cfg_));
    }
    return p;
}

Payload random_payload(const SystemConfig& cfg, std::size_t count, std::uint64_t seed)
{
    return PayloadSource(cfg, seed).next(count);
}

SampleStream modulate_stream(std::span<const FreqSymbol> symbols, const SystemConfig& cfg)
{
    if (symbols.empty())
        throw ConfigError("modulate_stream: no symbols");
    Modulator mod(cfg);
    SampleStream s;
    s.frame_len = cfg.frame_len();
    s.symbol_count = symbols.size();
    s.samples.reserve(symbols.size() * static_cast<std::size_t>(s.frame_len));
    for (const auto& X : symbols) {
        const TimeSymbol t = mod.modulate(X);
        s.samples.insert(s.samples.end(), t.samples.data(), t.samples.data() + t.samples.size());
    }
    return s;
}

TimeSymbol idft_modulate(const FreqSymbol& X, const SystemConfig& cfg)
{
    Modulator mod(cfg);
    return mod.modulate(X);
}

SampleStream assemble_stream(std::span<const TimeSymbol> symbols)
{
    SampleStream out;
    if (symbols.empty())
        return out;
    const auto len = symbols.front().samples.size();
    for (const TimeSymbol& s : symbols)
        if (s.samples.size() != len)
            throw ConfigError("assemble_stream: symbols have different frame lengths");
    out.frame_len = static_cast<int>(len);
    out.symbol_count = symbols.size();
    out.samples.reserve(len * symbols.size());
    for (const TimeSymbol& s : symbols)
        out.samples.insert(out.samples.end(), s.samples.data(), s.samples.data() + len);
    return out;
}

static_assert(std::endian::native == std::endian::little,
              "IQ dump writer assumes a little-endian host");

void write_iq_dump(const SampleStream& stream, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(stream.samples.data()),
             static_cast<std::streamsize>(stream.samples.size() * sizeof(cplx)));
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

SampleStream read_iq_dump(const std::filesystem::path& path, int frame_len)
{
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    const auto bytes = static_cast<std::size_t>(is.tellg());
    if (frame_len <= 0 || bytes % (sizeof(cplx) * frame_len) != 0)
        throw ConfigError("IQ dump size is not a whole number of frames");
    SampleStream s;
    s.frame_len = frame_len;
    s.samples.resize(bytes / sizeof(cplx));
    s.symbol_count = s.samples.size() / frame_len;
    is.seekg(0);
    is.read(reinterpret_cast<char*>(s.samples.data()), static_cast<std::streamsize>(bytes));
    return s;
}

}  // namespace ncofdm
