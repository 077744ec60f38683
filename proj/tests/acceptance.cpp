// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ncofdm/complexity.hpp"
#include "ncofdm/derivative_oracle.hpp"
#include "ncofdm/fd_precoder.hpp"
#include "ncofdm/scenario.hpp"
#include "ncofdm/td_smoother.hpp"
#include "ncofdm/transmitter.hpp"

using namespace ncofdm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail)
{
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

template <typename F>
void guarded(int id, const std::string& name, F&& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const fs::path kOut = fs::temp_directory_path() / "ncofdm_acceptance";

RunReport run_bundled(const std::string& kind)
{
    RunOptions opt;
    opt.out_dir = kOut;
    opt.git_describe = "acceptance";
    return run_scenario(load_scenario(kind, fs::path(NCOFDM_SCENARIO_DIR) / (kind + ".json")), opt);
}

void equivalence()
{
    struct Case {
        int K, N, N_cp, V;
    };
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::ostringstream detail;
    for (const Case c : {Case{8, 32, 4, 1}, Case{64, 256, 18, 2}, Case{256, 2048, 144, 2}}) {
        const SystemConfig cfg = build_system_config(c.K, c.N, c.N_cp, c.V);
        const Payload p = random_payload(cfg, 1000, 2024 + c.K);
        const SampleStream td = td_smooth_stream(p.symbols, cfg).stream;
        const SampleStream fd = modulate_stream(fd_precode_stream(p.symbols, cfg), cfg);
        double dev = 0.0, peak = 0.0;
        for (std::size_t n = 0; n < td.samples.size(); ++n) {
            dev = std::max(dev, std::abs(td.samples[n] - fd.samples[n]));
            peak = std::max(peak, std::abs(fd.samples[n]));
        }
        worst = std::max(worst, dev / peak);
        detail << "(" << c.K << "," << c.N << "," << c.V << ") " << fmt("%.2e", dev / peak) << "; ";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail << fmt("runtime %.1f s", secs);
    report(1, "equivalence", worst < 1e-8 && secs < 120.0, detail.str());
}

void continuity()
{
    std::ostringstream detail;
    bool pass = true;
    for (int V : {0, 2, 4}) {
        const SystemConfig cfg = build_system_config(256, 2048, 144, V);
        const Payload p = random_payload(cfg, 1000, 77 + V);
        const TdStreamResult td = td_smooth_stream(p.symbols, cfg);
        const double r = max_scaled_residual(composite_spectra(td.trace, cfg), cfg, V);
        pass = pass && r < 1e-9;
        detail << "V=" << V << " " << fmt("%.2e", r) << "; ";
    }
    report(2, "N-continuity", pass, detail.str());
}

CVector spectral_derivative(const CVector& X, const SystemConfig& cfg, int v)
{
    CVector out(cfg.N());
    for (int n = 0; n < cfg.N(); ++n)
        out[n] = evaluate_derivatives(X, n, v, cfg)[v];
    return out;
}

void derivative_oracle()
{
    double single = 0.0, dual = 0.0;
    const SystemConfig cfg = build_system_config(8, 32, 4, 0);
    const BasisSet basis = build_basis_set(cfg, 4);
    const Payload p = random_payload(cfg, 20, 3);
    for (const auto& X : p.symbols) {
        const NonOversampledGrid grid = downsample_to_grid(idft_modulate(X, cfg).body(), cfg);
        for (int v = 0; v <= 4; ++v) {
            const CVector d = cyclic_derivative(grid, basis, v) - spectral_derivative(X.values, cfg, v);
            single = std::max(single, d.cwiseAbs().maxCoeff());
        }
    }

    const std::vector<int> lo = {-8, -7, -6, -5}, hi = {4, 5, 6, 7};
    std::vector<int> both = lo;
    both.insert(both.end(), hi.begin(), hi.end());
    const SystemConfig c_lo = build_system_config(lo, 32, 4, 0);
    const SystemConfig c_hi = build_system_config(hi, 32, 4, 0);
    const SystemConfig c_all = build_system_config(both, 32, 4, 0);
    const BasisSet b_lo = build_basis_set(c_lo, 4), b_hi = build_basis_set(c_hi, 4);
    PayloadSource s_lo(c_lo, 5), s_hi(c_hi, 6);
    for (int trial = 0; trial < 20; ++trial) {
        const FreqSymbol a = s_lo.next(1).symbols[0], b = s_hi.next(1).symbols[0];
        CVector X(8);
        X << a.values, b.values;
        const NonOversampledGrid g_lo = downsample_to_grid(idft_modulate(a, c_lo).body(), c_lo);
        const NonOversampledGrid g_hi = downsample_to_grid(idft_modulate(b, c_hi).body(), c_hi);
        for (int v = 0; v <= 4; ++v) {
            const CVector d = cyclic_derivative(g_lo, b_lo, v) + cyclic_derivative(g_hi, b_hi, v) -
                              spectral_derivative(X, c_all, v);
            dual = std::max(dual, d.cwiseAbs().maxCoeff());
        }
    }
    report(3, "derivative oracle", single < 1e-10 && dual < 1e-10,
           fmt("single band %.2e", single) + fmt("; two subbands %.2e", dual));
}

void smooth_power()
{
    std::ostringstream detail;
    bool pass = true;
    for (int V : {0, 2, 4}) {
        const SystemConfig cfg = build_system_config(256, 2048, 144, V);
        PayloadSource src(cfg, 500 + V);
        TdSmoother sm(cfg);
        const std::size_t S = 100000;
        double w_energy = 0.0, y_energy = 0.0;
        for (std::size_t first = 0; first < S; first += 1000) {
            const Payload p = src.next(1000);
            for (const auto& X : p.symbols) {
                TimeSymbol plain;
                CVector b;
                const TimeSymbol s = sm.process(X, plain, b);
                w_energy += (s.body() - plain.body()).squaredNorm();
                y_energy += plain.body().squaredNorm();
            }
        }
        // The first symbol carries no smooth signal.
        const double w = w_energy / (S - 1);
        const double y = y_energy / S;
        const double w_ref = 2.0 * (V + 1) / cfg.N();
        const double r_ref = cfg.K() / (2.0 * (V + 1));
        const bool ok = std::abs(w / w_ref - 1.0) < 0.05 && std::abs((y / w) / r_ref - 1.0) < 0.05;
        pass = pass && ok;
        detail << "V=" << V << fmt(" E|w|^2/ref %.4f", w / w_ref) << fmt(" ratio/ref %.4f", (y / w) / r_ref)
               << "; ";
    }
    report(4, "smooth-signal power", pass, detail.str());
}

void psd_and_decay()
{
    const RunReport r = run_bundled("psd");
    const json& s = r.summary;
    const double plain_level = s["plain"]["level_db"];
    const double plain_exp = s["plain"]["decay"]["exponent"];
    double imp2 = 0.0, imp4 = 0.0;
    std::ostringstream decay;
    bool decay_ok = std::abs(plain_exp - 2.0) <= 0.3;
    decay << fmt("plain %.2f", plain_exp);
    for (const auto& e : s["smoothed"]) {
        const int V = e["V"];
        if (V == 2)
            imp2 = e["improvement_db"];
        if (V == 4)
            imp4 = e["improvement_db"];
        const double p = e["decay"]["exponent"];
        decay << "; V=" << V << fmt(" %.2f", p) << " (bound " << 2 * V + 2 << ")";
        if (V == 0 || V == 2)
            decay_ok = decay_ok && p >= 2.0 * V + 2.0;
    }
    report(5, "PSD suppression", imp2 >= 30.0 && imp4 >= 55.0,
           fmt("plain %.1f dB at 4 MHz", plain_level) + fmt("; V=2 improvement %.1f dB", imp2) +
               fmt("; V=4 improvement %.1f dB", imp4));
    report(6, "decay exponent", decay_ok, decay.str() + "; fit band 4-8 MHz");
}

void complexity()
{
    struct Row {
        Scheme s;
        int V;
        std::int64_t mults, adds;
    };
    const Row table[] = {{Scheme::NcOfdm, 0, 524288, 523776}, {Scheme::NcOfdm, 2, 524288, 523776},
                         {Scheme::NcOfdm, 4, 524288, 523776}, {Scheme::TdNcOfdm, 0, 8196, 8196},
                         {Scheme::TdNcOfdm, 2, 28732, 28722}, {Scheme::TdNcOfdm, 4, 49332, 49314}};
    bool pass = true;
    std::ostringstream detail;
    for (const Row& r : table) {
        const OpCount c = closed_form_counts(r.s, 256, 2048, r.V);
        pass = pass && c.real_mults == r.mults;
        const bool flagged = r.s == Scheme::TdNcOfdm && r.V == 0;
        if (c.real_adds != r.adds) {
            detail << "flagged: " << scheme_name(r.s) << " V=" << r.V << " adds formula "
                   << c.real_adds << " vs reference " << r.adds << "; ";
            pass = pass && flagged && c.real_adds == 8194;
        }
    }
    const double pct = 100.0 * complexity_ratio(256, 2048, 2).mults;
    pass = pass && std::abs(pct - 5.5) <= 0.1;
    detail << "all multiplications match; V=2 ratio " << fmt("%.3f%%", pct);
    report(7, "complexity", pass, detail.str());
}

void sinr()
{
    const RunReport r = run_bundled("sinr");
    bool pass = true;
    std::ostringstream detail;
    for (const auto& e : r.summary["sinr"]) {
        const int V = e["V"];
        const double dev = e["max_abs_deviation_db"];
        const double high = e["sinr_at_40db"];
        const double sat = e["saturation_db"];
        pass = pass && dev <= 0.5 && std::abs(high - sat) <= 0.3;
        detail << "V=" << V << fmt(" max dev %.2f dB", dev) << fmt(", 40 dB: %.2f", high)
               << fmt(" vs %.2f", sat) << "; ";
    }
    report(8, "SINR", pass, detail.str());
}

void ber()
{
    const RunReport r = run_bundled("ber");
    double min_z = INFINITY;
    for (const auto& o : r.summary["ordering"])
        min_z = std::min(min_z, o["z"].get<double>());
    const bool ordered = r.summary["ordering_holds"];
    const bool identical = r.summary["fd_td_identical"];
    report(9, "BER ordering", ordered && identical,
           std::string("ordering ") + (ordered ? "holds" : "violated") + fmt(" (min z %.2f)", min_z) +
               "; FD/TD error counts " + (identical ? "identical" : "differ"));
}

void projection()
{
    double idem = 0.0, trace = 0.0;
    for (int K : {8, 16, 64, 128, 256})
        for (int V = 0; V <= 4; ++V) {
            const PrecoderMatrices pm = build_P(build_system_config(K, 8 * K, K / 2 + K / 16, V));
            idem = std::max(idem, (pm.P * pm.P - pm.P).norm() / pm.P.norm());
            trace = std::max(trace, std::abs(pm.P.trace() - cplx(V + 1, 0.0)));
        }
    report(10, "projection algebra", idem < 1e-8 && trace < 1e-8,
           fmt("max |P^2-P|/|P| %.2e", idem) + fmt("; max |tr P - (V+1)| %.2e", trace));
}

}  // namespace

int main()
{
    fs::create_directories(kOut);
    guarded(1, "equivalence", equivalence);
    guarded(2, "N-continuity", continuity);
    guarded(3, "derivative oracle", derivative_oracle);
    guarded(4, "smooth-signal power", smooth_power);
    guarded(5, "PSD suppression / decay exponent", psd_and_decay);
    guarded(7, "complexity", complexity);
    guarded(8, "SINR", sinr);
    guarded(9, "BER ordering", ber);
    guarded(10, "projection algebra", projection);
    fs::remove_all(kOut);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
