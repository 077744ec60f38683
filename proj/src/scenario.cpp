#include "ncofdm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ncofdm/channel.hpp"
#include "ncofdm/complexity.hpp"
#include "ncofdm/fd_precoder.hpp"
#include "ncofdm/spectrum.hpp"
#include "ncofdm/td_smoother.hpp"
#include "ncofdm/transmitter.hpp"

namespace ncofdm {

using nlohmann::json;

namespace {

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

template <typename T>
T get_value(const json& j, const std::string& key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("scenario key '" + key + "' has the wrong type");
    }
}

std::vector<int> default_orders(const std::string& kind)
{
    if (kind == "equivalence")
        return {2};
    if (kind == "sinr")
        return {2, 4};
    return {0, 2, 4};
}

std::vector<double> default_ebno(const std::string& kind)
{
    std::vector<double> grid;
    for (int e = 0; e <= 30; e += 5)
        grid.push_back(e);
    if (kind == "sinr")
        grid.push_back(40.0);
    return grid;
}

class ArtifactWriter {
public:
    ArtifactWriter(const Scenario& sc, const RunOptions& opt)
        : sc_(sc), opt_(opt)
    {
        std::error_code ec;
        std::filesystem::create_directories(opt.out_dir, ec);
        if (ec)
            throw OutputError("cannot create output directory " + opt.out_dir.string() + ": " +
                              ec.message());
        report_.csv = opt.out_dir / (sc.kind + ".csv");
        report_.json = opt.out_dir / (sc.kind + ".json");
        csv_.open(report_.csv, std::ios::binary | std::ios::trunc);
        if (!csv_)
            throw OutputError("cannot write " + report_.csv.string());
        csv_ << "# git: " << opt.git_describe << "\n";
        csv_ << "# scenario: " << sc.to_json().dump() << "\n";
        csv_ << "# seed: " << sc.seed << "\n";
    }

    std::ostream& csv() { return csv_; }

    RunReport finish(json summary)
    {
        csv_.flush();
        if (!csv_)
            throw OutputError("write failed for " + report_.csv.string());
        json doc;
        doc["git"] = opt_.git_describe;
        doc["scenario"] = sc_.to_json();
        doc["seed"] = sc_.seed;
        doc["summary"] = summary;
        std::ofstream js(report_.json, std::ios::binary | std::ios::trunc);
        if (!js)
            throw OutputError("cannot write " + report_.json.string());
        js << doc.dump(2) << "\n";
        if (!js)
            throw OutputError("write failed for " + report_.json.string());
        report_.summary = std::move(summary);
        return report_;
    }

private:
    const Scenario& sc_;
    const RunOptions& opt_;
    RunReport report_;
    std::ofstream csv_;
};

// Splits the symbol budget into blocks.
template <typename F>
void for_each_block(const Scenario& sc, F&& f)
{
    for (std::size_t first = 0; first < sc.symbols; first += sc.block_symbols)
        f(first, std::min(sc.block_symbols, sc.symbols - first));
}

SampleStream to_stream(const std::vector<TimeSymbol>& symbols)
{
    return assemble_stream(symbols);
}

RunReport run_equivalence(const Scenario& sc, ArtifactWriter& out)
{
    out.csv() << "V,symbols,max_abs_dev,max_rel_dev,pass\n";
    json summary = json::array();
    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        PayloadSource source(cfg, sc.seed);
        FdPrecoder fd(cfg);
        Modulator mod(cfg);
        TdSmoother td(cfg);
        double max_dev = 0.0, max_ref = 0.0;
        for_each_block(sc, [&](std::size_t, std::size_t count) {
            const Payload p = source.next(count);
            for (const auto& X : p.symbols) {
                const TimeSymbol a = mod.modulate(fd.step(X));
                const TimeSymbol b = td.process(X);
                max_dev = std::max(max_dev, (a.samples - b.samples).cwiseAbs().maxCoeff());
                max_ref = std::max(max_ref, a.samples.cwiseAbs().maxCoeff());
            }
        });
        const double rel = max_ref > 0.0 ? max_dev / max_ref : max_dev;
        const bool pass = rel < sc.tolerance;
        out.csv() << V << "," << sc.symbols << "," << num(max_dev) << "," << num(rel) << ","
                  << (pass ? "true" : "false") << "\n";
        summary.push_back({{"V", V}, {"max_abs_dev", max_dev}, {"max_rel_dev", rel},
                           {"tolerance", sc.tolerance}, {"pass", pass}});
    }
    return out.finish({{"equivalence", summary}});
}

RunReport run_continuity(const Scenario& sc, ArtifactWriter& out)
{
    out.csv() << "V,junction,order,residual_abs,residual_scaled\n";
    json summary = json::array();
    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        const std::vector<double> scale = derivative_scale(cfg, V);
        PayloadSource source(cfg, sc.seed);
        TdSmoother td(cfg);
        std::vector<double> worst(static_cast<std::size_t>(V) + 1, 0.0);
        std::vector<FreqSymbol> window;
        std::size_t junction = 0;
        for_each_block(sc, [&](std::size_t, std::size_t count) {
            const Payload p = source.next(count);
            for (const auto& X : p.symbols) {
                TimeSymbol plain;
                CVector b;
                td.process(X, plain, b);
                window.push_back(FreqSymbol{X.values + smooth_spectrum(b, cfg)});
            }
            const CMatrix r = continuity_residuals(window, cfg, V);
            for (Eigen::Index i = 0; i < r.rows(); ++i, ++junction) {
                for (int v = 0; v <= V; ++v) {
                    const double a = std::abs(r(i, v));
                    worst[v] = std::max(worst[v], a / scale[v]);
                    out.csv() << V << "," << junction << "," << v << "," << num(a) << ","
                              << num(a / scale[v]) << "\n";
                }
            }
            window.erase(window.begin(), window.end() - 1);
        });
        json orders = json::array();
        for (int v = 0; v <= V; ++v)
            orders.push_back({{"order", v}, {"max_scaled_residual", worst[v]},
                              {"derivative_scale", scale[v]}});
        summary.push_back({{"V", V},
                           {"junctions", junction},
                           {"max_scaled_residual", *std::max_element(worst.begin(), worst.end())},
                           {"orders", orders}});
    }
    return out.finish({{"continuity", summary}});
}

RunReport run_complexity(const Scenario& sc, ArtifactWriter& out)
{
    struct TableCell {
        Scheme scheme;
        int V;
        std::int64_t mults, adds;
    };
    // Reference values for K = 256, N = 2048.
    static const TableCell table[] = {
        {Scheme::NcOfdm, -1, 524288, 523776},
        {Scheme::TdNcOfdm, 0, 8196, 8196},
        {Scheme::TdNcOfdm, 2, 28732, 28722},
        {Scheme::TdNcOfdm, 4, 49332, 49314},
    };
    const bool table_applies = sc.K == 256 && sc.N == 2048;

    write_complexity_csv_header(out.csv());
    json rows = json::array();
    json discrepancies = json::array();
    auto compare = [&](const OpCount& c) {
        json row = {{"scheme", scheme_name(c.scheme)}, {"K", c.K}, {"N", c.N}, {"V", c.V},
                    {"mults", c.real_mults}, {"adds", c.real_adds}};
        if (!table_applies)
            return row;
        for (const auto& t : table) {
            if (t.scheme != c.scheme || (t.scheme == Scheme::TdNcOfdm && t.V != c.V))
                continue;
            row["table_mults"] = t.mults;
            row["table_adds"] = t.adds;
            row["mults_match"] = t.mults == c.real_mults;
            row["adds_match"] = t.adds == c.real_adds;
            if (t.mults != c.real_mults || t.adds != c.real_adds)
                discrepancies.push_back(
                    {{"scheme", scheme_name(c.scheme)}, {"V", c.V},
                     {"formula_mults", c.real_mults}, {"table_mults", t.mults},
                     {"formula_adds", c.real_adds}, {"table_adds", t.adds}});
        }
        return row;
    };

    const OpCount nc = closed_form_counts(Scheme::NcOfdm, sc.K, sc.N, 0);
    write_complexity_csv_row(out.csv(), nc, 1.0);
    rows.push_back(compare(nc));
    for (int V : sc.V_list) {
        const OpCount td = closed_form_counts(Scheme::TdNcOfdm, sc.K, sc.N, V);
        const ComplexityRatio r = complexity_ratio(sc.K, sc.N, V);
        write_complexity_csv_row(out.csv(), td, r.mults);
        json row = compare(td);
        row["ratio_mults"] = r.mults;
        row["ratio_adds"] = r.adds;
        rows.push_back(row);
    }
    return out.finish({{"counts", rows}, {"table_discrepancies", discrepancies}});
}

void write_psd_rows(std::ostream& os, const std::string& variant, int V, const PsdEstimate& p)
{
    char line[96];
    for (std::size_t i = 0; i < p.freqs.size(); ++i) {
        std::snprintf(line, sizeof line, "%s,%d,%.6f,%.6f\n", variant.c_str(), V, p.freqs[i],
                      p.psd_db[i]);
        os << line;
    }
}

RunReport run_psd(const Scenario& sc, ArtifactWriter& out)
{
    const WelchOptions wopt{sc.welch_segment, sc.welch_overlap};
    const SystemConfig cfg0 = sc.config(0);
    const std::size_t draws = std::min(sc.analytic_draws, sc.symbols);

    WelchAccumulator plain_acc(cfg0.sample_rate(), wopt);
    std::vector<CVector> plain_draws;
    {
        PayloadSource source(cfg0, sc.seed);
        for_each_block(sc, [&](std::size_t, std::size_t count) {
            const Payload p = source.next(count);
            plain_acc.push(modulate_stream(p.symbols, cfg0).samples);
            for (const auto& X : p.symbols)
                if (plain_draws.size() < draws)
                    plain_draws.push_back(X.values);
        });
    }
    const PsdEstimate plain = plain_acc.result(cfg0);
    const PsdEstimate plain_model = analytical_psd_rect(plain.freqs, cfg0, plain_draws);

    out.csv() << "variant,V,freq_hz,psd_db\n";
    write_psd_rows(out.csv(), "plain-welch", -1, plain);
    write_psd_rows(out.csv(), "plain-model", -1, plain_model);

    auto fit = [&](const PsdEstimate& p) {
        const DecayFit f = estimate_decay_exponent(p, sc.fit_lo_hz, sc.fit_hi_hz);
        return json{{"exponent", f.exponent}, {"std_error", f.std_error}, {"points", f.points}};
    };
    const double plain_level = plain.level_db(sc.measure_hz, sc.measure_half_width_hz);
    json summary;
    summary["measure_hz"] = sc.measure_hz;
    summary["fit_band_hz"] = {sc.fit_lo_hz, sc.fit_hi_hz};
    summary["plain"] = {{"level_db", plain_level},
                        {"model_level_db",
                         plain_model.level_db(sc.measure_hz, sc.measure_half_width_hz)},
                        {"decay", fit(plain)},
                        {"segments", plain.segment_count}};
    json smoothed = json::array();

    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        PayloadSource source(cfg, sc.seed);
        TdSmoother td(cfg);
        FdPrecoder fd(cfg);
        WelchAccumulator td_acc(cfg.sample_rate(), wopt), fd_acc(cfg.sample_rate(), wopt);
        std::vector<SmoothedSymbol> ensemble;
        std::size_t index = 0;
        for_each_block(sc, [&](std::size_t, std::size_t count) {
            const Payload p = source.next(count);
            std::vector<TimeSymbol> td_syms;
            std::vector<FreqSymbol> fd_syms;
            td_syms.reserve(count);
            fd_syms.reserve(count);
            for (const auto& X : p.symbols) {
                TimeSymbol plain_sym;
                CVector b;
                td_syms.push_back(td.process(X, plain_sym, b));
                fd_syms.push_back(fd.step(X));
                // The first symbol carries no smooth signal; keep it out of the model.
                if (index++ > 0 && ensemble.size() < draws)
                    ensemble.push_back({X.values, smooth_spectrum(b, cfg)});
            }
            td_acc.push(to_stream(td_syms).samples);
            fd_acc.push(modulate_stream(fd_syms, cfg).samples);
        });
        const PsdEstimate tdp = td_acc.result(cfg);
        const PsdEstimate fdp = fd_acc.result(cfg);
        write_psd_rows(out.csv(), "td-welch", V, tdp);
        write_psd_rows(out.csv(), "fd-welch", V, fdp);

        json entry = {{"V", V}};
        const double level = tdp.level_db(sc.measure_hz, sc.measure_half_width_hz);
        entry["td_level_db"] = level;
        entry["fd_level_db"] = fdp.level_db(sc.measure_hz, sc.measure_half_width_hz);
        entry["improvement_db"] = plain_level - level;
        entry["decay"] = fit(tdp);
        entry["decay_bound"] = 2 * V + 2;
        if (!ensemble.empty()) {
            const PsdEstimate model = analytical_psd_smoothed(tdp.freqs, cfg, ensemble);
            write_psd_rows(out.csv(), "td-model", V, model);
            entry["model_level_db"] = model.level_db(sc.measure_hz, sc.measure_half_width_hz);
        }
        smoothed.push_back(entry);
    }
    summary["smoothed"] = smoothed;
    return out.finish(summary);
}

ChannelRealization make_channel(const Scenario& sc, const SystemConfig& cfg)
{
    if (sc.channel == "awgn")
        return identity_channel(sc.symbols);
    return generate_eva_taps(cfg, sc.doppler_hz, sc.symbols, sc.seed + 1);
}

RunReport run_ber(const Scenario& sc, ArtifactWriter& out)
{
    const SystemConfig cfg0 = sc.config(0);
    const ChannelRealization ch = make_channel(sc, cfg0);
    const std::uint64_t noise_seed = sc.seed + 2;

    struct Variant {
        std::string name;
        int V;
        SystemConfig cfg;
        BerCounter counter;
    };
    std::vector<Variant> variants;
    variants.push_back({"plain", -1, cfg0, BerCounter(ch, cfg0, sc.ebno_db, noise_seed)});
    std::vector<TdSmoother> tds;
    std::vector<FdPrecoder> fds;
    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        variants.push_back({"td", V, cfg, BerCounter(ch, cfg, sc.ebno_db, noise_seed)});
        tds.emplace_back(cfg);
    }
    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        variants.push_back({"fd", V, cfg, BerCounter(ch, cfg, sc.ebno_db, noise_seed)});
        fds.emplace_back(cfg);
    }

    PayloadSource source(cfg0, sc.seed);
    const std::size_t nV = sc.V_list.size();
    for_each_block(sc, [&](std::size_t, std::size_t count) {
        const Payload p = source.next(count);
        variants[0].counter.push(modulate_stream(p.symbols, cfg0), p.bits);
        for (std::size_t v = 0; v < nV; ++v) {
            std::vector<TimeSymbol> syms;
            syms.reserve(count);
            for (const auto& X : p.symbols)
                syms.push_back(tds[v].process(X));
            variants[1 + v].counter.push(to_stream(syms), p.bits);

            std::vector<FreqSymbol> pre;
            pre.reserve(count);
            for (const auto& X : p.symbols)
                pre.push_back(fds[v].step(X));
            variants[1 + nV + v].counter.push(modulate_stream(pre, variants[1 + nV + v].cfg),
                                              p.bits);
        }
    });

    out.csv() << "variant,V,ebno_db,ber,errors,trials,ci_low,ci_high\n";
    for (const auto& var : variants) {
        for (const BerPoint& pt : var.counter.points()) {
            const auto [lo, hi] = wilson_interval(pt);
            out.csv() << var.name << "," << var.V << "," << num(pt.ebno_db) << "," << num(pt.ber())
                      << "," << pt.errors << "," << pt.bits << "," << num(lo) << "," << num(hi)
                      << "\n";
        }
    }

    // Ordering chain: plain, then td variants in the order given (sorted by V).
    std::vector<std::size_t> chain = {0};
    std::vector<std::size_t> td_idx(nV);
    for (std::size_t v = 0; v < nV; ++v)
        td_idx[v] = 1 + v;
    std::sort(td_idx.begin(), td_idx.end(),
              [&](std::size_t a, std::size_t b) { return variants[a].V < variants[b].V; });
    chain.insert(chain.end(), td_idx.begin(), td_idx.end());

    json ordering = json::array();
    bool ordered = true;
    for (std::size_t j = 0; j < sc.ebno_db.size(); ++j) {
        for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
            const auto& a = variants[chain[c]];
            const auto& b = variants[chain[c + 1]];
            const BerComparison cmp = compare_ber(a.counter.points()[j], b.counter.points()[j]);
            ordered = ordered && !cmp.violated;
            ordering.push_back({{"ebno_db", sc.ebno_db[j]}, {"lower", a.name + "(" + std::to_string(a.V) + ")"},
                                {"higher", b.name + "(" + std::to_string(b.V) + ")"},
                                {"z", cmp.z}, {"violated", cmp.violated}});
        }
    }
    json identical = json::array();
    bool all_identical = true;
    for (std::size_t v = 0; v < nV; ++v) {
        const auto& a = variants[1 + v].counter.points();
        const auto& b = variants[1 + nV + v].counter.points();
        bool same = true;
        for (std::size_t j = 0; j < a.size(); ++j)
            same = same && a[j].errors == b[j].errors;
        all_identical = all_identical && same;
        identical.push_back({{"V", sc.V_list[v]}, {"fd_td_identical", same}});
    }
    return out.finish({{"channel", sc.channel},
                       {"ordering", ordering},
                       {"ordering_holds", ordered},
                       {"fd_td", identical},
                       {"fd_td_identical", all_identical}});
}

RunReport run_sinr(const Scenario& sc, ArtifactWriter& out)
{
    const SystemConfig cfg0 = sc.config(0);
    const ChannelRealization ch = make_channel(sc, cfg0);
    out.csv() << "ebno_db,sinr_meas_db,sinr_theory_db,V\n";
    json summary = json::array();
    for (int V : sc.V_list) {
        const SystemConfig cfg = sc.config(V);
        PayloadSource source(cfg, sc.seed);
        TdSmoother td(cfg);
        SinrMeter meter(ch, cfg, sc.seed + 2);
        for_each_block(sc, [&](std::size_t, std::size_t count) {
            const Payload p = source.next(count);
            std::vector<TimeSymbol> data, smooth;
            data.reserve(count);
            smooth.reserve(count);
            for (const auto& X : p.symbols) {
                TimeSymbol plain;
                CVector b;
                TimeSymbol s = td.process(X, plain, b);
                s.samples -= plain.samples;
                data.push_back(std::move(plain));
                smooth.push_back(std::move(s));
            }
            meter.push(to_stream(data), to_stream(smooth));
        });
        double worst = 0.0;
        for (double e : sc.ebno_db) {
            const SinrRecord r = meter.record(e);
            worst = std::max(worst, std::abs(r.measured_sinr_db - r.closed_form_sinr_db));
            out.csv() << num(e) << "," << num(r.measured_sinr_db) << ","
                      << num(r.closed_form_sinr_db) << "," << V << "\n";
        }
        const SinrRecord high = meter.record(40.0);
        summary.push_back({{"V", V},
                           {"max_abs_deviation_db", worst},
                           {"sinr_at_40db", high.measured_sinr_db},
                           {"saturation_db", 10.0 * std::log10(cfg.K() / (2.0 * (V + 1)))},
                           {"channel_gain", meter.channel_gain()},
                           {"data_energy", meter.data_energy()},
                           {"smooth_energy", meter.smooth_energy()}});
    }
    return out.finish({{"channel", sc.channel}, {"sinr", summary}});
}

}  // namespace

const std::vector<std::string>& scenario_kinds()
{
    static const std::vector<std::string> kinds = {"psd",        "ber",        "sinr",
                                                   "equivalence", "complexity", "continuity"};
    return kinds;
}

SystemConfig Scenario::config(int V) const
{
    if (subcarriers.empty())
        return build_system_config(K, N, N_cp, V, modulation, delta_f);
    return build_system_config(subcarriers, N, N_cp, V, modulation, delta_f);
}

json Scenario::to_json() const
{
    json j;
    j["kind"] = kind;
    j["K"] = K;
    j["N"] = N;
    j["N_cp"] = N_cp;
    j["V"] = V_list;
    j["modulation"] = modulation_name(modulation);
    j["delta_f"] = delta_f;
    if (!subcarriers.empty())
        j["subcarriers"] = subcarriers;
    j["symbols"] = symbols;
    j["block_symbols"] = block_symbols;
    j["seed"] = seed;
    if (kind == "ber" || kind == "sinr") {
        j["ebno_db"] = ebno_db;
        j["channel"] = channel;
        j["doppler_hz"] = doppler_hz;
    }
    if (kind == "psd") {
        j["welch_segment"] = welch_segment;
        j["welch_overlap"] = welch_overlap;
        j["measure_hz"] = measure_hz;
        j["measure_half_width_hz"] = measure_half_width_hz;
        j["fit_lo_hz"] = fit_lo_hz;
        j["fit_hi_hz"] = fit_hi_hz;
        j["analytic_draws"] = analytic_draws;
    }
    if (kind == "equivalence")
        j["tolerance"] = tolerance;
    return j;
}

Scenario parse_scenario(std::string_view kind, const json& j)
{
    const auto& kinds = scenario_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("unknown scenario kind '" + std::string(kind) + "'");
    if (!j.is_object())
        throw ConfigError("scenario must be a JSON object");

    static const std::vector<std::string> known = {
        "K", "N", "N_cp", "V", "modulation", "delta_f", "subcarriers", "symbols",
        "block_symbols", "seed", "ebno_db", "channel", "doppler_hz", "welch_segment",
        "welch_overlap", "measure_hz", "measure_half_width_hz", "fit_lo_hz", "fit_hi_hz",
        "analytic_draws", "tolerance", "kind"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown scenario key '" + key + "'");

    Scenario sc;
    sc.kind = std::string(kind);
    if (j.contains("kind") && get_value<std::string>(j, "kind") != sc.kind)
        throw ConfigError("scenario kind does not match the subcommand");

    auto read_int = [&](const char* key, int& dst) {
        if (j.contains(key))
            dst = get_value<int>(j, key);
    };
    auto read_double = [&](const char* key, double& dst) {
        if (j.contains(key))
            dst = get_value<double>(j, key);
    };
    auto read_count = [&](const char* key, std::size_t& dst) {
        if (!j.contains(key))
            return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(std::string("scenario key '") + key +
                              "' must be a non-negative integer");
        dst = v.get<std::size_t>();
    };

    read_int("K", sc.K);
    read_int("N", sc.N);
    read_int("N_cp", sc.N_cp);
    read_double("delta_f", sc.delta_f);
    read_count("symbols", sc.symbols);
    read_count("block_symbols", sc.block_symbols);
    read_count("analytic_draws", sc.analytic_draws);
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError("scenario key 'seed' must be an unsigned integer");
        sc.seed = v.get<std::uint64_t>();
    }
    if (j.contains("modulation"))
        sc.modulation = parse_modulation(get_value<std::string>(j, "modulation"));
    if (j.contains("subcarriers"))
        sc.subcarriers = get_value<std::vector<int>>(j, "subcarriers");
    if (j.contains("V")) {
        const auto& v = j.at("V");
        sc.V_list = v.is_array() ? get_value<std::vector<int>>(j, "V")
                                 : std::vector<int>{get_value<int>(j, "V")};
    } else {
        sc.V_list = default_orders(sc.kind);
    }
    sc.ebno_db = j.contains("ebno_db") ? get_value<std::vector<double>>(j, "ebno_db")
                                       : default_ebno(sc.kind);
    if (j.contains("channel"))
        sc.channel = get_value<std::string>(j, "channel");
    read_double("doppler_hz", sc.doppler_hz);
    read_int("welch_segment", sc.welch_segment);
    read_int("welch_overlap", sc.welch_overlap);
    read_double("measure_hz", sc.measure_hz);
    read_double("measure_half_width_hz", sc.measure_half_width_hz);
    read_double("fit_lo_hz", sc.fit_lo_hz);
    read_double("fit_hi_hz", sc.fit_hi_hz);
    read_double("tolerance", sc.tolerance);

    if (sc.symbols == 0)
        throw ConfigError("symbol budget must be positive");
    if (sc.block_symbols == 0)
        throw ConfigError("block_symbols must be positive");
    if (sc.V_list.empty())
        throw ConfigError("at least one derivative order is required");
    if ((sc.kind == "ber" || sc.kind == "sinr") && sc.ebno_db.empty())
        throw ConfigError("ebno_db grid is empty");
    if (sc.channel != "eva" && sc.channel != "awgn")
        throw ConfigError("channel must be 'eva' or 'awgn'");
    if (!(sc.doppler_hz >= 0.0))
        throw ConfigError("doppler_hz must be non-negative");
    if (sc.kind == "psd") {
        if (sc.welch_segment <= 0 || sc.welch_overlap < 0 || sc.welch_overlap >= sc.welch_segment)
            throw ConfigError("invalid Welch segment / overlap");
        if (!(sc.measure_half_width_hz > 0.0))
            throw ConfigError("measure_half_width_hz must be positive");
        if (!(sc.fit_lo_hz > 0.0) || !(sc.fit_hi_hz > sc.fit_lo_hz))
            throw ConfigError("decay fit band must satisfy 0 < fit_lo_hz < fit_hi_hz");
    }
    if (!(sc.tolerance > 0.0))
        throw ConfigError("tolerance must be positive");
    for (int V : sc.V_list)
        (void)sc.config(V);  // validates the waveform parameters
    return sc;
}

Scenario load_scenario(std::string_view kind, const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open scenario file " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed scenario file " + file.string() + ": " + e.what());
    }
    return parse_scenario(kind, j);
}

RunReport run_scenario(Scenario sc, const RunOptions& opt)
{
    if (opt.seed)
        sc.seed = *opt.seed;
    if (opt.paper_scale)
        sc.symbols = 100000;
    ArtifactWriter out(sc, opt);
    if (sc.kind == "equivalence")
        return run_equivalence(sc, out);
    if (sc.kind == "continuity")
        return run_continuity(sc, out);
    if (sc.kind == "complexity")
        return run_complexity(sc, out);
    if (sc.kind == "psd")
        return run_psd(sc, out);
    if (sc.kind == "ber")
        return run_ber(sc, out);
    if (sc.kind == "sinr")
        return run_sinr(sc, out);
    throw ConfigError("unknown scenario kind '" + sc.kind + "'");
}

}  // namespace ncofdm
