#include "qlink/config.hpp"
#include "qlink/converter.hpp"
#include "qlink/link_protocol.hpp"
#include "qlink/photonics.hpp"
#include "qlink/rng.hpp"
#include "qlink/spin_node.hpp"
#include "qlink/tradespace.hpp"
#include "qlink/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qlink;

namespace {

struct Ctx {
    ExperimentConfig cfg;
    fs::path out_dir;

    std::string provenance() const {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(cfg.hash()));
        return std::string(buf);
    }

    std::ofstream open_csv(const std::string& name) const {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + (out_dir / name).string());
        out << "# config_hash=" << provenance() << " seed=" << cfg.seed << "\n";
        return out;
    }

    void write_json(const std::string& name, json j) const {
        fs::create_directories(out_dir);
        j["config_hash"] = provenance();
        j["seed"] = cfg.seed;
        std::ofstream out(out_dir / name, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + (out_dir / name).string());
        out << j.dump(2) << "\n";
        std::cout << (out_dir / name).string() << "\n";
    }

    std::uint64_t run_seed(const std::string& label) const {
        return derive_seed(cfg.seed, label);
    }
};

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::AntiStokes: return "anti-stokes";
    case Regime::Stokes: return "stokes";
    case Regime::Boundary: return "boundary";
    }
    return "?";
}

const char* verdict_name(NoiseVerdict v) {
    switch (v) {
    case NoiseVerdict::LowNoise: return "low-noise";
    case NoiseVerdict::HighNoise: return "high-noise";
    case NoiseVerdict::Boundary: return "boundary";
    }
    return "?";
}

json scheme_to_json(const ConversionScheme& s, const std::vector<GainBand>& bands) {
    json j;
    j["memory_nm"] = s.memory_nm;
    j["target_nm"] = s.target_nm;
    j["pump_nm"] = s.pump_nm;
    j["regime"] = regime_name(s.regime);
    json stages = json::array();
    for (Regime r : s.stage_regimes)
        stages.push_back(regime_name(r));
    j["stage_regimes"] = stages;
    j["pump_target_separation_thz"] = s.pump_target_separation_thz;
    j["noise_verdict"] = verdict_name(s.noise_verdict);
    j["low_noise"] = s.low_noise;
    json hits = json::array();
    for (const GainBand& b : feasible_pumps(s, bands))
        hits.push_back(b.name);
    j["gain_band_hits"] = hits;
    return j;
}

void cmd_plan(const Ctx& ctx, const std::string& bands_file) {
    const auto& cfg = ctx.cfg;
    std::vector<GainBand> bands =
        bands_file.empty() ? cfg.gain_bands : load_gain_bands(bands_file);

    ConversionScheme scheme =
        cfg.pump1_nm > 0.0 ? plan_two_pump(cfg.memory_nm, cfg.target_nm, cfg.pump1_nm)
                           : plan_single_pump(cfg.memory_nm, cfg.target_nm);

    auto csv = ctx.open_csv("scheme.csv");
    csv << "memory_nm,target_nm,pump_index,pump_nm,stage_regime,separation_thz,"
           "noise_verdict,low_noise,gain_band_hits\n";
    const auto hits = feasible_pumps(scheme, bands);
    std::string hit_names;
    for (const auto& h : hits)
        hit_names += (hit_names.empty() ? "" : ";") + h.name;
    for (std::size_t i = 0; i < scheme.pump_nm.size(); ++i) {
        csv << scheme.memory_nm << "," << scheme.target_nm << "," << i << ","
            << scheme.pump_nm[i] << "," << regime_name(scheme.stage_regimes[i]) << ","
            << scheme.pump_target_separation_thz << "," << verdict_name(scheme.noise_verdict)
            << "," << (scheme.low_noise ? 1 : 0) << "," << hit_names << "\n";
    }
    ctx.write_json("scheme.json", scheme_to_json(scheme, bands));
}

void cmd_ppln(const Ctx& ctx, const std::string& which) {
    const ConverterModel& model =
        which == "up" ? ctx.cfg.upconverter : ctx.cfg.downconverter;

    auto csv = ctx.open_csv("ppln_" + which + "_efficiency.csv");
    csv << "pump_mw,eta_ext,noise_hz\n";
    for (int p = 0; p <= 300; ++p)
        csv << p << "," << external_efficiency(model, p) << "," << noise_rate_hz(model, p)
            << "\n";

    auto pm = ctx.open_csv("ppln_" + which + "_phasematch.csv");
    pm << "pump_nm,temp_c,transfer\n";
    const PhaseMatchCurve& curve = model.phase_match;
    for (int ti = -5; ti <= 5; ++ti) {
        const double temp = curve.ref_temp_c + ti;
        for (int li = -200; li <= 200; ++li) {
            const double lambda = curve.peak_pump_nm + li * 0.01;
            pm << lambda << "," << temp << "," << phase_match_transfer(curve, lambda, temp)
               << "\n";
        }
    }

    json j;
    j["optimal_pump_mw"] = optimal_pump_power_mw(model);
    j["max_efficiency"] = external_efficiency(model, optimal_pump_power_mw(model));
    j["noise_at_optimum_hz"] = noise_rate_hz(model, optimal_pump_power_mw(model));
    j["noise_spectral_density_hz_per_ghz"] =
        noise_spectral_density(model, optimal_pump_power_mw(model));
    ctx.write_json("ppln_" + which + "_summary.json", j);
}

void cmd_hbt(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    ConverterOperatingPoint op{cfg.downconverter, cfg.down_pump_mw};
    const EventStream stream = simulate_stream(cfg.source, op, cfg.channel_loss_db,
                                               cfg.detector, cfg.duration_s,
                                               ctx.run_seed("hbt.stream"));
    const auto [a, b] = split_balanced(stream, ctx.run_seed("hbt.splitter"));
    const CorrelationResult res =
        hbt_g2(a, b, cfg.source.trigger_period_ns(), cfg.source.window_ns);

    auto csv = ctx.open_csv("hbt_hist.csv");
    csv << "delay_bins,coincidences\n";
    for (std::size_t i = 0; i < res.delay_bins.size(); ++i)
        csv << res.delay_bins[i] << "," << res.coincidences[i] << "\n";

    json j;
    j["g2_zero"] = res.g2_zero;
    j["g2_zero_sigma"] = res.g2_zero_sigma;
    j["low_confidence"] = res.low_confidence;
    j["events"] = stream.size();
    ctx.write_json("hbt_summary.json", j);
}

void cmd_hom(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    HomOptions opts;
    opts.delay_line_loss_db = cfg.hom_delay_loss_db;
    opts.polarization_overlap = cfg.hom_polarization_overlap;
    opts.converter = ConverterOperatingPoint{cfg.downconverter, cfg.down_pump_mw};
    opts.channel_loss_db = cfg.channel_loss_db;
    opts.detector = cfg.detector;
    const HomResult res = hom_visibility(cfg.source, opts, cfg.duration_s, ctx.run_seed("hom"));

    json j;
    j["visibility"] = res.visibility;
    j["g2_parallel"] = res.g2_parallel;
    j["g2_perp"] = res.g2_perp;
    j["undefined"] = res.undefined;
    ctx.write_json("hom_summary.json", j);
}

void cmd_snr(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    ConverterOperatingPoint op{cfg.downconverter, cfg.down_pump_mw};
    const EventStream stream = simulate_stream(cfg.source, op, cfg.channel_loss_db,
                                               cfg.detector, cfg.duration_s,
                                               ctx.run_seed("snr.stream"));
    const SnrResult res =
        gated_snr(stream, cfg.source.trigger_period_ns(), cfg.detector.gate_window_ns);

    json j;
    j["snr"] = res.snr;
    j["infinite"] = res.infinite;
    j["in_gate_rate_hz"] = res.in_gate_rate_hz;
    j["out_gate_rate_hz"] = res.out_gate_rate_hz;
    ctx.write_json("snr_summary.json", j);
}

void cmd_readout(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    auto rng = make_rng(ctx.run_seed("readout"));
    constexpr int kTrials = 200000;
    std::vector<std::uint64_t> hist_up(120, 0), hist_down(120, 0);
    for (int i = 0; i < kTrials; ++i) {
        const auto up = single_shot_readout(cfg.spin, SpinState::Up, rng);
        const auto down = single_shot_readout(cfg.spin, SpinState::Down, rng);
        if (up.counts < static_cast<int>(hist_up.size()))
            ++hist_up[up.counts];
        if (down.counts < static_cast<int>(hist_down.size()))
            ++hist_down[down.counts];
    }

    auto csv = ctx.open_csv("readout_hist.csv");
    csv << "counts,occurrences_up,occurrences_down\n";
    for (std::size_t c = 0; c < hist_up.size(); ++c)
        csv << c << "," << hist_up[c] << "," << hist_down[c] << "\n";

    json j;
    j["error_analytic"] = readout_error_analytic(cfg.spin);
    j["error_up"] = readout_error_for_state(cfg.spin, SpinState::Up);
    j["error_down"] = readout_error_for_state(cfg.spin, SpinState::Down);
    j["threshold"] = cfg.spin.threshold;
    ctx.write_json("readout_summary.json", j);
}

void cmd_transfer(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const FidelityResult res =
        transfer_fidelity(cfg.spin, cfg.trials_per_state, ctx.run_seed("transfer"));

    json per_input;
    constexpr PhotonInput kInputs[] = {PhotonInput::Early, PhotonInput::Late,
                                       PhotonInput::Plus, PhotonInput::Minus};
    const char* names[] = {"early", "late", "plus", "minus"};
    for (int s = 0; s < 4; ++s) {
        auto rng = make_rng(splitmix64(ctx.run_seed("transfer.tally")) +
                            static_cast<std::uint64_t>(s));
        std::uint64_t heralds = 0, correct = 0;
        for (int t = 0; t < cfg.trials_per_state; ++t) {
            const TransferOutcome out = transfer_trial(cfg.spin, kInputs[s], rng);
            if (out.heralded) {
                ++heralds;
                correct += out.correct ? 1 : 0;
            }
        }
        per_input[names[s]] = {{"heralds", heralds},
                               {"correct", correct},
                               {"incorrect", heralds - correct}};
    }

    json j;
    j["per_input"] = per_input;
    j["fidelity"] = res.fidelity;
    j["sigma"] = res.sigma;
    j["heralds"] = res.heralds;
    j["fidelity_analytic"] = transfer_fidelity_analytic(cfg.spin);
    j["flagged"] = res.flagged;
    ctx.write_json("transfer_summary.json", j);
}

void cmd_linkrun(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const TransmitterOutput tx =
        run_transmitter(cfg.link, cfg.duration_s, ctx.run_seed("linkrun.tx"));
    const ReceiverResult rx =
        run_receiver(cfg.link, tx, cfg.spin, ctx.run_seed("linkrun.rx"));

    fs::create_directories(ctx.out_dir);
    std::ofstream trace(ctx.out_dir / "linkrun_trace.ldjson", std::ios::binary);
    trace << trace_to_ldjson(rx.trace);

    json j;
    j["commands"] = tx.commands.size();
    j["qubit_pulses"] = rx.outcomes.size();
    j["heralds"] = rx.heralds;
    j["correct"] = rx.correct;
    j["fidelity"] = rx.heralds > 0
                        ? static_cast<double>(rx.correct) / static_cast<double>(rx.heralds)
                        : 0.0;
    j["transitions"] = rx.trace.transitions.size();
    j["channel_loss_db"] = cfg.link.channel.total_loss_db();
    ctx.write_json("linkrun_summary.json", j);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Telecom quantum-network link simulator"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, out_dir, preset, bands_file, ppln_which = "down";
    std::uint64_t seed = 0;
    bool seed_set = false;

    app.add_option("--config", config_path, "configuration file (INI sections)");
    app.add_option("--seed", seed, "global 64-bit seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--preset", preset, "named preset (paper-defaults)");

    auto* plan = app.add_subcommand("plan", "plan a conversion scheme");
    plan->add_option("--bands", bands_file, "gain-band CSV (name,min_nm,max_nm)");
    auto* ppln = app.add_subcommand("ppln", "sweep converter efficiency and phase matching");
    ppln->add_option("--which", ppln_which, "down or up")
        ->check(CLI::IsMember({"down", "up"}));
    app.add_subcommand("hbt", "HBT g2 of the converted single-photon stream");
    app.add_subcommand("hom", "HOM visibility between successive emissions");
    app.add_subcommand("snr", "gated signal-to-noise of a simulated stream");
    app.add_subcommand("readout", "single-shot readout histograms and error");
    app.add_subcommand("transfer", "heralded spin-photon state-transfer fidelity");
    app.add_subcommand("linkrun", "end-to-end deployed-link protocol run");

    CLI11_PARSE(app, argc, argv);

    try {
        Ctx ctx;
        if (!preset.empty() && preset != "paper-defaults")
            throw ConfigError("unknown preset '" + preset + "'");
        ctx.cfg = config_path.empty() ? paper_defaults() : load_config(config_path);
        if (seed_set)
            ctx.cfg.seed = seed;
        if (const char* env = std::getenv("QLINK_OUT_DIR"); env && out_dir.empty())
            out_dir = env;
        ctx.out_dir = out_dir.empty() ? fs::path(ctx.cfg.out_dir) : fs::path(out_dir);
        ctx.cfg.validate();

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "plan")
            cmd_plan(ctx, bands_file);
        else if (sub == "ppln")
            cmd_ppln(ctx, ppln_which);
        else if (sub == "hbt")
            cmd_hbt(ctx);
        else if (sub == "hom")
            cmd_hom(ctx);
        else if (sub == "snr")
            cmd_snr(ctx);
        else if (sub == "readout")
            cmd_readout(ctx);
        else if (sub == "transfer")
            cmd_transfer(ctx);
        else if (sub == "linkrun")
            cmd_linkrun(ctx);
        return 0;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
