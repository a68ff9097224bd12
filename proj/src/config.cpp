#include "qlink/config.hpp"

#include "qlink/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace qlink {

namespace {

double parse_double(const std::string& v, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": cannot parse '" + v + "' as a number");
    }
}

long parse_int(const std::string& v, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const long i = std::stol(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return i;
    } catch (const std::exception&) {
        throw ConfigError(ctx + ": cannot parse '" + v + "' as an integer");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Field {
    std::string name; // "section.key"
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

void add_double(std::vector<Field>& fields, std::string name, double ExperimentConfig::* member) {
    fields.push_back({name,
                      [member](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                          c.*member = parse_double(v, ctx);
                      },
                      [member](const ExperimentConfig& c) { return fmt(c.*member); }});
}

template <typename Sub>
void add_sub_double(std::vector<Field>& fields, std::string name,
                    Sub ExperimentConfig::* sub, double Sub::* member) {
    fields.push_back({name,
                      [=](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                          c.*sub.*member = parse_double(v, ctx);
                      },
                      [=](const ExperimentConfig& c) { return fmt(c.*sub.*member); }});
}

template <typename Sub>
void add_sub_int(std::vector<Field>& fields, std::string name,
                 Sub ExperimentConfig::* sub, int Sub::* member) {
    fields.push_back({name,
                      [=](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                          c.*sub.*member = static_cast<int>(parse_int(v, ctx));
                      },
                      [=](const ExperimentConfig& c) { return std::to_string(c.*sub.*member); }});
}

std::vector<Field> build_registry() {
    std::vector<Field> f;

    f.push_back({"global.seed",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     c.seed = static_cast<std::uint64_t>(parse_int(v, ctx));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
    f.push_back({"global.out_dir",
                 [](ExperimentConfig& c, const std::string& v, const std::string&) { c.out_dir = v; },
                 [](const ExperimentConfig& c) { return c.out_dir; }});

    add_double(f, "plan.memory_nm", &ExperimentConfig::memory_nm);
    add_double(f, "plan.target_nm", &ExperimentConfig::target_nm);
    add_double(f, "plan.pump1_nm", &ExperimentConfig::pump1_nm);

    auto add_converter = [&f](const std::string& sec, ConverterModel ExperimentConfig::* conv,
                              double ExperimentConfig::* pump) {
        f.push_back({sec + ".eta_opt",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).eta_opt = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) { return fmt((c.*conv).eta_opt); }});
        f.push_back({sec + ".eta_int",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).eta_int = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) { return fmt((c.*conv).eta_int); }});
        f.push_back({sec + ".eta0_w_m2",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).eta0_w_m2 = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) { return fmt((c.*conv).eta0_w_m2); }});
        f.push_back({sec + ".length_m",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).length_m = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) { return fmt((c.*conv).length_m); }});
        f.push_back({sec + ".noise_law",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         if (v == "linear")
                             (c.*conv).noise.law = NoiseLaw::Linear;
                         else if (v == "quadratic")
                             (c.*conv).noise.law = NoiseLaw::Quadratic;
                         else
                             throw ConfigError(ctx + ": noise_law must be linear or quadratic");
                     },
                     [conv](const ExperimentConfig& c) {
                         return (c.*conv).noise.law == NoiseLaw::Linear ? "linear" : "quadratic";
                     }});
        f.push_back({sec + ".noise_coeff",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).noise.coeff = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) { return fmt((c.*conv).noise.coeff); }});
        f.push_back({sec + ".final_filter_ghz",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         if ((c.*conv).filters.stages.empty())
                             (c.*conv).filters.stages.push_back({1.0, 0.0});
                         (c.*conv).filters.stages.back().bandwidth_ghz = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) {
                         return fmt((c.*conv).filters.final_bandwidth_ghz());
                     }});
        f.push_back({sec + ".pm_peak_nm",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).phase_match.peak_pump_nm = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) {
                         return fmt((c.*conv).phase_match.peak_pump_nm);
                     }});
        f.push_back({sec + ".pm_ref_temp_c",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).phase_match.ref_temp_c = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) {
                         return fmt((c.*conv).phase_match.ref_temp_c);
                     }});
        f.push_back({sec + ".pm_slope_nm_per_c",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).phase_match.temp_slope_nm_per_c = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) {
                         return fmt((c.*conv).phase_match.temp_slope_nm_per_c);
                     }});
        f.push_back({sec + ".pm_fwhm_nm",
                     [conv](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         (c.*conv).phase_match.fwhm_nm = parse_double(v, ctx);
                     },
                     [conv](const ExperimentConfig& c) {
                         return fmt((c.*conv).phase_match.fwhm_nm);
                     }});
        f.push_back({sec + ".pump_mw",
                     [pump](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                         c.*pump = parse_double(v, ctx);
                     },
                     [pump](const ExperimentConfig& c) { return fmt(c.*pump); }});
    };
    add_converter("downconverter", &ExperimentConfig::downconverter,
                  &ExperimentConfig::down_pump_mw);
    add_converter("upconverter", &ExperimentConfig::upconverter, &ExperimentConfig::up_pump_mw);

    f.push_back({"source.kind",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     if (v == "single_emitter")
                         c.source.kind = SourceKind::SingleEmitter;
                     else if (v == "coherent")
                         c.source.kind = SourceKind::CoherentPulse;
                     else
                         throw ConfigError(ctx + ": kind must be single_emitter or coherent");
                 },
                 [](const ExperimentConfig& c) {
                     return c.source.kind == SourceKind::SingleEmitter
                                ? std::string("single_emitter")
                                : std::string("coherent");
                 }});
    f.push_back({"source.shape",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     if (v == "rectangular")
                         c.source.shape = PulseShape::Rectangular;
                     else if (v == "lorentzian")
                         c.source.shape = PulseShape::Lorentzian;
                     else
                         throw ConfigError(ctx + ": shape must be rectangular or lorentzian");
                 },
                 [](const ExperimentConfig& c) {
                     return c.source.shape == PulseShape::Rectangular
                                ? std::string("rectangular")
                                : std::string("lorentzian");
                 }});
    add_sub_double(f, "source.repetition_rate_hz", &ExperimentConfig::source,
                   &SourceModel::repetition_rate_hz);
    add_sub_double(f, "source.emission", &ExperimentConfig::source, &SourceModel::emission);
    add_sub_double(f, "source.shape_width_ns", &ExperimentConfig::source,
                   &SourceModel::shape_width_ns);
    add_sub_double(f, "source.window_ns", &ExperimentConfig::source, &SourceModel::window_ns);
    add_sub_double(f, "source.indistinguishability", &ExperimentConfig::source,
                   &SourceModel::indistinguishability);

    add_sub_double(f, "detector.efficiency", &ExperimentConfig::detector,
                   &DetectorModel::efficiency);
    add_sub_double(f, "detector.dark_rate_hz", &ExperimentConfig::detector,
                   &DetectorModel::dark_rate_hz);
    add_sub_double(f, "detector.gate_window_ns", &ExperimentConfig::detector,
                   &DetectorModel::gate_window_ns);

    add_double(f, "channel.loss_db", &ExperimentConfig::channel_loss_db);

    add_sub_double(f, "spin.lambda_up", &ExperimentConfig::spin, &SpinCavityModel::lambda_up);
    add_sub_double(f, "spin.lambda_down", &ExperimentConfig::spin, &SpinCavityModel::lambda_down);
    add_sub_double(f, "spin.readout_bin_us", &ExperimentConfig::spin,
                   &SpinCavityModel::readout_bin_us);
    add_sub_int(f, "spin.threshold", &ExperimentConfig::spin, &SpinCavityModel::threshold);
    add_sub_double(f, "spin.init_fidelity", &ExperimentConfig::spin,
                   &SpinCavityModel::init_fidelity);
    add_sub_double(f, "spin.pi_pulse_fidelity", &ExperimentConfig::spin,
                   &SpinCavityModel::pi_pulse_fidelity);
    add_sub_int(f, "spin.pi_pulses_per_transfer", &ExperimentConfig::spin,
                &SpinCavityModel::pi_pulses_per_transfer);
    add_sub_double(f, "spin.reflect_up", &ExperimentConfig::spin, &SpinCavityModel::reflect_up);
    add_sub_double(f, "spin.reflect_down", &ExperimentConfig::spin,
                   &SpinCavityModel::reflect_down);
    add_sub_double(f, "spin.check_bin_us", &ExperimentConfig::spin, &SpinCavityModel::check_bin_us);
    add_sub_int(f, "spin.check_accept_down_below", &ExperimentConfig::spin,
                &SpinCavityModel::check_accept_down_below);
    add_sub_int(f, "spin.check_accept_up_above", &ExperimentConfig::spin,
                &SpinCavityModel::check_accept_up_above);
    add_sub_double(f, "spin.required_contrast", &ExperimentConfig::spin,
                   &SpinCavityModel::required_contrast);

    f.push_back({"link.preset",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     const double drift = c.link.channel.polarization_drift_step;
                     if (v == "direct")
                         c.link.channel = deployed_link_direct();
                     else if (v == "segmented")
                         c.link.channel = deployed_link_segmented();
                     else
                         throw ConfigError(ctx + ": preset must be direct or segmented");
                     c.link.channel.polarization_drift_step = drift;
                 },
                 [](const ExperimentConfig& c) {
                     return c.link.channel.segments.size() > 1 ? std::string("segmented")
                                                               : std::string("direct");
                 }});
    f.push_back({"link.polarization_drift_step",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     c.link.channel.polarization_drift_step = parse_double(v, ctx);
                 },
                 [](const ExperimentConfig& c) {
                     return fmt(c.link.channel.polarization_drift_step);
                 }});
    add_sub_double(f, "link.bin_separation_ns", &ExperimentConfig::link,
                   &LinkConfig::bin_separation_ns);
    add_sub_double(f, "link.qubit_fwhm_ns", &ExperimentConfig::link, &LinkConfig::qubit_fwhm_ns);
    add_sub_double(f, "link.qubit_spacing_ns", &ExperimentConfig::link,
                   &LinkConfig::qubit_spacing_ns);
    add_sub_double(f, "link.mean_photon_at_device", &ExperimentConfig::link,
                   &LinkConfig::mean_photon_at_device);
    add_sub_double(f, "link.receiver_path_efficiency", &ExperimentConfig::link,
                   &LinkConfig::receiver_path_efficiency);
    add_sub_double(f, "link.data_period_us", &ExperimentConfig::link, &LinkConfig::data_period_us);
    add_sub_double(f, "link.stabilize_period_us", &ExperimentConfig::link,
                   &LinkConfig::stabilize_period_us);
    add_sub_int(f, "link.qubits_per_data_period", &ExperimentConfig::link,
                &LinkConfig::qubits_per_data_period);
    add_sub_double(f, "link.feedback_residual", &ExperimentConfig::link,
                   &LinkConfig::feedback_residual);
    add_sub_int(f, "link.init_max_attempts", &ExperimentConfig::link,
                &LinkConfig::init_max_attempts);

    add_double(f, "run.duration_s", &ExperimentConfig::duration_s);
    f.push_back({"run.trials_per_state",
                 [](ExperimentConfig& c, const std::string& v, const std::string& ctx) {
                     c.trials_per_state = static_cast<int>(parse_int(v, ctx));
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.trials_per_state); }});
    add_double(f, "run.hom_delay_loss_db", &ExperimentConfig::hom_delay_loss_db);
    add_double(f, "run.hom_polarization_overlap", &ExperimentConfig::hom_polarization_overlap);

    std::sort(f.begin(), f.end(), [](const Field& a, const Field& b) { return a.name < b.name; });
    return f;
}

const std::vector<Field>& registry() {
    static const std::vector<Field> fields = build_registry();
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

ExperimentConfig::ExperimentConfig() {
    source = SourceModel{};
    detector = DetectorModel{};
    spin = SpinCavityModel{};
    down_pump_mw = optimal_pump_power_mw(downconverter);
    up_pump_mw = optimal_pump_power_mw(upconverter);
}

void ExperimentConfig::validate() const {
    downconverter.validate();
    upconverter.validate();
    spin.validate();
    link.validate();
    if (down_pump_mw < 0.0 || up_pump_mw < 0.0)
        throw ConfigError("pump powers must be non-negative");
    if (source.emission < 0.0 ||
        (source.kind == SourceKind::SingleEmitter && source.emission > 1.0))
        throw ConfigError("source.emission violates its invariant (probability in [0,1])");
    if (!(source.shape_width_ns > 0.0) || !(source.window_ns > 0.0))
        throw ConfigError("source widths must be positive");
    if (detector.efficiency < 0.0 || detector.efficiency > 1.0)
        throw ConfigError("detector.efficiency violates its invariant (must lie in [0,1])");
    if (detector.dark_rate_hz < 0.0)
        throw ConfigError("detector.dark_rate_hz must be non-negative");
    if (channel_loss_db < 0.0 || hom_delay_loss_db < 0.0)
        throw ConfigError("channel losses must be non-negative");
    if (hom_polarization_overlap < 0.0 || hom_polarization_overlap > 1.0)
        throw ConfigError("hom_polarization_overlap must lie in [0,1]");
    if (!(duration_s > 0.0))
        throw ConfigError("run.duration_s must be positive");
    for (const GainBand& b : gain_bands)
        if (!(b.min_nm < b.max_nm))
            throw ConfigError("gain band '" + b.name + "' violates min < max");
}

std::string ExperimentConfig::canonical_dump() const {
    std::ostringstream os;
    for (const Field& field : registry())
        os << field.name << "=" << field.get(*this) << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_dump()); }

ExperimentConfig paper_defaults() { return ExperimentConfig{}; }

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg = paper_defaults();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string ctx = origin + ":" + std::to_string(lineno);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(ctx + ": malformed section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ctx + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;

        const auto& fields = registry();
        const auto it = std::lower_bound(
            fields.begin(), fields.end(), full,
            [](const Field& field, const std::string& name) { return field.name < name; });
        if (it == fields.end() || it->name != full)
            throw ConfigError(ctx + ": unknown key '" + full + "'");
        it->set(cfg, value, ctx + " [" + full + "]");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::vector<GainBand> load_gain_bands(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open gain-band file '" + path + "'");
    std::vector<GainBand> bands;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::istringstream row(t);
        GainBand b;
        std::string min_s, max_s;
        if (!std::getline(row, b.name, ',') || !std::getline(row, min_s, ',') ||
            !std::getline(row, max_s, ','))
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected name,min_nm,max_nm");
        b.name = trim(b.name);
        b.min_nm = parse_double(trim(min_s), path + ":" + std::to_string(lineno));
        b.max_nm = parse_double(trim(max_s), path + ":" + std::to_string(lineno));
        if (!(b.min_nm < b.max_nm))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": band requires min < max");
        bands.push_back(b);
    }
    return bands;
}

} // namespace qlink
