#pragma once

#include "qlink/converter.hpp"
#include "qlink/link_protocol.hpp"
#include "qlink/photonics.hpp"
#include "qlink/spin_node.hpp"
#include "qlink/tradespace.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlink {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One flat INI-style file; every field defaults to the paper-defaults
// preset and unknown keys are rejected.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    double memory_nm = 737.0;
    double target_nm = 1350.0;
    double pump1_nm = 0.0; // 0 = single-pump planning
    std::vector<GainBand> gain_bands = default_gain_bands();

    ConverterModel downconverter = downconverter_defaults();
    ConverterModel upconverter = upconverter_defaults();
    double down_pump_mw;  // operating points; defaults to the sin^2 optimum
    double up_pump_mw;

    SourceModel source;
    DetectorModel detector;
    double channel_loss_db = 1.6121; // 69% fiber network between buildings

    SpinCavityModel spin;
    LinkConfig link = default_link_config();

    double duration_s = 1.5;
    int trials_per_state = 20000;
    int init_max_attempts = 500;
    double hom_delay_loss_db = 0.0;
    double hom_polarization_overlap = 1.0;

    ExperimentConfig();
    void validate() const;

    // Canonical key=value dump with stable ordering; hashed into artifacts.
    std::string canonical_dump() const;
    std::uint64_t hash() const;
};

// Paper-defaults preset (what an empty file loads to).
ExperimentConfig paper_defaults();

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

std::vector<GainBand> load_gain_bands(const std::string& path);

} // namespace qlink
