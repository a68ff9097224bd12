#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qlink {

// Pump-noise regime of a conversion stage, decided by the pump frequency
// relative to the converted (target) output.
enum class Regime { AntiStokes, Stokes, Boundary };

// Low-noise verdict for the pump/target separation. Separations within
// +-0.5 THz of the 30 THz cutoff are reported as Boundary rather than
// forced to either side.
enum class NoiseVerdict { LowNoise, HighNoise, Boundary };

struct GainBand {
    std::string name;
    double min_nm = 0.0;
    double max_nm = 0.0;

    bool contains(double wavelength_nm) const {
        return wavelength_nm >= min_nm && wavelength_nm <= max_nm;
    }
};

struct ConversionScheme {
    double memory_nm = 0.0;
    double target_nm = 0.0;
    std::vector<double> pump_nm;         // one or two pumps
    std::vector<Regime> stage_regimes;   // one entry per pump
    Regime regime = Regime::Boundary;    // overall: AntiStokes only if every stage is
    double pump_target_separation_thz = 0.0; // min over pumps of f_t - f_p
    NoiseVerdict noise_verdict = NoiseVerdict::HighNoise;
    bool low_noise = false;
};

// Threshold above which pump-induced anti-Stokes Raman noise has tapered off.
inline constexpr double kLowNoiseSeparationThz = 30.0;
inline constexpr double kSeparationBoundaryThz = 0.5;
inline constexpr double kEnergyToleranceThz = 1e-6;

ConversionScheme plan_single_pump(double memory_nm, double target_nm);

// Two-pump cascade: pump2 frequency is whatever remains after pump1.
ConversionScheme plan_two_pump(double memory_nm, double target_nm, double pump1_nm);

// (Re)derives regimes and the low-noise flag from the scheme's wavelengths.
void classify_regime(ConversionScheme& scheme);

std::vector<GainBand> feasible_pumps(const ConversionScheme& scheme,
                                     const std::vector<GainBand>& bands);

// Editable defaults; the usual gain materials around the telecom bands.
std::vector<GainBand> default_gain_bands();

} // namespace qlink
