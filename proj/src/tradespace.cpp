#include "qlink/tradespace.hpp"

#include "qlink/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlink {

namespace {

Regime stage_regime(double pump_thz, double target_thz) {
    if (std::abs(pump_thz - target_thz) <= kEnergyToleranceThz)
        return Regime::Boundary;
    return pump_thz < target_thz ? Regime::AntiStokes : Regime::Stokes;
}

} // namespace

void classify_regime(ConversionScheme& scheme) {
    const double f_target = frequency_thz(scheme.target_nm);

    scheme.stage_regimes.clear();
    double min_separation = std::numeric_limits<double>::infinity();
    bool all_antistokes = true;
    bool any_stokes = false;
    for (double pump : scheme.pump_nm) {
        const double f_pump = frequency_thz(pump);
        const Regime r = stage_regime(f_pump, f_target);
        scheme.stage_regimes.push_back(r);
        all_antistokes = all_antistokes && r == Regime::AntiStokes;
        any_stokes = any_stokes || r == Regime::Stokes;
        min_separation = std::min(min_separation, f_target - f_pump);
    }
    scheme.pump_target_separation_thz = min_separation;
    scheme.regime = all_antistokes ? Regime::AntiStokes
                  : any_stokes     ? Regime::Stokes
                                   : Regime::Boundary;

    if (!all_antistokes) {
        scheme.noise_verdict = NoiseVerdict::HighNoise;
    } else if (min_separation > kLowNoiseSeparationThz + kSeparationBoundaryThz) {
        scheme.noise_verdict = NoiseVerdict::LowNoise;
    } else if (min_separation < kLowNoiseSeparationThz - kSeparationBoundaryThz) {
        scheme.noise_verdict = NoiseVerdict::HighNoise;
    } else {
        scheme.noise_verdict = NoiseVerdict::Boundary;
    }
    scheme.low_noise = scheme.noise_verdict == NoiseVerdict::LowNoise;
}

ConversionScheme plan_single_pump(double memory_nm, double target_nm) {
    if (!(memory_nm > 0.0) || !(target_nm > 0.0))
        throw std::invalid_argument("wavelengths must be positive");
    if (target_nm <= memory_nm)
        throw std::invalid_argument(
            "downconversion requires the target wavelength to exceed the memory "
            "wavelength; the requested conversion has no positive pump frequency");

    const double f_memory = frequency_thz(memory_nm);
    const double f_target = frequency_thz(target_nm);
    const double f_pump = f_memory - f_target;

    ConversionScheme scheme;
    scheme.memory_nm = memory_nm;
    scheme.target_nm = target_nm;
    scheme.pump_nm = {wavelength_nm(f_pump)};
    classify_regime(scheme);
    return scheme;
}

ConversionScheme plan_two_pump(double memory_nm, double target_nm, double pump1_nm) {
    if (!(memory_nm > 0.0) || !(target_nm > 0.0) || !(pump1_nm > 0.0))
        throw std::invalid_argument("wavelengths must be positive");
    if (target_nm <= memory_nm)
        throw std::invalid_argument("target wavelength must exceed the memory wavelength");

    const double f_memory = frequency_thz(memory_nm);
    const double f_target = frequency_thz(target_nm);
    const double f_pump2 = f_memory - f_target - frequency_thz(pump1_nm);
    if (f_pump2 <= 0.0)
        throw std::invalid_argument(
            "pump1 leaves no positive residual frequency for the second pump");

    ConversionScheme scheme;
    scheme.memory_nm = memory_nm;
    scheme.target_nm = target_nm;
    scheme.pump_nm = {pump1_nm, wavelength_nm(f_pump2)};
    classify_regime(scheme);
    return scheme;
}

std::vector<GainBand> feasible_pumps(const ConversionScheme& scheme,
                                     const std::vector<GainBand>& bands) {
    if (bands.empty())
        throw std::invalid_argument("gain band list is empty");
    std::vector<GainBand> hits;
    for (const GainBand& band : bands) {
        const bool hit = std::any_of(scheme.pump_nm.begin(), scheme.pump_nm.end(),
                                     [&](double p) { return band.contains(p); });
        if (hit)
            hits.push_back(band);
    }
    return hits;
}

std::vector<GainBand> default_gain_bands() {
    return {
        {"semiconductor", 780.0, 980.0},
        {"Yb", 1010.0, 1065.0},
        {"Er", 1530.0, 1625.0},
    };
}

} // namespace qlink
