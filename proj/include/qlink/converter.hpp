#pragma once

#include <vector>

namespace qlink {

// Normalized sinc^2 phase-matching transfer, temperature tunable.
struct PhaseMatchCurve {
    double peak_pump_nm = 1623.0; // phase-matched pump at ref_temp_c
    double ref_temp_c = 55.5;
    double temp_slope_nm_per_c = 0.28;
    double fwhm_nm = 0.8;
};

struct FilterStage {
    double transmission = 1.0;
    double bandwidth_ghz = 0.0;
};

// Flat-top stages; the last stage's bandwidth gates broadband noise.
struct FilterChain {
    std::vector<FilterStage> stages;

    double total_transmission() const;
    double final_bandwidth_ghz() const;
};

enum class NoiseLaw { Linear, Quadratic };

struct NoiseModel {
    NoiseLaw law = NoiseLaw::Linear;
    double coeff = 0.0; // Hz/mW (Linear) or Hz/mW^2 (Quadratic)
};

// PPLN converter: eta_ext = eta_opt * eta_int * sin^2(L sqrt(eta0 P)).
struct ConverterModel {
    double eta_opt = 0.19;
    double eta_int = 0.65;
    double eta0_w_m2 = 1.54e4;  // normalized internal efficiency, W^-1 m^-2
    double length_m = 0.035;
    NoiseModel noise;
    FilterChain filters;
    PhaseMatchCurve phase_match;

    void validate() const; // throws std::invalid_argument on bad parameters
};

double external_efficiency(const ConverterModel& model, double pump_power_mw);

// Pump power at the first sin^2 maximum: P* = (pi / (2 L))^2 / eta0.
double optimal_pump_power_mw(const ConverterModel& model);

double noise_rate_hz(const ConverterModel& model, double pump_power_mw);

// noise_rate over the final filter bandwidth.
double noise_spectral_density(const ConverterModel& model, double pump_power_mw);

double phase_match_transfer(const PhaseMatchCurve& curve, double pump_nm, double temp_c);

// Ready-made models matching the two operating directions.
ConverterModel downconverter_defaults();
ConverterModel upconverter_defaults();

} // namespace qlink
