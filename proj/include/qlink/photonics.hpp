#pragma once

#include "qlink/converter.hpp"
#include "qlink/events.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace qlink {

enum class SourceKind { SingleEmitter, CoherentPulse };
enum class PulseShape { Rectangular, Lorentzian };

struct SourceModel {
    SourceKind kind = SourceKind::SingleEmitter;
    double repetition_rate_hz = 670e3;
    // emission probability per trigger (SingleEmitter) or mean photon
    // number per pulse (CoherentPulse)
    double emission = 0.05;
    PulseShape shape = PulseShape::Lorentzian;
    double shape_width_ns = 30.0; // rect width or Lorentzian FWHM
    double window_ns = 75.0;      // collection window after each trigger
    // pairwise wave-packet overlap of successive emissions, used by HOM
    double indistinguishability = 1.0;

    double trigger_period_ns() const { return 1e9 / repetition_rate_hz; }
};

struct DetectorModel {
    double efficiency = 0.29;
    double dark_rate_hz = 0.0;
    double gate_window_ns = 75.0;
};

// Converter evaluated at a fixed operating pump power.
struct ConverterOperatingPoint {
    ConverterModel model;
    double pump_power_mw = 0.0;

    double efficiency() const { return external_efficiency(model, pump_power_mw); }
    double noise_rate() const { return noise_rate_hz(model, pump_power_mw); }
};

struct CorrelationResult {
    std::vector<std::int64_t> delay_bins;    // in units of the trigger period
    std::vector<std::uint64_t> coincidences; // histogram per bin
    double g2_zero = 0.0;
    double g2_zero_sigma = 0.0;
    double window_ns = 0.0;
    bool low_confidence = false; // < 10 counts in normalization peaks
};

EventStream simulate_stream(const SourceModel& source,
                            const std::optional<ConverterOperatingPoint>& converter,
                            double channel_loss_db, const DetectorModel& detector,
                            double duration_s, std::uint64_t seed);

// 50:50 splitter feeding two detectors; channels 0 and 1.
std::pair<EventStream, EventStream> split_balanced(const EventStream& stream,
                                                   std::uint64_t seed);

// Pulsed g2: coincidences binned by delay in trigger periods; the zero bin
// is normalized by the mean of the |k| >= 2 peaks. No background subtraction.
CorrelationResult hbt_g2(const EventStream& a, const EventStream& b,
                         double trigger_period_ns, double window_ns,
                         int max_delay_bins = 20);

struct HomOptions {
    double delay_line_loss_db = 0.0;
    double polarization_overlap = 1.0; // for the co-polarized run
    std::optional<ConverterOperatingPoint> converter;
    double channel_loss_db = 0.0;
    DetectorModel detector{1.0, 0.0, 75.0};
};

struct HomResult {
    double visibility = 0.0;
    double g2_parallel = 0.0;
    double g2_perp = 0.0;
    bool undefined = false; // g2_perp statistically zero
};

// Interferes successive emissions with a one-period delay line; runs the
// cross-polarized and co-polarized configurations on split seeds.
HomResult hom_visibility(const SourceModel& source, const HomOptions& opts,
                         double duration_s, std::uint64_t seed);

struct SnrResult {
    double snr = 0.0;
    bool infinite = false; // zero background estimate
    double in_gate_rate_hz = 0.0;
    double out_gate_rate_hz = 0.0;
};

// Ratio of in-gate to out-of-gate mean rates; gates start at each trigger.
SnrResult gated_snr(const EventStream& stream, double trigger_period_ns, double gate_ns);

} // namespace qlink
