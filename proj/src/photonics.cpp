#include "qlink/photonics.hpp"

#include "qlink/rng.hpp"
#include "qlink/units.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qlink {

namespace {

constexpr double kPsPerNs = 1e3;

std::int64_t to_ps(double t_ns) { return static_cast<std::int64_t>(std::llround(t_ns * kPsPerNs)); }

// Arrival time offset inside the collection window, ns.
double draw_offset_ns(const SourceModel& src, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    if (src.shape == PulseShape::Rectangular) {
        const double w = std::min(src.shape_width_ns, src.window_ns);
        return uni(rng) * w;
    }
    // Truncated Lorentzian, peak placed a quarter of the way into the window.
    const double gamma = src.shape_width_ns / 2.0;
    const double center = src.window_ns / 4.0;
    std::cauchy_distribution<double> cauchy(center, gamma);
    for (;;) {
        const double t = cauchy(rng);
        if (t >= 0.0 && t < src.window_ns)
            return t;
    }
}

void append_poisson_uniform(EventStream& out, double rate_hz, double duration_s,
                            Provenance prov, std::uint32_t channel,
                            std::mt19937_64& rng) {
    if (rate_hz <= 0.0)
        return;
    std::poisson_distribution<std::uint64_t> pois(rate_hz * duration_s);
    std::uniform_real_distribution<double> uni(0.0, duration_s * 1e9);
    const std::uint64_t n = pois(rng);
    for (std::uint64_t i = 0; i < n; ++i)
        out.push_back({to_ps(uni(rng)), channel, prov});
}

} // namespace

void sort_stream(EventStream& stream) {
    std::sort(stream.begin(), stream.end(), [](const DetectionEvent& a, const DetectionEvent& b) {
        if (a.t_ps != b.t_ps)
            return a.t_ps < b.t_ps;
        return a.channel < b.channel;
    });
}

EventStream simulate_stream(const SourceModel& source,
                            const std::optional<ConverterOperatingPoint>& converter,
                            double channel_loss_db, const DetectorModel& detector,
                            double duration_s, std::uint64_t seed) {
    if (!(duration_s > 0.0))
        throw std::invalid_argument("duration must be positive");

    auto rng = make_rng(seed);
    const double conv_eff = converter ? converter->efficiency() : 1.0;
    const double trans = db_to_transmission(channel_loss_db);
    const double survival = conv_eff * trans * detector.efficiency;

    // Triggers sit on the integer-ps grid so gate phases stay aligned.
    const std::int64_t period_ps = to_ps(source.trigger_period_ns());
    const auto n_triggers = static_cast<std::uint64_t>(duration_s * source.repetition_rate_hz);

    EventStream out;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::poisson_distribution<unsigned> pois_photon(source.emission);
    for (std::uint64_t i = 0; i < n_triggers; ++i) {
        unsigned n_photons = 0;
        if (source.kind == SourceKind::SingleEmitter)
            n_photons = uni(rng) < source.emission ? 1 : 0;
        else
            n_photons = pois_photon(rng);
        for (unsigned p = 0; p < n_photons; ++p) {
            if (uni(rng) < survival) {
                const std::int64_t t =
                    static_cast<std::int64_t>(i) * period_ps + to_ps(draw_offset_ns(source, rng));
                out.push_back({t, 0, Provenance::Signal});
            }
        }
    }

    if (converter) {
        // Broadband pump-induced noise within the final filter, thinned by
        // everything downstream of the converter.
        const double rate = converter->noise_rate() * trans * detector.efficiency;
        append_poisson_uniform(out, rate, duration_s, Provenance::ConverterNoise, 0, rng);
    }
    append_poisson_uniform(out, detector.dark_rate_hz, duration_s, Provenance::Dark, 0, rng);

    sort_stream(out);
    return out;
}

std::pair<EventStream, EventStream> split_balanced(const EventStream& stream,
                                                   std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::bernoulli_distribution coin(0.5);
    EventStream a, b;
    for (DetectionEvent ev : stream) {
        if (coin(rng)) {
            ev.channel = 0;
            a.push_back(ev);
        } else {
            ev.channel = 1;
            b.push_back(ev);
        }
    }
    return {std::move(a), std::move(b)};
}

CorrelationResult hbt_g2(const EventStream& a, const EventStream& b,
                         double trigger_period_ns, double window_ns,
                         int max_delay_bins) {
    if (!(trigger_period_ns > 0.0) || !(window_ns > 0.0))
        throw std::invalid_argument("trigger period and window must be positive");

    const auto period_ps = static_cast<std::int64_t>(std::llround(trigger_period_ns * kPsPerNs));
    const auto window_ps = static_cast<std::int64_t>(std::llround(window_ns * kPsPerNs));

    // Gate each event to the collection window after its trigger, then
    // correlate by trigger-index difference. This matches the per-window
    // counting the closed-form background estimate assumes.
    auto gate_indices = [&](const EventStream& s) {
        std::vector<std::int64_t> idx;
        for (const DetectionEvent& ev : s)
            if (ev.t_ps % period_ps < window_ps)
                idx.push_back(ev.t_ps / period_ps);
        return idx;
    };
    const std::vector<std::int64_t> ia = gate_indices(a);
    const std::vector<std::int64_t> ib = gate_indices(b);

    std::map<std::int64_t, std::uint64_t> hist;
    for (int k = -max_delay_bins; k <= max_delay_bins; ++k)
        hist[k] = 0;

    std::size_t lo = 0;
    for (const std::int64_t na : ia) {
        while (lo < ib.size() && ib[lo] < na - max_delay_bins)
            ++lo;
        for (std::size_t j = lo; j < ib.size() && ib[j] <= na + max_delay_bins; ++j)
            ++hist[ib[j] - na];
    }

    CorrelationResult res;
    res.window_ns = window_ns;
    std::uint64_t norm_total = 0;
    std::uint64_t norm_peaks = 0;
    for (const auto& [k, n] : hist) {
        res.delay_bins.push_back(k);
        res.coincidences.push_back(n);
        if (std::llabs(k) >= 2) { // |k| = 1 excluded: partially suppressed under HOM
            norm_total += n;
            ++norm_peaks;
        }
    }
    const std::uint64_t zero = hist.at(0);
    res.low_confidence = norm_total < 10;
    if (norm_total == 0) {
        res.g2_zero = 0.0;
        res.g2_zero_sigma = 0.0;
        return res;
    }
    const double norm_mean = static_cast<double>(norm_total) / static_cast<double>(norm_peaks);
    res.g2_zero = static_cast<double>(zero) / norm_mean;
    const double rel_zero = zero > 0 ? 1.0 / static_cast<double>(zero) : 1.0;
    res.g2_zero_sigma = std::max(res.g2_zero, 1.0 / norm_mean) *
                        std::sqrt(rel_zero + 1.0 / static_cast<double>(norm_total));
    return res;
}

namespace {

struct BsArrival {
    bool is_signal = false;
};

// One HOM configuration: successive emissions meet on the output splitter
// after a one-period delay line. Interference is applied at the
// coincidence-probability level with pairwise suppression (1 - overlap * d).
std::pair<EventStream, EventStream> run_hom_once(const SourceModel& source,
                                                 const HomOptions& opts,
                                                 double overlap, double duration_s,
                                                 std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    const double conv_eff = opts.converter ? opts.converter->efficiency() : 1.0;
    const double p_pre = source.emission * conv_eff * db_to_transmission(opts.channel_loss_db);
    const double delay_trans = db_to_transmission(opts.delay_line_loss_db);

    // Slots live on the same integer-ps grid the correlator gates on.
    const std::int64_t period_ps = to_ps(source.trigger_period_ns());
    const auto n_triggers = static_cast<std::uint64_t>(duration_s * source.repetition_rate_hz);

    // Arrivals at the output splitter, keyed by slot index.
    std::map<std::uint64_t, std::vector<BsArrival>> slots;
    for (std::uint64_t i = 0; i < n_triggers; ++i) {
        if (uni(rng) >= p_pre)
            continue;
        if (coin(rng)) {
            slots[i].push_back({true}); // short arm
        } else if (uni(rng) < delay_trans) {
            slots[i + 1].push_back({true}); // long arm, one period later
        }
    }

    EventStream out_a, out_b;
    auto detect = [&](std::uint64_t slot, int port, bool is_signal) {
        if (uni(rng) >= opts.detector.efficiency)
            return;
        const std::int64_t t =
            static_cast<std::int64_t>(slot) * period_ps + to_ps(draw_offset_ns(source, rng));
        DetectionEvent ev{t, static_cast<std::uint32_t>(port),
                          is_signal ? Provenance::Signal : Provenance::ConverterNoise};
        (port == 0 ? out_a : out_b).push_back(ev);
    };

    // Broadband converter noise never interferes with the signal wave
    // packets; those photons pass straight to a random detector, spread
    // uniformly in time.
    if (opts.converter) {
        const double rate = opts.converter->noise_rate() *
                            db_to_transmission(opts.channel_loss_db) *
                            opts.detector.efficiency;
        std::poisson_distribution<std::uint64_t> pois(rate * duration_s);
        std::uniform_real_distribution<double> t_uni(0.0, duration_s * 1e9);
        const std::uint64_t n = pois(rng);
        for (std::uint64_t i = 0; i < n; ++i) {
            DetectionEvent ev{to_ps(t_uni(rng)), coin(rng) ? 0u : 1u,
                              Provenance::ConverterNoise};
            (ev.channel == 0 ? out_a : out_b).push_back(ev);
        }
    }

    for (const auto& [slot, arrivals] : slots) {
        if (arrivals.size() == 2) {
            const bool both_signal = arrivals[0].is_signal && arrivals[1].is_signal;
            const double q = both_signal ? overlap * source.indistinguishability : 0.0;
            if (uni(rng) < (1.0 - q) / 2.0) {
                detect(slot, 0, arrivals[0].is_signal);
                detect(slot, 1, arrivals[1].is_signal);
            } else {
                const int port = coin(rng) ? 0 : 1;
                detect(slot, port, arrivals[0].is_signal);
                detect(slot, port, arrivals[1].is_signal);
            }
        } else {
            for (const BsArrival& ar : arrivals)
                detect(slot, coin(rng) ? 0 : 1, ar.is_signal);
        }
    }

    // Dark counts land directly on the detectors.
    append_poisson_uniform(out_a, opts.detector.dark_rate_hz, duration_s, Provenance::Dark, 0, rng);
    append_poisson_uniform(out_b, opts.detector.dark_rate_hz, duration_s, Provenance::Dark, 1, rng);
    sort_stream(out_a);
    sort_stream(out_b);
    return {std::move(out_a), std::move(out_b)};
}

} // namespace

HomResult hom_visibility(const SourceModel& source, const HomOptions& opts,
                         double duration_s, std::uint64_t seed) {
    const auto [perp_a, perp_b] =
        run_hom_once(source, opts, 0.0, duration_s, splitmix64(seed ^ 0x17));
    const auto [par_a, par_b] = run_hom_once(source, opts, opts.polarization_overlap,
                                             duration_s, splitmix64(seed ^ 0x42));

    const double period = source.trigger_period_ns();
    const CorrelationResult perp = hbt_g2(perp_a, perp_b, period, source.window_ns);
    const CorrelationResult par = hbt_g2(par_a, par_b, period, source.window_ns);

    HomResult res;
    res.g2_perp = perp.g2_zero;
    res.g2_parallel = par.g2_zero;
    if (perp.g2_zero <= 0.0) {
        res.undefined = true;
        return res;
    }
    res.visibility = 1.0 - par.g2_zero / perp.g2_zero;
    return res;
}

SnrResult gated_snr(const EventStream& stream, double trigger_period_ns, double gate_ns) {
    if (!(gate_ns > 0.0) || gate_ns > trigger_period_ns)
        throw std::invalid_argument("gate must be positive and fit in the trigger period");

    const auto period_ps = static_cast<std::int64_t>(std::llround(trigger_period_ns * kPsPerNs));
    const auto gate_ps = static_cast<std::int64_t>(std::llround(gate_ns * kPsPerNs));

    std::uint64_t in_gate = 0, out_gate = 0;
    std::int64_t t_max = 0;
    for (const DetectionEvent& ev : stream) {
        const std::int64_t phase = ev.t_ps % period_ps;
        (phase < gate_ps ? in_gate : out_gate)++;
        t_max = std::max(t_max, ev.t_ps);
    }
    const double n_periods = std::max<double>(1.0, std::floor(static_cast<double>(t_max) /
                                                              static_cast<double>(period_ps)) + 1.0);

    SnrResult res;
    res.in_gate_rate_hz = static_cast<double>(in_gate) / (n_periods * gate_ns * 1e-9);
    res.out_gate_rate_hz =
        static_cast<double>(out_gate) / (n_periods * (trigger_period_ns - gate_ns) * 1e-9);
    if (out_gate == 0) {
        res.infinite = true;
        return res;
    }
    res.snr = res.in_gate_rate_hz / res.out_gate_rate_hz;
    return res;
}

} // namespace qlink
