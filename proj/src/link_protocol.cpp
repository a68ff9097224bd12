#include "qlink/link_protocol.hpp"

#include "qlink/rng.hpp"
#include "qlink/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qlink {

double ChannelModel::total_loss_db() const {
    double loss = 0.0;
    for (const auto& s : segments)
        loss += s.loss_db;
    return loss;
}

double ChannelModel::transmission() const { return db_to_transmission(total_loss_db()); }

double channel_transmit(const ChannelModel& channel, ChannelState& state,
                        double mean_photon_number, std::mt19937_64& rng) {
    if (mean_photon_number < 0.0)
        throw std::invalid_argument("amplitude must be non-negative");
    if (channel.polarization_drift_step > 0.0) {
        std::normal_distribution<double> step(0.0, channel.polarization_drift_step);
        state.polarization_overlap =
            std::clamp(state.polarization_overlap - std::abs(step(rng)), 0.0, 1.0);
    }
    if (channel.timing_drift_step_ns > 0.0) {
        std::normal_distribution<double> step(0.0, channel.timing_drift_step_ns);
        state.timing_offset_ns += step(rng);
    }
    return mean_photon_number * channel.transmission();
}

void polarization_feedback(ChannelState& state, double residual) {
    state.polarization_overlap = std::clamp(1.0 - residual, 0.0, 1.0);
}

ChannelModel deployed_link_direct() {
    ChannelModel c;
    c.segments = {{50.0, 40.8}};
    return c;
}

ChannelModel deployed_link_segmented() {
    ChannelModel c;
    // Alice -> Charlie -> Bob; Charlie is a passive pass-through junction.
    c.segments = {{43.0, 24.1}, {7.0, 19.7}};
    return c;
}

void LinkConfig::validate() const {
    if (!(bin_separation_ns > qubit_fwhm_ns))
        throw std::invalid_argument("bin separation must exceed the pulse FWHM");
    if (!(receiver_path_efficiency > 0.0) || receiver_path_efficiency > 1.0)
        throw std::invalid_argument("receiver path efficiency must lie in (0,1]");
    if (!(mean_photon_at_device > 0.0))
        throw std::invalid_argument("mean photon number at device must be positive");
    if (qubits_per_data_period < 0 || init_max_attempts < 1)
        throw std::invalid_argument("invalid protocol counts");
    for (const auto& s : channel.segments)
        if (s.loss_db < 0.0)
            throw std::invalid_argument("segment losses must be non-negative");
    upconverter.model.validate();
}

LinkConfig default_link_config() {
    LinkConfig cfg;
    cfg.channel = deployed_link_direct();
    cfg.channel.polarization_drift_step = 2e-4;
    ConverterModel up = upconverter_defaults();
    cfg.upconverter = {up, optimal_pump_power_mw(up)};
    return cfg;
}

namespace {

constexpr std::int64_t kPsPerUs = 1'000'000;

std::int64_t ns_to_ps(double ns) { return static_cast<std::int64_t>(std::llround(ns * 1e3)); }

PhotonInput random_input(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 3);
    constexpr PhotonInput kInputs[] = {PhotonInput::Early, PhotonInput::Late,
                                       PhotonInput::Plus, PhotonInput::Minus};
    return kInputs[pick(rng)];
}

} // namespace

TransmitterOutput run_transmitter(const LinkConfig& config, double duration_s,
                                  std::uint64_t seed) {
    config.validate();
    auto rng = make_rng(seed);

    TransmitterOutput out;
    const auto data_ps = static_cast<std::int64_t>(config.data_period_us) * kPsPerUs;
    const auto stab_ps = static_cast<std::int64_t>(config.stabilize_period_us) * kPsPerUs;
    const auto end_ps = static_cast<std::int64_t>(duration_s * 1e12);

    // Qubit amplitude chosen so pulses arrive at the device with the
    // configured mean photon number after the channel loss.
    const double qubit_amplitude =
        config.mean_photon_at_device / config.channel.transmission();

    std::uint64_t next_id = 1;
    std::int64_t t = 0;
    bool data_phase = true; // a run shorter than one period is a single data period
    while (t < end_ps) {
        if (data_phase) {
            out.commands.push_back({t, CommandType::DataStart,
                                    config.qubits_per_data_period, next_id++});
            std::int64_t qt = t + ns_to_ps(config.qubit_spacing_ns);
            for (int q = 0; q < config.qubits_per_data_period; ++q) {
                out.pulses.push_back({qt, PulseKind::Qubit, random_input(rng),
                                      qubit_amplitude, next_id++});
                qt += ns_to_ps(config.qubit_spacing_ns);
            }
            t += data_ps;
        } else {
            out.commands.push_back({t, CommandType::StabilizeStart, 0, next_id++});
            std::int64_t rt = t + ns_to_ps(config.qubit_spacing_ns);
            for (int r = 0; r < config.reference_pulses_per_period; ++r) {
                out.pulses.push_back({rt, PulseKind::Reference, PhotonInput::Early,
                                      config.reference_pulse_amplitude, next_id++});
                rt += ns_to_ps(config.qubit_spacing_ns);
            }
            t += stab_ps;
        }
        data_phase = !data_phase;
    }
    out.commands.push_back({t, CommandType::EndOfRun, 0, next_id++});
    return out;
}

namespace {

struct ReceiverEngine {
    const LinkConfig& config;
    const SpinCavityModel& spin;
    std::mt19937_64 rng;
    ChannelState channel_state;
    SeqState main_state = SeqState::Idle;
    SeqState siv_state = SeqState::Idle;
    bool train_armed = false; // SiV initialized for the current data period
    ReceiverResult result;

    ReceiverEngine(const LinkConfig& cfg, const SpinCavityModel& sp, std::uint64_t seed)
        : config(cfg), spin(sp), rng(make_rng(seed)) {}

    void transition(Machine m, SeqState to, std::int64_t event_t, const std::string& cause) {
        SeqState& st = m == Machine::SivSequencer ? siv_state : main_state;
        // Transitions land one tick after their cause so causality is strict.
        result.trace.transitions.push_back({event_t + 1, m, st, to, cause, event_t});
        st = to;
    }

    void on_command(const ClockCommand& cmd) {
        const std::string cause = "cmd:" + std::to_string(cmd.id);
        if (main_state == SeqState::Fault)
            return; // faulted runs stay down until reset
        switch (cmd.type) {
        case CommandType::StabilizeStart:
            transition(Machine::MainSequencer, SeqState::Stabilize, cmd.t_ps, cause);
            polarization_feedback(channel_state, config.feedback_residual);
            break;
        case CommandType::DataStart: {
            if (cmd.n_qubits < 0) {
                transition(Machine::MainSequencer, SeqState::Fault, cmd.t_ps, cause);
                return;
            }
            transition(Machine::MainSequencer, SeqState::DataQubits, cmd.t_ps, cause);
            transition(Machine::SivSequencer, SeqState::InitSpin, cmd.t_ps, cause);
            const InitResult init =
                run_initialization(spin, SpinState::Down, config.init_max_attempts, rng);
            if (init.success) {
                train_armed = true;
                transition(Machine::SivSequencer, SeqState::DataQubits, cmd.t_ps,
                           "init_ok:" + std::to_string(init.attempts_used));
            } else {
                train_armed = false;
                transition(Machine::SivSequencer, SeqState::Idle, cmd.t_ps,
                           "init_exhausted:train_skipped");
            }
            break;
        }
        case CommandType::EndOfRun:
            if (siv_state == SeqState::DataQubits) {
                transition(Machine::SivSequencer, SeqState::ReadSpin, cmd.t_ps, cause);
                transition(Machine::SivSequencer, SeqState::Idle, cmd.t_ps, cause);
            }
            transition(Machine::MainSequencer, SeqState::Idle, cmd.t_ps, cause);
            break;
        case CommandType::Malformed:
            transition(Machine::MainSequencer, SeqState::Fault, cmd.t_ps, cause);
            break;
        }
    }

    void on_pulse(const PulseRecord& pulse) {
        const std::string cause = "pulse:" + std::to_string(pulse.id);
        if (main_state == SeqState::Fault)
            return;
        if (pulse.kind == PulseKind::Reference) {
            if (main_state != SeqState::Stabilize) {
                // Reference light must never reach the memory.
                transition(Machine::MainSequencer, SeqState::Fault, pulse.t_ps, cause);
                return;
            }
            result.trace.routing.push_back(
                {pulse.t_ps, pulse.id, pulse.kind, Routing::ReferencePath});
            return;
        }

        if (main_state != SeqState::DataQubits) {
            transition(Machine::MainSequencer, SeqState::Fault, pulse.t_ps, cause);
            return;
        }
        result.trace.routing.push_back({pulse.t_ps, pulse.id, pulse.kind, Routing::QubitPath});
        if (!train_armed)
            return; // initialization failed: train delivered but not processed

        const double n_device =
            channel_transmit(config.channel, channel_state, pulse.mean_photon_number, rng);
        const double p_photon =
            -std::expm1(-n_device * channel_state.polarization_overlap);
        const double arrival = p_photon * config.upconverter.efficiency() *
                               config.receiver_path_efficiency;
        const TransferOutcome out = transfer_trial(spin, pulse.input, rng, arrival);
        result.outcomes.push_back(out);
        if (out.heralded) {
            ++result.heralds;
            if (out.correct)
                ++result.correct;
        }
    }
};

} // namespace

ReceiverResult run_receiver(const LinkConfig& config, const TransmitterOutput& incoming,
                            const SpinCavityModel& spin, std::uint64_t seed) {
    config.validate();
    spin.validate();
    ReceiverEngine engine(config, spin, seed);

    std::size_t ci = 0, pi = 0;
    while (ci < incoming.commands.size() || pi < incoming.pulses.size()) {
        const bool take_cmd =
            pi >= incoming.pulses.size() ||
            (ci < incoming.commands.size() &&
             incoming.commands[ci].t_ps <= incoming.pulses[pi].t_ps);
        if (take_cmd)
            engine.on_command(incoming.commands[ci++]);
        else
            engine.on_pulse(incoming.pulses[pi++]);
    }
    return std::move(engine.result);
}

const char* to_string(SeqState s) {
    switch (s) {
    case SeqState::Idle: return "Idle";
    case SeqState::Stabilize: return "Stabilize";
    case SeqState::DataQubits: return "DataQubits";
    case SeqState::InitSpin: return "InitSpin";
    case SeqState::ReadSpin: return "ReadSpin";
    case SeqState::Fault: return "Fault";
    }
    return "?";
}

const char* to_string(Machine m) {
    switch (m) {
    case Machine::Transmitter: return "Transmitter";
    case Machine::MainSequencer: return "MainSequencer";
    case Machine::SivSequencer: return "SivSequencer";
    }
    return "?";
}

std::string trace_to_ldjson(const ProtocolTrace& trace) {
    std::ostringstream os;
    for (const TraceRecord& r : trace.transitions) {
        os << "{\"time_ps\":" << r.t_ps << ",\"machine\":\"" << to_string(r.machine)
           << "\",\"from_state\":\"" << to_string(r.from) << "\",\"to_state\":\""
           << to_string(r.to) << "\",\"cause\":\"" << r.cause
           << "\",\"cause_time_ps\":" << r.cause_t_ps << "}\n";
    }
    return os.str();
}

} // namespace qlink
