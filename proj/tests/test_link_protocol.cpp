#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlink/link_protocol.hpp"
#include "qlink/rng.hpp"
#include "qlink/units.hpp"

#include <algorithm>
#include <cmath>
#include <map>

using namespace qlink;

TEST_CASE("channel loss budgets") {
    const ChannelModel direct = deployed_link_direct();
    CHECK(direct.total_loss_db() == doctest::Approx(40.8));
    CHECK(direct.transmission() == doctest::Approx(std::pow(10.0, -4.08)).epsilon(1e-12));
    CHECK(direct.transmission() == doctest::Approx(8.3176e-5).epsilon(1e-4));

    const ChannelModel seg = deployed_link_segmented();
    CHECK(seg.total_loss_db() == doctest::Approx(24.1 + 19.7));
    // dB additivity equals multiplied transmissions
    CHECK(seg.transmission() ==
          doctest::Approx(db_to_transmission(24.1) * db_to_transmission(19.7)).epsilon(1e-12));

    double km = 0.0;
    for (const auto& s : seg.segments)
        km += s.length_km;
    CHECK(km == doctest::Approx(50.0));
}

TEST_CASE("channel transmit is pure attenuation without drift") {
    const ChannelModel c = deployed_link_direct();
    ChannelState st;
    auto rng = make_rng(1);
    const double out = channel_transmit(c, st, 0.1, rng);
    CHECK(out == doctest::Approx(0.1 * c.transmission()).epsilon(1e-12));
    CHECK(st.polarization_overlap == 1.0);
    CHECK(st.timing_offset_ns == 0.0);
    CHECK_THROWS_AS(channel_transmit(c, st, -0.1, rng), std::invalid_argument);
}

TEST_CASE("polarization drift decays the overlap until feedback resets it") {
    ChannelModel c = deployed_link_direct();
    c.polarization_drift_step = 1e-3;
    ChannelState st;
    auto rng = make_rng(2);
    for (int i = 0; i < 1000; ++i)
        channel_transmit(c, st, 0.1, rng);
    CHECK(st.polarization_overlap < 1.0);
    polarization_feedback(st, 0.005);
    CHECK(st.polarization_overlap == doctest::Approx(0.995));
}

TEST_CASE("short runs emit a single data period") {
    LinkConfig cfg = default_link_config();
    cfg.qubits_per_data_period = 10;
    // 100 us < one 500 us data period
    const TransmitterOutput out = run_transmitter(cfg, 100e-6, 3);

    REQUIRE(out.commands.size() == 2);
    CHECK(out.commands[0].type == CommandType::DataStart);
    CHECK(out.commands[0].t_ps == 0);
    CHECK(out.commands[1].type == CommandType::EndOfRun);
    REQUIRE(out.pulses.size() == 10);

    const auto spacing_ps = static_cast<std::int64_t>(std::llround(cfg.qubit_spacing_ns * 1e3));
    for (std::size_t i = 0; i < out.pulses.size(); ++i) {
        CHECK(out.pulses[i].kind == PulseKind::Qubit);
        CHECK(out.pulses[i].t_ps == static_cast<std::int64_t>(i + 1) * spacing_ps);
        // launch amplitude compensates the channel so the device sees 0.1
        CHECK(out.pulses[i].mean_photon_number * cfg.channel.transmission() ==
              doctest::Approx(cfg.mean_photon_at_device).epsilon(1e-12));
    }
}

TEST_CASE("long runs alternate data and stabilization periods") {
    LinkConfig cfg = default_link_config();
    cfg.qubits_per_data_period = 5;
    const TransmitterOutput out = run_transmitter(cfg, 2.1e-3, 4);

    // 2.1 ms / 500 us periods -> D S D S D, then EndOfRun
    std::vector<CommandType> kinds;
    for (const auto& c : out.commands)
        kinds.push_back(c.type);
    const std::vector<CommandType> expect = {
        CommandType::DataStart, CommandType::StabilizeStart, CommandType::DataStart,
        CommandType::StabilizeStart, CommandType::DataStart, CommandType::EndOfRun};
    CHECK(kinds == expect);

    int refs = 0, qubits = 0;
    for (const auto& p : out.pulses) {
        if (p.kind == PulseKind::Reference) {
            ++refs;
            CHECK(p.mean_photon_number == doctest::Approx(cfg.reference_pulse_amplitude));
        } else {
            ++qubits;
        }
    }
    CHECK(refs == 2 * cfg.reference_pulses_per_period);
    CHECK(qubits == 3 * cfg.qubits_per_data_period);
    CHECK(std::is_sorted(out.pulses.begin(), out.pulses.end(),
                         [](const auto& a, const auto& b) { return a.t_ps < b.t_ps; }));
}

namespace {

LinkConfig bench_config() {
    // lossless bench variant: keeps run times short while exercising the
    // same sequencer logic
    LinkConfig cfg = default_link_config();
    cfg.channel.segments = {{0.0, 0.0}};
    cfg.channel.polarization_drift_step = 0.0;
    cfg.receiver_path_efficiency = 1.0;
    cfg.qubits_per_data_period = 20;
    return cfg;
}

} // namespace

TEST_CASE("receiver processes a clean run without faults") {
    LinkConfig cfg = bench_config();
    cfg.mean_photon_at_device = 50.0; // saturate arrivals so heralds show up fast
    const SpinCavityModel spin;
    const TransmitterOutput tx = run_transmitter(cfg, 2.1e-3, 5);
    const ReceiverResult rx = run_receiver(cfg, tx, spin, 6);

    for (const auto& t : rx.trace.transitions)
        CHECK(t.to != SeqState::Fault);
    CHECK(rx.outcomes.size() == 60); // every qubit of three data periods processed
    CHECK(rx.heralds > 0);
    CHECK(rx.correct <= rx.heralds);

    // liveness: both machines end Idle after EndOfRun
    SeqState main_final = SeqState::Idle, siv_final = SeqState::Idle;
    for (const auto& t : rx.trace.transitions) {
        (t.machine == Machine::MainSequencer ? main_final : siv_final) = t.to;
    }
    CHECK(main_final == SeqState::Idle);
    CHECK(siv_final == SeqState::Idle);
}

TEST_CASE("reference light outside stabilization trips the fault latch") {
    const LinkConfig cfg = bench_config();
    const SpinCavityModel spin;

    TransmitterOutput tx;
    tx.commands.push_back({0, CommandType::DataStart, 1, 1});
    tx.pulses.push_back({1'000'000, PulseKind::Reference, PhotonInput::Early, 1e4, 2});
    tx.pulses.push_back({2'000'000, PulseKind::Qubit, PhotonInput::Early, 0.1, 3});
    tx.commands.push_back({3'000'000, CommandType::EndOfRun, 0, 4});

    const ReceiverResult rx = run_receiver(cfg, tx, spin, 7);
    bool faulted = false;
    for (const auto& t : rx.trace.transitions)
        if (t.to == SeqState::Fault)
            faulted = true;
    CHECK(faulted);
    // the stray reference is never routed anywhere, and the later qubit is dropped
    CHECK(rx.trace.routing.empty());
    CHECK(rx.outcomes.empty());
}

TEST_CASE("qubits before any data command fault the sequencer") {
    const LinkConfig cfg = bench_config();
    TransmitterOutput tx;
    tx.pulses.push_back({100, PulseKind::Qubit, PhotonInput::Plus, 0.1, 1});
    tx.commands.push_back({200, CommandType::EndOfRun, 0, 2});
    const ReceiverResult rx = run_receiver(cfg, tx, SpinCavityModel{}, 8);
    REQUIRE_FALSE(rx.trace.transitions.empty());
    CHECK(rx.trace.transitions.front().to == SeqState::Fault);
}

TEST_CASE("malformed commands fault the sequencer") {
    const LinkConfig cfg = bench_config();
    TransmitterOutput tx;
    tx.commands.push_back({0, CommandType::Malformed, 0, 1});
    tx.commands.push_back({100, CommandType::DataStart, 5, 2});
    const ReceiverResult rx = run_receiver(cfg, tx, SpinCavityModel{}, 9);
    REQUIRE(rx.trace.transitions.size() == 1); // faulted runs ignore later commands
    CHECK(rx.trace.transitions[0].to == SeqState::Fault);
}

TEST_CASE("routing safety and causality over randomized runs") {
    const SpinCavityModel spin;
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        LinkConfig cfg = bench_config();
        cfg.qubits_per_data_period = 10 + static_cast<int>(seed);
        const TransmitterOutput tx = run_transmitter(cfg, 3.3e-3, seed);
        const ReceiverResult rx = run_receiver(cfg, tx, spin, seed + 100);

        // reconstruct the main sequencer state at each routing decision
        std::map<std::int64_t, SeqState> main_at;
        SeqState cur = SeqState::Idle;
        std::size_t ti = 0;
        for (const auto& r : rx.trace.routing) {
            while (ti < rx.trace.transitions.size() &&
                   rx.trace.transitions[ti].t_ps <= r.t_ps) {
                if (rx.trace.transitions[ti].machine == Machine::MainSequencer)
                    cur = rx.trace.transitions[ti].to;
                ++ti;
            }
            if (r.kind == PulseKind::Reference) {
                CHECK(r.routed == Routing::ReferencePath);
                CHECK(cur == SeqState::Stabilize);
            } else {
                CHECK(r.routed == Routing::QubitPath);
                CHECK(cur == SeqState::DataQubits);
            }
        }

        // strict causality: every transition postdates its cause
        std::int64_t prev_t = -1;
        for (const auto& t : rx.trace.transitions) {
            CHECK(t.t_ps > t.cause_t_ps);
            CHECK(t.t_ps >= prev_t);
            prev_t = t.t_ps;
        }
    }
}

TEST_CASE("replaying a run reproduces the trace byte for byte") {
    const LinkConfig cfg = bench_config();
    const SpinCavityModel spin;
    const TransmitterOutput tx = run_transmitter(cfg, 2.1e-3, 30);
    const ReceiverResult a = run_receiver(cfg, tx, spin, 31);
    const ReceiverResult b = run_receiver(cfg, tx, spin, 31);
    CHECK(trace_to_ldjson(a.trace) == trace_to_ldjson(b.trace));
    CHECK(a.heralds == b.heralds);
    CHECK(a.correct == b.correct);

    const std::string text = trace_to_ldjson(a.trace);
    const auto lines = std::count(text.begin(), text.end(), '\n');
    CHECK(static_cast<std::size_t>(lines) == a.trace.transitions.size());
}

TEST_CASE("failed initialization skips the qubit train but keeps routing") {
    LinkConfig cfg = bench_config();
    SpinCavityModel spin;
    spin.init_fidelity = 0.0; // initialization can never succeed
    spin.lambda_down = 0.01;
    cfg.init_max_attempts = 3;

    const TransmitterOutput tx = run_transmitter(cfg, 100e-6, 40);
    const ReceiverResult rx = run_receiver(cfg, tx, spin, 41);
    CHECK(rx.outcomes.empty());
    CHECK(rx.heralds == 0);
    // the pulses still traverse the qubit path safely
    CHECK(rx.trace.routing.size() == static_cast<std::size_t>(cfg.qubits_per_data_period));
    bool skipped = false;
    for (const auto& t : rx.trace.transitions)
        if (t.cause == "init_exhausted:train_skipped")
            skipped = true;
    CHECK(skipped);
}

TEST_CASE("configuration validation") {
    LinkConfig cfg = default_link_config();
    cfg.qubit_fwhm_ns = 200.0; // wider than the bin separation
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_link_config();
    cfg.receiver_path_efficiency = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = default_link_config();
    cfg.channel.segments.push_back({1.0, -3.0});
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
