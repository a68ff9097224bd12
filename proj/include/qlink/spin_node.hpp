#pragma once

#include <cstdint>
#include <random>

namespace qlink {

enum class SpinState { Up, Down };
enum class PhotonInput { Early, Late, Plus, Minus };
enum class MeasureBasis { Z, X };

struct SpinCavityModel {
    double lambda_up = 39.1;   // mean counts per readout bin, bright state
    double lambda_down = 3.86; // mean counts per readout bin, residual
    double readout_bin_us = 1000.0;
    int threshold = 15; // counts strictly above -> Up

    double init_fidelity = 0.973;
    double pi_pulse_fidelity = 0.995;
    int pi_pulses_per_transfer = 8; // decoupling pulses in the interaction sequence

    // amplitude-squared reflectivities, tied by default to the count means
    double reflect_up = 0.391;
    double reflect_down = 0.0386;

    // initialization check (100 us bin): accept Down below, Up above
    double check_bin_us = 100.0;
    int check_accept_down_below = 2;
    int check_accept_up_above = 20;
    double required_contrast = 10.0;

    void validate() const;
    double contrast() const { return lambda_down / lambda_up; }
};

struct ReadoutResult {
    SpinState measured = SpinState::Down;
    int counts = 0;
};

ReadoutResult single_shot_readout(const SpinCavityModel& model, SpinState true_state,
                                  std::mt19937_64& rng);

// State-averaged misclassification probability from exact Poisson tail sums.
double readout_error_analytic(const SpinCavityModel& model);
double readout_error_for_state(const SpinCavityModel& model, SpinState state);

struct InitResult {
    int attempts_used = 0;
    bool success = false;
};

InitResult run_initialization(const SpinCavityModel& model, SpinState target,
                              int max_attempts, std::mt19937_64& rng);

// Product error model for the init + decoupling sequence.
double sequence_fidelity(const SpinCavityModel& model, int n_pi_pulses);

struct TransferOutcome {
    bool heralded = false;
    MeasureBasis photon_basis = MeasureBasis::Z;
    SpinState spin_readout = SpinState::Down;
    bool correct = false;
};

// One heralded state-transfer attempt with the photon arriving with
// probability arrival_probability (1.0 for a bench-top trial).
TransferOutcome transfer_trial(const SpinCavityModel& model, PhotonInput input,
                               std::mt19937_64& rng, double arrival_probability = 1.0);

struct FidelityResult {
    double fidelity = 0.0;
    double sigma = 0.0;
    std::uint64_t heralds = 0;
    bool flagged = false; // some input state produced zero heralds
};

FidelityResult transfer_fidelity(const SpinCavityModel& model, int trials_per_state,
                                 std::uint64_t seed);

// Closed-form branching-model fidelity (the oracle the simulation must match).
double transfer_fidelity_analytic(const SpinCavityModel& model);

} // namespace qlink
