#include "qlink/spin_node.hpp"

#include "qlink/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qlink {

namespace {

// P(Poisson(lambda) <= k), exact finite sum via the pmf recurrence.
double poisson_cdf(double lambda, int k) {
    if (k < 0)
        return 0.0;
    if (lambda == 0.0)
        return 1.0;
    double term = std::exp(-lambda);
    double sum = term;
    for (int i = 1; i <= k; ++i) {
        term *= lambda / i;
        sum += term;
    }
    return std::min(sum, 1.0);
}

double poisson_tail_above(double lambda, int k) {
    // 1 - CDF(k); summed directly when the tail is small to avoid cancellation
    const double cdf = poisson_cdf(lambda, k);
    if (cdf < 0.5)
        return 1.0 - cdf;
    double term = std::exp(-lambda);
    for (int i = 1; i <= k + 1; ++i)
        term *= lambda / i;
    double sum = 0.0;
    int i = k + 1;
    while (term > sum * 1e-15 + 1e-300) {
        sum += term;
        ++i;
        term *= lambda / i;
    }
    return sum;
}

SpinState flipped(SpinState s) { return s == SpinState::Up ? SpinState::Down : SpinState::Up; }

} // namespace

void SpinCavityModel::validate() const {
    if (!(lambda_up > lambda_down) || lambda_down < 0.0)
        throw std::invalid_argument("readout requires lambda_up > lambda_down >= 0");
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(init_fidelity) || !in_unit(pi_pulse_fidelity))
        throw std::invalid_argument("fidelities must lie in [0,1]");
    if (!(reflect_up > reflect_down) || reflect_down < 0.0)
        throw std::invalid_argument("reflectivities require reflect_up > reflect_down >= 0");
    if (reflect_up > 1.0)
        throw std::invalid_argument("reflectivities must not exceed 1");
    if (threshold < 0 || pi_pulses_per_transfer < 0)
        throw std::invalid_argument("threshold and pulse count must be non-negative");
}

ReadoutResult single_shot_readout(const SpinCavityModel& model, SpinState true_state,
                                  std::mt19937_64& rng) {
    const double lambda = true_state == SpinState::Up ? model.lambda_up : model.lambda_down;
    int counts = 0;
    if (lambda > 0.0) {
        std::poisson_distribution<int> pois(lambda);
        counts = pois(rng);
    }
    return {counts > model.threshold ? SpinState::Up : SpinState::Down, counts};
}

double readout_error_for_state(const SpinCavityModel& model, SpinState state) {
    if (state == SpinState::Up)
        return poisson_cdf(model.lambda_up, model.threshold);
    return poisson_tail_above(model.lambda_down, model.threshold);
}

double readout_error_analytic(const SpinCavityModel& model) {
    return 0.5 * (readout_error_for_state(model, SpinState::Up) +
                  readout_error_for_state(model, SpinState::Down));
}

InitResult run_initialization(const SpinCavityModel& model, SpinState target,
                              int max_attempts, std::mt19937_64& rng) {
    if (max_attempts < 1)
        throw std::invalid_argument("max_attempts must be at least 1");

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    // Running contrast estimate from the check-bin counts themselves.
    double high_sum = 0.0, low_sum = 0.0;
    std::uint64_t high_n = 0, low_n = 0;

    InitResult res;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        res.attempts_used = attempt;
        const SpinState actual =
            uni(rng) < model.init_fidelity ? target : flipped(target);

        const double lambda = actual == SpinState::Up ? model.lambda_up : model.lambda_down;
        int counts = 0;
        if (lambda > 0.0) {
            std::poisson_distribution<int> pois(lambda);
            counts = pois(rng);
        }

        if (counts > model.check_accept_up_above) {
            high_sum += counts;
            ++high_n;
        } else if (counts < model.check_accept_down_below) {
            low_sum += counts;
            ++low_n;
        }

        const bool counts_ok = target == SpinState::Down
                                   ? counts < model.check_accept_down_below
                                   : counts > model.check_accept_up_above;
        bool contrast_ok = true;
        if (high_n > 0 && low_n > 0 && low_sum > 0.0)
            contrast_ok = (high_sum / high_n) / (low_sum / low_n) > model.required_contrast;

        if (counts_ok && contrast_ok) {
            res.success = true;
            return res;
        }
    }
    return res;
}

double sequence_fidelity(const SpinCavityModel& model, int n_pi_pulses) {
    if (n_pi_pulses < 0)
        throw std::invalid_argument("pulse count must be non-negative");
    return model.init_fidelity * std::pow(model.pi_pulse_fidelity, n_pi_pulses);
}

namespace {

struct InputTraits {
    MeasureBasis basis;
    SpinState expected; // spin outcome correlated with the input, post-rotation
};

InputTraits traits(PhotonInput input) {
    switch (input) {
    case PhotonInput::Early: return {MeasureBasis::Z, SpinState::Down};
    case PhotonInput::Late:  return {MeasureBasis::Z, SpinState::Up};
    case PhotonInput::Plus:  return {MeasureBasis::X, SpinState::Down};
    case PhotonInput::Minus: return {MeasureBasis::X, SpinState::Up};
    }
    throw std::logic_error("unreachable");
}

} // namespace

TransferOutcome transfer_trial(const SpinCavityModel& model, PhotonInput input,
                               std::mt19937_64& rng, double arrival_probability) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const InputTraits tr = traits(input);

    TransferOutcome out;
    out.photon_basis = tr.basis;

    // Herald: reflection off either spin branch reaches the TDI.
    const double herald_p =
        arrival_probability * 0.5 * (model.reflect_up + model.reflect_down);
    if (uni(rng) >= herald_p)
        return out;
    out.heralded = true;

    // Residual-reflectivity error branch: the photon bounced off the dark
    // state. A Z correlation survives as a coin flip; an X parity flips.
    const double p_err = model.reflect_down / (model.reflect_up + model.reflect_down);
    bool outcome_correct = true;
    if (uni(rng) < p_err)
        outcome_correct = tr.basis == MeasureBasis::Z ? uni(rng) < 0.5 : false;

    // Gate errors across the interaction + readout-rotation sequence.
    if (uni(rng) >= sequence_fidelity(model, model.pi_pulses_per_transfer))
        outcome_correct = !outcome_correct;

    const SpinState post_spin = outcome_correct ? tr.expected : flipped(tr.expected);
    out.spin_readout = single_shot_readout(model, post_spin, rng).measured;
    out.correct = out.spin_readout == tr.expected;
    return out;
}

FidelityResult transfer_fidelity(const SpinCavityModel& model, int trials_per_state,
                                 std::uint64_t seed) {
    if (trials_per_state < 100)
        throw std::invalid_argument("need at least 100 trials per input state");

    constexpr PhotonInput kInputs[] = {PhotonInput::Early, PhotonInput::Late,
                                       PhotonInput::Plus, PhotonInput::Minus};
    FidelityResult res;
    double fidelity_sum = 0.0;
    double var_sum = 0.0;
    for (int s = 0; s < 4; ++s) {
        auto rng = make_rng(splitmix64(seed) + static_cast<std::uint64_t>(s));
        std::uint64_t heralds = 0, correct = 0;
        for (int t = 0; t < trials_per_state; ++t) {
            const TransferOutcome out = transfer_trial(model, kInputs[s], rng);
            if (out.heralded) {
                ++heralds;
                if (out.correct)
                    ++correct;
            }
        }
        res.heralds += heralds;
        if (heralds == 0) {
            res.flagged = true;
            continue;
        }
        const double p = static_cast<double>(correct) / static_cast<double>(heralds);
        fidelity_sum += p;
        var_sum += p * (1.0 - p) / static_cast<double>(heralds);
    }
    res.fidelity = fidelity_sum / 4.0;
    res.sigma = std::sqrt(var_sum) / 4.0;
    return res;
}

double transfer_fidelity_analytic(const SpinCavityModel& model) {
    const double p_err = model.reflect_down / (model.reflect_up + model.reflect_down);
    const double f_refl_z = 1.0 - p_err / 2.0;
    const double f_refl_x = 1.0 - p_err;

    const double e_seq = 1.0 - sequence_fidelity(model, model.pi_pulses_per_transfer);
    const double e_up = readout_error_for_state(model, SpinState::Up);
    const double e_down = readout_error_for_state(model, SpinState::Down);
    const double e_ro = 0.5 * (e_up + e_down);
    const double e_flip = e_seq * (1.0 - e_ro) + (1.0 - e_seq) * e_ro;

    const double f_z = f_refl_z * (1.0 - e_flip) + (1.0 - f_refl_z) * e_flip;
    const double f_x = f_refl_x * (1.0 - e_flip) + (1.0 - f_refl_x) * e_flip;
    return 0.5 * (f_z + f_x);
}

} // namespace qlink
