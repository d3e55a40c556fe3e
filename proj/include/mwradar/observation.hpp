#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "mwradar/clutter.hpp"
#include "mwradar/errors.hpp"
#include "mwradar/params.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/steering.hpp"
#include "mwradar/types.hpp"

namespace mwradar {

enum class Hypothesis { h0, h1 };

/// Full single-trial experiment description: array geometry, clutter model,
/// and target strength. snr_db is the per-sample ratio of signal power to
/// marginal clutter power, 10 log10(|alpha|^2 / R[0]).
struct Scenario {
    SteeringSpec steering{};
    ClutterSpec clutter{};
    double snr_db = -10.0;
    /// Target phase in radians; nullopt draws it uniformly once per trial.
    std::optional<double> target_phase{};

    int n() const { return steering.n(); }

    void validate() const {
        steering.validate();
        clutter.validate();
        if (!is_finite(snr_db)) throw validation_error("Scenario: snr_db must be finite");
        if (target_phase && !is_finite(*target_phase)) {
            throw validation_error("Scenario: target_phase must be finite");
        }
    }

    /// |alpha| implied by the SNR convention.
    double target_amplitude() const {
        return std::sqrt(std::pow(10.0, snr_db / 10.0) * clutter.marginal_power());
    }

    /// True parameter vector under H0 (alpha = 0).
    ParamVector truth_h0() const {
        return ParamVector::from({0.0, 0.0}, clutter.rho, clutter.law.sigma2);
    }
};

/// One synthesized snapshot x = alpha v + c together with the steering
/// vector and the generating truth (kept for oracle checks).
struct Observation {
    std::vector<cx> samples;
    std::vector<cx> steering;
    ParamVector truth{};
    Hypothesis hypothesis = Hypothesis::h0;

    int n() const { return static_cast<int>(samples.size()); }
};

/// Synthesis against a precomputed steering vector (campaign hot path; the
/// steering depends only on the grid point, not the trial).
/// RNG consumption order: target phase first (H1 with random phase only),
/// then the clutter run.
inline Observation synthesize_observation(const Scenario& scenario, Hypothesis hyp, Rng& rng,
                                          std::vector<cx> steering) {
    scenario.validate();
    if (static_cast<int>(steering.size()) != scenario.n()) {
        throw validation_error("synthesize_observation: steering length != M^2");
    }
    Observation obs;
    obs.hypothesis = hyp;

    cx alpha{0.0, 0.0};
    if (hyp == Hypothesis::h1) {
        const double phase = scenario.target_phase
                                 ? *scenario.target_phase
                                 : 2.0 * std::numbers::pi * rng.uniform();
        alpha = std::polar(scenario.target_amplitude(), phase);
    }
    obs.truth = ParamVector::from(alpha, scenario.clutter.rho, scenario.clutter.law.sigma2);

    obs.samples = simulate_clutter(scenario.clutter, scenario.n(), rng);
    if (hyp == Hypothesis::h1) {
        for (std::size_t i = 0; i < obs.samples.size(); ++i) {
            obs.samples[i] += alpha * steering[i];
        }
    }
    obs.steering = std::move(steering);
    return obs;
}

inline Observation synthesize_observation(const Scenario& scenario, Hypothesis hyp, Rng& rng) {
    return synthesize_observation(scenario, hyp, rng, build_steering(scenario.steering));
}

}  // namespace mwradar
