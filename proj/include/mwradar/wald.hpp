#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/estimator.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/sandwich.hpp"
#include "mwradar/special.hpp"

namespace mwradar {

struct WaldDiagnostics {
    ConvergenceReport mle{};
    double cond_a = 0.0;        // condition estimate of A_N
    double cond_block = 0.0;    // condition of the 2x2 amplitude block
    bool pseudo_solve = false;  // spectral fallback used for the 2x2 block
};

/// Outcome of one threshold test. decision == h1 iff statistic > threshold.
struct DetectionOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    Hypothesis decision = Hypothesis::h0;
    ParamVector theta_hat{};
    WaldDiagnostics diagnostics{};
};

namespace detail {

/// Quadratic form q = N a^T block^{-1} a for a symmetric 2x2 block.
/// Solved in closed form when the block is comfortably positive definite;
/// near-singular blocks fall back to a spectral pseudo-solve (flagged via
/// *pseudo), and non-PD blocks raise singularity_error so campaign code can
/// count the trial as degenerate instead of crashing.
inline double block_quadratic(double n, const Vec2& a, const Mat2& block, double* cond_out,
                              bool* pseudo) {
    const double tr = block(0, 0) + block(1, 1);
    const double det = block(0, 0) * block(1, 1) - block(0, 1) * block(1, 0);
    const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
    const double ev_min = tr / 2.0 - disc;
    const double ev_max = tr / 2.0 + disc;
    if (!(ev_min > 0.0)) {
        throw singularity_error("wald: amplitude block of C_N is not positive definite",
                                (ev_min == 0.0) ? std::numeric_limits<double>::infinity()
                                                : ev_max / ev_min);
    }
    const double cond = ev_max / ev_min;
    if (cond_out) *cond_out = cond;
    if (cond > 1e12) {
        // spectral pseudo-solve: invert along well-determined directions only
        if (pseudo) *pseudo = true;
        Eigen::SelfAdjointEigenSolver<Mat2> eig(block);
        double q = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ev = eig.eigenvalues()(i);
            if (ev > ev_max * 1e-14) {
                const double proj = eig.eigenvectors().col(i).dot(a);
                q += proj * proj / ev;
            }
        }
        return n * q;
    }
    if (pseudo) *pseudo = false;
    const double inv_det = 1.0 / det;
    const double q = (a(0) * (block(1, 1) * a(0) - block(0, 1) * a(1)) +
                      a(1) * (block(0, 0) * a(1) - block(1, 0) * a(0))) *
                     inv_det;
    return n * std::max(q, 0.0);
}

}  // namespace detail

/// Noncentrality quadratic form delta = N abar^T block^{-1} abar.
inline double noncentrality_quadratic(double n, const Vec2& alpha, const Mat2& block) {
    return detail::block_quadratic(n, alpha, block, nullptr, nullptr);
}

/// Full detection pipeline on one observation: estimate theta, build the
/// plug-in sandwich, evaluate Lambda = N alpha_hat^T (J C_N J^T)^{-1}
/// alpha_hat and compare against the threshold.
inline DetectionOutcome wald_statistic(const Observation& obs, double threshold,
                                       const EstimatorOptions& est_opts = {}) {
    if (!is_finite(threshold) || threshold < 0.0) {
        throw std::domain_error("wald_statistic: threshold must be finite and >= 0");
    }
    MmlEstimate est = mml_estimate(obs, std::nullopt, est_opts);
    if (!est.report.converged) {
        throw estimation_error("wald_statistic: MML estimate did not converge");
    }

    DetectionOutcome out;
    out.theta_hat = est.theta;
    out.diagnostics.mle = est.report;
    out.threshold = threshold;

    const SandwichMatrices sm = sandwich(est.theta, obs);
    out.diagnostics.cond_a = sm.cond_a;

    const Vec2 alpha_hat{est.theta[0], est.theta[1]};
    const Mat2 block = sm.c_n.topLeftCorner<2, 2>();
    out.statistic =
        detail::block_quadratic(static_cast<double>(obs.n()), alpha_hat, block,
                                &out.diagnostics.cond_block, &out.diagnostics.pseudo_solve);
    out.decision = (out.statistic > out.threshold) ? Hypothesis::h1 : Hypothesis::h0;
    return out;
}

/// Same test with the threshold set from the asymptotic null law.
inline DetectionOutcome wald_statistic_pfa(const Observation& obs, double pfa,
                                           const EstimatorOptions& est_opts = {}) {
    return wald_statistic(obs, threshold_from_pfa(pfa), est_opts);
}

/// Monte Carlo estimate of the noncentrality delta = N abar^T
/// (J C_{H0} J^T)^{-1} abar of the asymptotic alternative law.
struct NoncentralityEstimate {
    double delta = 0.0;
    double se = 0.0;  // standard error from the spread across realizations
    int realizations = 0;
    Mat2 mean_block = Mat2::Zero();
};

/// C_{H0} has no closed form under unknown innovations; it is estimated by
/// averaging the plug-in sandwich at the true H0 parameter over `realizations`
/// independent H0 draws of length N. The quadratic form is then evaluated at
/// the averaged matrix; per-realization values provide the standard error.
/// The true target amplitude uses the scenario's fixed phase (0 if unset).
inline NoncentralityEstimate estimate_noncentrality(const Scenario& scenario, int realizations,
                                                    std::uint64_t seed, std::uint32_t point = 0) {
    scenario.validate();
    if (realizations < 2) {
        throw validation_error("estimate_noncentrality: needs >= 2 realizations");
    }
    const double n = static_cast<double>(scenario.n());
    const ParamVector truth = scenario.truth_h0();
    const double amp = scenario.target_amplitude();
    const double phase = scenario.target_phase.value_or(0.0);
    const Vec2 alpha_bar{amp * std::cos(phase), amp * std::sin(phase)};

    const std::vector<cx> steering = build_steering(scenario.steering);
    NoncentralityEstimate out;
    out.realizations = realizations;

    std::vector<double> deltas;
    deltas.reserve(static_cast<std::size_t>(realizations));
    Mat2 mean_block = Mat2::Zero();
    for (int r = 0; r < realizations; ++r) {
        Rng rng({seed, stream_id(StreamKind::noncentrality, point, static_cast<std::uint64_t>(r))});
        const Observation obs =
            synthesize_observation(scenario, Hypothesis::h0, rng, steering);
        const SandwichMatrices sm = sandwich(truth, obs);
        const Mat2 block = sm.c_n.topLeftCorner<2, 2>();
        mean_block += block;
        deltas.push_back(noncentrality_quadratic(n, alpha_bar, block));
    }
    mean_block /= static_cast<double>(realizations);
    out.mean_block = mean_block;
    out.delta = noncentrality_quadratic(n, alpha_bar, mean_block);

    double mean = 0.0;
    for (double d : deltas) mean += d;
    mean /= static_cast<double>(realizations);
    double var = 0.0;
    for (double d : deltas) var += (d - mean) * (d - mean);
    var /= static_cast<double>(realizations - 1);
    out.se = std::sqrt(var / static_cast<double>(realizations));
    return out;
}

/// Asymptotic detection probability P_D = Q1(sqrt(delta), sqrt(threshold)).
inline double asymptotic_pd(double delta, double threshold) {
    if (!is_finite(delta) || !is_finite(threshold) || delta < 0.0 || threshold < 0.0) {
        throw std::domain_error("asymptotic_pd: arguments must be finite and >= 0");
    }
    return marcum_q1(std::sqrt(delta), std::sqrt(threshold));
}

}  // namespace mwradar
