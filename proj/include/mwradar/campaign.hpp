#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/special.hpp"
#include "mwradar/wald.hpp"

// Campaign engine. Trials are embarrassingly parallel: each trial owns the
// stream (base_seed, stream_id(kind, point, trial)), so results depend only
// on the campaign descriptor, never on the worker count or schedule. Workers
// accumulate plain counts and the merge is a sum, which makes sweep CSVs
// byte-identical across 1/2/8-worker runs.

namespace mwradar {

enum class SweepMode { pfa, pd };

/// Experiment grid: the scenario template is replicated across every
/// (M, |rho|) pair; trial counts and the nominal false-alarm level complete
/// the descriptor.
struct Campaign {
    Scenario scenario{};
    std::vector<int> m_grid{10, 20, 30, 40, 50};
    std::vector<double> rho_abs_grid{0.3, 0.7, 0.9};
    long trials_h0 = 100000;
    long trials_h1 = 10000;
    std::uint64_t base_seed = 1729;
    double pfa_nominal = 1e-2;
    int noncentrality_trials = 500;
    /// Worker override for tests; 0 resolves MWRADAR_THREADS / hardware.
    int threads = 0;

    void validate() const {
        scenario.validate();
        if (m_grid.empty()) throw validation_error("Campaign: m_grid must not be empty");
        for (int m : m_grid) {
            if (m < 4) throw validation_error("Campaign: every M must be >= 4 (N >= 16)");
        }
        if (rho_abs_grid.empty()) {
            throw validation_error("Campaign: rho_abs_grid must not be empty");
        }
        for (double r : rho_abs_grid) {
            if (!is_finite(r) || r < 0.0 || r >= 1.0) {
                throw validation_error("Campaign: every |rho| must lie in [0,1)");
            }
        }
        if (trials_h0 < 0 || trials_h1 < 0) {
            throw validation_error("Campaign: trial counts must be >= 0");
        }
        if (!is_finite(pfa_nominal) || pfa_nominal <= 0.0 || pfa_nominal >= 1.0) {
            throw validation_error("Campaign: pfa_nominal must lie in (0,1)");
        }
        if (noncentrality_trials < 2) {
            throw validation_error("Campaign: noncentrality_trials must be >= 2");
        }
    }

    /// Scenario instantiated at one grid point; the clutter phase angle is
    /// taken from the template's rho, the magnitude from the grid.
    Scenario at_point(int m, double rho_abs) const {
        Scenario sc = scenario;
        sc.steering.m = m;
        const double angle = std::arg(scenario.clutter.rho);
        sc.clutter.rho = std::polar(rho_abs, angle);
        return sc;
    }

    /// Minimum H0 trials for ~100 expected false alarms per point.
    bool low_confidence_h0() const {
        return static_cast<double>(trials_h0) < 100.0 / pfa_nominal;
    }
};

/// Raw counts of one grid point (mergeable across workers).
struct PointCounts {
    int m = 0;
    double rho_abs = 0.0;
    long trials = 0;
    long rejections = 0;
    long degenerate = 0;
};

/// Per-worker tally with the campaign fingerprint it was produced under.
struct WorkerTally {
    std::uint64_t fingerprint = 0;
    std::vector<PointCounts> points;
};

/// One aggregated sweep row. `wall_seconds` and `failed` are in-memory
/// diagnostics: they never enter the CSV, whose bytes must depend only on
/// the campaign descriptor.
struct SweepResult {
    SweepMode mode = SweepMode::pfa;
    int m = 0;
    double rho_abs = 0.0;
    double nominal = 0.0;
    double empirical = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    double theory = 0.0;
    double degenerate_rate = 0.0;
    long trials = 0;
    bool low_confidence = false;
    bool failed = false;
    double wall_seconds = 0.0;
};

namespace detail {

inline void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
}

inline std::uint64_t double_bits(double d) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(d));
    std::memcpy(&u, &d, sizeof(u));
    return u;
}

inline std::uint64_t campaign_fingerprint(const Campaign& c, SweepMode mode) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    fnv_mix(h, static_cast<std::uint64_t>(mode));
    fnv_mix(h, static_cast<std::uint64_t>(c.scenario.steering.mode));
    fnv_mix(h, double_bits(c.scenario.steering.nu));
    fnv_mix(h, double_bits(c.scenario.steering.dt_over_lambda));
    fnv_mix(h, double_bits(c.scenario.steering.dr_over_lambda));
    fnv_mix(h, double_bits(std::arg(c.scenario.clutter.rho)));
    fnv_mix(h, static_cast<std::uint64_t>(c.scenario.clutter.law.kind));
    fnv_mix(h, double_bits(c.scenario.clutter.law.sigma2));
    fnv_mix(h, double_bits(c.scenario.clutter.law.shape));
    fnv_mix(h, static_cast<std::uint64_t>(c.scenario.clutter.burn_in));
    fnv_mix(h, double_bits(c.scenario.snr_db));
    fnv_mix(h, double_bits(c.scenario.target_phase.value_or(
                   std::numeric_limits<double>::quiet_NaN())));
    for (int m : c.m_grid) fnv_mix(h, static_cast<std::uint64_t>(m));
    for (double r : c.rho_abs_grid) fnv_mix(h, double_bits(r));
    fnv_mix(h, static_cast<std::uint64_t>(c.trials_h0));
    fnv_mix(h, static_cast<std::uint64_t>(c.trials_h1));
    fnv_mix(h, c.base_seed);
    fnv_mix(h, double_bits(c.pfa_nominal));
    fnv_mix(h, static_cast<std::uint64_t>(c.noncentrality_trials));
    return h;
}

inline int resolve_workers(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("MWRADAR_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<int>(std::min(v, 256L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

enum class TrialOutcome { accepted, rejected, degenerate };

inline TrialOutcome run_trial(const Scenario& sc, Hypothesis hyp, const std::vector<cx>& steering,
                              RngStream stream, double threshold) {
    Rng rng(stream);
    try {
        const Observation obs = synthesize_observation(sc, hyp, rng, steering);
        const DetectionOutcome out = wald_statistic(obs, threshold);
        return (out.decision == Hypothesis::h1) ? TrialOutcome::rejected : TrialOutcome::accepted;
    } catch (const estimation_error&) {
        return TrialOutcome::degenerate;  // includes singularity_error
    }
}

}  // namespace detail

/// 95% Wilson score interval for k successes in n trials. The interval
/// always contains the point estimate k/n, including at the k = 0 and
/// k = n edges where center -/+ half lands on it only up to roundoff.
inline std::pair<double, double> wilson_interval(long k, long n) {
    if (n <= 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    const double lo = std::min(std::max(center - half, 0.0), p);
    const double hi = std::max(std::min(center + half, 1.0), p);
    return {lo, hi};
}

/// Order-independent merge of per-worker tallies. All partials must carry
/// the same campaign fingerprint and point layout.
inline WorkerTally merge_tallies(const std::vector<WorkerTally>& partials) {
    if (partials.empty()) throw validation_error("merge_tallies: no partials");
    WorkerTally merged = partials.front();
    for (std::size_t i = 1; i < partials.size(); ++i) {
        const WorkerTally& t = partials[i];
        if (t.fingerprint != merged.fingerprint || t.points.size() != merged.points.size()) {
            throw validation_error("merge_tallies: mismatched campaign fingerprints");
        }
        for (std::size_t p = 0; p < merged.points.size(); ++p) {
            if (t.points[p].m != merged.points[p].m ||
                t.points[p].rho_abs != merged.points[p].rho_abs) {
                throw validation_error("merge_tallies: mismatched grid points");
            }
            merged.points[p].trials += t.points[p].trials;
            merged.points[p].rejections += t.points[p].rejections;
            merged.points[p].degenerate += t.points[p].degenerate;
        }
    }
    return merged;
}

/// Finalizes merged counts into sweep rows: empirical rates over the valid
/// (non-degenerate) trials, Wilson intervals, theory references, flags.
/// Degenerate trials are excluded from both numerator and denominator and
/// reported through degenerate_rate; a rate above 0.1% fails the point.
inline std::vector<SweepResult> aggregate(const Campaign& campaign, SweepMode mode,
                                          const std::vector<WorkerTally>& partials) {
    campaign.validate();
    const WorkerTally merged = merge_tallies(partials);
    if (merged.fingerprint != detail::campaign_fingerprint(campaign, mode)) {
        throw validation_error("aggregate: tallies do not match this campaign");
    }
    const double threshold = threshold_from_pfa(campaign.pfa_nominal);

    std::vector<SweepResult> rows;
    rows.reserve(merged.points.size());
    std::uint32_t point_idx = 0;
    for (const PointCounts& pc : merged.points) {
        SweepResult row;
        row.mode = mode;
        row.m = pc.m;
        row.rho_abs = pc.rho_abs;
        row.nominal = campaign.pfa_nominal;
        row.trials = pc.trials;
        const long valid = pc.trials - pc.degenerate;
        row.empirical = (valid > 0) ? static_cast<double>(pc.rejections) /
                                          static_cast<double>(valid)
                                    : std::numeric_limits<double>::quiet_NaN();
        const auto ci = wilson_interval(pc.rejections, valid);
        row.ci_lo = ci.first;
        row.ci_hi = ci.second;
        row.degenerate_rate =
            (pc.trials > 0)
                ? static_cast<double>(pc.degenerate) / static_cast<double>(pc.trials)
                : 0.0;
        row.failed = row.degenerate_rate > 1e-3;
        if (mode == SweepMode::pfa) {
            row.theory = campaign.pfa_nominal;  // asymptotic null law is exact chi^2_2
            row.low_confidence = campaign.low_confidence_h0();
        } else {
            const Scenario sc = campaign.at_point(pc.m, pc.rho_abs);
            const NoncentralityEstimate nc = estimate_noncentrality(
                sc, campaign.noncentrality_trials, campaign.base_seed, point_idx);
            row.theory = asymptotic_pd(nc.delta, threshold);
            row.low_confidence = false;
        }
        ++point_idx;
        rows.push_back(row);
    }
    return rows;
}

namespace detail {

inline std::vector<SweepResult> run_sweep(const Campaign& campaign, SweepMode mode) {
    campaign.validate();
    const long trials = (mode == SweepMode::pfa) ? campaign.trials_h0 : campaign.trials_h1;
    const Hypothesis hyp = (mode == SweepMode::pfa) ? Hypothesis::h0 : Hypothesis::h1;
    const StreamKind kind =
        (mode == SweepMode::pfa) ? StreamKind::h0_trial : StreamKind::h1_trial;
    const double threshold = threshold_from_pfa(campaign.pfa_nominal);
    const std::uint64_t fingerprint = campaign_fingerprint(campaign, mode);
    const int workers = resolve_workers(campaign.threads);

    if (trials == 0) return {};  // vacuous sweep: no rows, no error

    std::vector<WorkerTally> partials(static_cast<std::size_t>(workers));
    for (auto& t : partials) t.fingerprint = fingerprint;

    std::vector<double> walls;
    std::uint32_t point_idx = 0;
    for (double rho_abs : campaign.rho_abs_grid) {
        for (int m : campaign.m_grid) {
            const auto t_start = std::chrono::steady_clock::now();
            const Scenario sc = campaign.at_point(m, rho_abs);
            const std::vector<cx> steering = build_steering(sc.steering);

            auto work = [&](int w) {
                PointCounts pc;
                pc.m = m;
                pc.rho_abs = rho_abs;
                for (long t = w; t < trials; t += workers) {
                    const RngStream stream{campaign.base_seed,
                                           stream_id(kind, point_idx,
                                                     static_cast<std::uint64_t>(t))};
                    switch (run_trial(sc, hyp, steering, stream, threshold)) {
                        case TrialOutcome::rejected: ++pc.rejections; break;
                        case TrialOutcome::degenerate: ++pc.degenerate; break;
                        case TrialOutcome::accepted: break;
                    }
                    ++pc.trials;
                }
                partials[static_cast<std::size_t>(w)].points.push_back(pc);
            };
            if (workers == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(static_cast<std::size_t>(workers));
                for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
                for (auto& th : pool) th.join();
            }
            walls.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                          t_start)
                                .count());
            ++point_idx;
        }
    }

    std::vector<SweepResult> rows = aggregate(campaign, mode, partials);
    for (std::size_t i = 0; i < rows.size() && i < walls.size(); ++i) {
        rows[i].wall_seconds = walls[i];
    }
    return rows;
}

}  // namespace detail

/// H0 sweep: empirical false-alarm rate per grid point at the nominal-PFA
/// threshold. Deterministic given base_seed, regardless of parallelism.
inline std::vector<SweepResult> run_pfa_sweep(const Campaign& campaign) {
    return detail::run_sweep(campaign, SweepMode::pfa);
}

/// H1 sweep: empirical detection rate per grid point, paired with the
/// Marcum-Q asymptote evaluated at the noncentrality-oracle estimate.
inline std::vector<SweepResult> run_pd_sweep(const Campaign& campaign) {
    return detail::run_sweep(campaign, SweepMode::pd);
}

}  // namespace mwradar
