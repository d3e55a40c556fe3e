// mwradar CLI: single-snapshot misspecified-Wald detection in AR(1) clutter.
//
// Subcommands:
//   simulate   write one synthesized observation as CSV
//   detect     estimate + threshold-test one observation, print a record
//   sweep      Monte Carlo PFA/PD sweep over the (M, |rho|) grid -> CSV
//   theory     asymptotic noncentrality/PD reference table -> CSV
//
// Exit codes: 0 success, 2 validation error, 3 estimation failure,
// 4 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mwradar/mwradar.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials_h0;
    std::optional<long> trials_h1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("CONFIG", opts.config_path, "configuration file (JSON), positional");
    cmd->add_option("--config", opts.config_path, "configuration file (JSON)");
    cmd->add_option("--preset", opts.preset, "campaign preset")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--seed", opts.seed, "override the base seed");
    cmd->add_option("--trials-h0", opts.trials_h0, "override the H0 trial count");
    cmd->add_option("--trials-h1", opts.trials_h1, "override the H1 trial count");
}

mwradar::ConfigDocument resolve_config(const CommonOpts& opts) {
    mwradar::ConfigDocument cfg;
    if (!opts.config_path.empty()) cfg = mwradar::ConfigDocument::load(opts.config_path);
    if (opts.preset == "paper") cfg.apply_preset(mwradar::Preset::paper);
    if (opts.preset == "desk") cfg.apply_preset(mwradar::Preset::desk);
    if (opts.seed) cfg.base_seed = *opts.seed;
    if (opts.trials_h0) cfg.trials_h0 = *opts.trials_h0;
    if (opts.trials_h1) cfg.trials_h1 = *opts.trials_h1;
    cfg.validate();
    return cfg;
}

void print_outcome(const mwradar::DetectionOutcome& out) {
    using mwradar::fmt17;
    std::cout << "statistic=" << fmt17(out.statistic) << "\n";
    std::cout << "threshold=" << fmt17(out.threshold) << "\n";
    std::cout << "decision=" << (out.decision == mwradar::Hypothesis::h1 ? "h1" : "h0") << "\n";
    std::cout << "theta_hat_alpha_re=" << fmt17(out.theta_hat[0]) << "\n";
    std::cout << "theta_hat_alpha_im=" << fmt17(out.theta_hat[1]) << "\n";
    std::cout << "theta_hat_rho_re=" << fmt17(out.theta_hat[2]) << "\n";
    std::cout << "theta_hat_rho_im=" << fmt17(out.theta_hat[3]) << "\n";
    std::cout << "theta_hat_sigma2=" << fmt17(out.theta_hat[4]) << "\n";
    std::cout << "mle_converged=" << (out.diagnostics.mle.converged ? 1 : 0) << "\n";
    std::cout << "mle_iterations=" << out.diagnostics.mle.iterations << "\n";
    std::cout << "mle_grad_norm=" << fmt17(out.diagnostics.mle.grad_norm) << "\n";
    std::cout << "cond_a=" << fmt17(out.diagnostics.cond_a) << "\n";
    std::cout << "cond_block=" << fmt17(out.diagnostics.cond_block) << "\n";
    std::cout << "pseudo_solve=" << (out.diagnostics.pseudo_solve ? 1 : 0) << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"misspecified-Wald MIMO radar detector and Monte Carlo harness"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    CommonOpts sim_opts;
    std::string sim_hypothesis = "h0";
    std::string sim_out;
    CLI::App* sim = app.add_subcommand("simulate", "synthesize one observation");
    add_common(sim, sim_opts);
    sim->add_option("--hypothesis", sim_hypothesis, "h0 or h1")
        ->check(CLI::IsMember({"h0", "h1"}));
    sim->add_option("--out", sim_out, "output CSV path")->required();

    // --- detect -----------------------------------------------------------
    CommonOpts det_opts;
    std::string det_in;
    std::string det_hypothesis = "h0";
    std::optional<double> det_pfa;
    CLI::App* det = app.add_subcommand("detect", "run the detector on one observation");
    add_common(det, det_opts);
    det->add_option("--in", det_in, "observation CSV (otherwise synthesized from config)");
    det->add_option("--hypothesis", det_hypothesis, "hypothesis when synthesizing")
        ->check(CLI::IsMember({"h0", "h1"}));
    det->add_option("--pfa", det_pfa, "false-alarm level for the threshold");

    // --- sweep ------------------------------------------------------------
    CommonOpts sweep_opts;
    std::string sweep_mode = "pfa";
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over the (M,|rho|) grid");
    add_common(sweep, sweep_opts);
    sweep->add_option("--mode", sweep_mode, "pfa or pd")
        ->check(CLI::IsMember({"pfa", "pd"}))
        ->required();
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    // --- theory -----------------------------------------------------------
    CommonOpts theory_opts;
    std::string theory_out;
    CLI::App* theory = app.add_subcommand("theory", "asymptotic PD reference table");
    add_common(theory, theory_opts);
    theory->add_option("--out", theory_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (sim->parsed()) {
        const auto cfg = resolve_config(sim_opts);
        const mwradar::Scenario sc = cfg.make_single_scenario();
        const auto hyp =
            sim_hypothesis == "h1" ? mwradar::Hypothesis::h1 : mwradar::Hypothesis::h0;
        mwradar::Rng rng({cfg.base_seed,
                          mwradar::stream_id(mwradar::StreamKind::single, 0, 0)});
        const mwradar::Observation obs = mwradar::synthesize_observation(sc, hyp, rng);
        mwradar::write_observation_csv(sim_out, obs);
        std::cerr << "wrote " << obs.n() << " rows to " << sim_out << "\n";
        return kExitOk;
    }

    if (det->parsed()) {
        const auto cfg = resolve_config(det_opts);
        const double pfa = det_pfa.value_or(cfg.pfa_nominal);
        const double threshold = mwradar::threshold_from_pfa(pfa);
        mwradar::Observation obs;
        if (!det_in.empty()) {
            obs = mwradar::read_observation_csv(det_in);
        } else {
            const mwradar::Scenario sc = cfg.make_single_scenario();
            const auto hyp =
                det_hypothesis == "h1" ? mwradar::Hypothesis::h1 : mwradar::Hypothesis::h0;
            mwradar::Rng rng({cfg.base_seed,
                              mwradar::stream_id(mwradar::StreamKind::single, 0, 0)});
            obs = mwradar::synthesize_observation(sc, hyp, rng);
        }
        try {
            const mwradar::DetectionOutcome out = mwradar::wald_statistic(obs, threshold);
            print_outcome(out);
        } catch (const mwradar::estimation_error& e) {
            // still a machine-readable record, then the estimation exit code
            std::cout << "error_class=estimation\n";
            std::cout << "error=" << e.what() << "\n";
            std::cout << "threshold=" << mwradar::fmt17(threshold) << "\n";
            throw;
        }
        return kExitOk;
    }

    if (sweep->parsed()) {
        const auto cfg = resolve_config(sweep_opts);
        mwradar::Campaign campaign = cfg.make_campaign();
        if (campaign.low_confidence_h0() && sweep_mode == "pfa") {
            std::cerr << "warning: trials_h0 < 100/pfa_nominal; rows are marked"
                         " low_confidence\n";
        }
        const auto rows = (sweep_mode == "pfa") ? mwradar::run_pfa_sweep(campaign)
                                                : mwradar::run_pd_sweep(campaign);
        mwradar::write_sweep_csv(sweep_out, rows);
        for (const auto& r : rows) {
            if (r.failed) {
                std::cerr << "warning: degenerate rate " << r.degenerate_rate << " at M=" << r.m
                          << " |rho|=" << r.rho_abs << " exceeds 0.1%; point flagged failed\n";
            }
        }
        std::cerr << "wrote " << rows.size() << " rows to " << sweep_out << "\n";
        return kExitOk;
    }

    if (theory->parsed()) {
        const auto cfg = resolve_config(theory_opts);
        const mwradar::Campaign campaign = cfg.make_campaign();
        const double threshold = mwradar::threshold_from_pfa(campaign.pfa_nominal);
        std::vector<mwradar::TheoryRow> rows;
        std::uint32_t point = 0;
        for (double rho_abs : campaign.rho_abs_grid) {
            for (int m : campaign.m_grid) {
                const mwradar::Scenario sc = campaign.at_point(m, rho_abs);
                const auto nc = mwradar::estimate_noncentrality(
                    sc, campaign.noncentrality_trials, campaign.base_seed, point);
                mwradar::TheoryRow row;
                row.m = m;
                row.rho_abs = rho_abs;
                row.pfa_nominal = campaign.pfa_nominal;
                row.threshold = threshold;
                row.delta = nc.delta;
                row.delta_se = nc.se;
                row.pd_theory = mwradar::asymptotic_pd(nc.delta, threshold);
                rows.push_back(row);
                ++point;
            }
        }
        mwradar::write_theory_csv(theory_out, rows);
        std::cerr << "wrote " << rows.size() << " rows to " << theory_out << "\n";
        return kExitOk;
    }

    return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mwradar::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const mwradar::estimation_error& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const mwradar::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
