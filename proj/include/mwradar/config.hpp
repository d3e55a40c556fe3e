#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwradar/campaign.hpp"
#include "mwradar/errors.hpp"
#include "mwradar/observation.hpp"

namespace mwradar {

enum class Preset { paper, desk };

/// Human-editable experiment configuration (JSON key-value tree). Defaults
/// reproduce the reference setting: nu_clutter = 0.23, nu = 0.25, complex-t
/// innovations with shape 3, sigma2 = 1, SNR = -10 dB, nominal PFA = 1e-4,
/// |rho| grid {0.3, 0.7, 0.9}, 1e6 trials. The desk preset trades the
/// rare-event level for runtime: PFA 1e-2 with 1e5/1e4 trials.
/// Unknown keys are rejected with their full path; all physical constraints
/// are revalidated on load.
struct ConfigDocument {
    // scenario
    int m = 50;
    std::string steering_mode = "direct_exponential";  // or "kronecker_mimo"
    double nu = 0.25;
    double dt_over_lambda = 0.5;
    double dr_over_lambda = 0.5;
    double rho_abs = 0.7;
    double nu_clutter = 0.23;
    double sigma2 = 1.0;
    std::string innovation = "complex_t";  // or "gaussian"
    double t_shape = 3.0;
    int burn_in = 1000;
    double snr_db = -10.0;
    std::optional<double> target_phase{};  // radians; null -> random per trial

    // campaign
    std::vector<int> m_grid{10, 20, 30, 40, 50};
    std::vector<double> rho_abs_grid{0.3, 0.7, 0.9};
    long trials_h0 = 1000000;
    long trials_h1 = 1000000;
    std::uint64_t base_seed = 1729;
    double pfa_nominal = 1e-4;
    int noncentrality_trials = 500;

    void apply_preset(Preset p) {
        if (p == Preset::paper) {
            pfa_nominal = 1e-4;
            trials_h0 = 1000000;
            trials_h1 = 1000000;
        } else {
            pfa_nominal = 1e-2;
            trials_h0 = 100000;
            trials_h1 = 10000;
        }
    }

    InnovationLaw innovation_law() const {
        if (innovation == "gaussian") return InnovationLaw::gaussian(sigma2);
        return InnovationLaw::student_t(sigma2, t_shape);
    }

    SteeringMode steering() const {
        return steering_mode == "kronecker_mimo" ? SteeringMode::kronecker_mimo
                                                 : SteeringMode::direct_exponential;
    }

    /// Scenario at an explicit grid point.
    Scenario make_scenario(int m_at, double rho_abs_at) const {
        Scenario sc;
        sc.steering = SteeringSpec{steering(), m_at, nu, dt_over_lambda, dr_over_lambda};
        sc.clutter = ClutterSpec::from_polar(rho_abs_at, nu_clutter, innovation_law(), burn_in);
        sc.snr_db = snr_db;
        sc.target_phase = target_phase;
        return sc;
    }

    /// Scenario for single-trial commands (simulate/detect).
    Scenario make_single_scenario() const { return make_scenario(m, rho_abs); }

    Campaign make_campaign() const {
        Campaign c;
        c.scenario = make_single_scenario();
        c.m_grid = m_grid;
        c.rho_abs_grid = rho_abs_grid;
        c.trials_h0 = trials_h0;
        c.trials_h1 = trials_h1;
        c.base_seed = base_seed;
        c.pfa_nominal = pfa_nominal;
        c.noncentrality_trials = noncentrality_trials;
        return c;
    }

    void validate() const {
        if (steering_mode != "direct_exponential" && steering_mode != "kronecker_mimo") {
            throw validation_error(
                "scenario.steering_mode: expected direct_exponential or kronecker_mimo");
        }
        if (innovation != "gaussian" && innovation != "complex_t") {
            throw validation_error("scenario.innovation: expected gaussian or complex_t");
        }
        try {
            make_single_scenario();
            make_campaign().validate();
        } catch (const validation_error&) {
            throw;
        } catch (const std::exception& e) {
            throw validation_error(std::string("config: ") + e.what());
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json sc;
        sc["m"] = m;
        sc["steering_mode"] = steering_mode;
        sc["nu"] = nu;
        sc["dt_over_lambda"] = dt_over_lambda;
        sc["dr_over_lambda"] = dr_over_lambda;
        sc["rho_abs"] = rho_abs;
        sc["nu_clutter"] = nu_clutter;
        sc["sigma2"] = sigma2;
        sc["innovation"] = innovation;
        sc["t_shape"] = t_shape;
        sc["burn_in"] = burn_in;
        sc["snr_db"] = snr_db;
        if (target_phase) {
            sc["target_phase"] = *target_phase;
        } else {
            sc["target_phase"] = nullptr;
        }
        nlohmann::ordered_json ca;
        ca["m_grid"] = m_grid;
        ca["rho_abs_grid"] = rho_abs_grid;
        ca["trials_h0"] = trials_h0;
        ca["trials_h1"] = trials_h1;
        ca["base_seed"] = base_seed;
        ca["pfa_nominal"] = pfa_nominal;
        ca["noncentrality_trials"] = noncentrality_trials;
        nlohmann::ordered_json j;
        j["scenario"] = sc;
        j["campaign"] = ca;
        return j;
    }

    static ConfigDocument from_json(const nlohmann::json& j);
    static ConfigDocument load(const std::string& path);
    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw io_error("cannot open for writing: " + path);
        os << to_json().dump(2) << "\n";
        if (!os.good()) throw io_error("write failed: " + path);
    }
};

namespace detail {

template <typename T>
void read_key(const nlohmann::json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;  // missing keys keep their defaults
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw validation_error(path + "." + key + ": wrong type");
    }
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw validation_error("unknown config key: " + path + "." + it.key());
    }
}

}  // namespace detail

inline ConfigDocument ConfigDocument::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw validation_error("config root must be an object");
    detail::reject_unknown(j, "$", {"scenario", "campaign"});
    ConfigDocument c;
    if (j.contains("scenario")) {
        const auto& sc = j.at("scenario");
        if (!sc.is_object()) throw validation_error("scenario must be an object");
        detail::reject_unknown(sc, "scenario",
                               {"m", "steering_mode", "nu", "dt_over_lambda", "dr_over_lambda",
                                "rho_abs", "nu_clutter", "sigma2", "innovation", "t_shape",
                                "burn_in", "snr_db", "target_phase"});
        detail::read_key(sc, "scenario", "m", c.m);
        detail::read_key(sc, "scenario", "steering_mode", c.steering_mode);
        detail::read_key(sc, "scenario", "nu", c.nu);
        detail::read_key(sc, "scenario", "dt_over_lambda", c.dt_over_lambda);
        detail::read_key(sc, "scenario", "dr_over_lambda", c.dr_over_lambda);
        detail::read_key(sc, "scenario", "rho_abs", c.rho_abs);
        detail::read_key(sc, "scenario", "nu_clutter", c.nu_clutter);
        detail::read_key(sc, "scenario", "sigma2", c.sigma2);
        detail::read_key(sc, "scenario", "innovation", c.innovation);
        detail::read_key(sc, "scenario", "t_shape", c.t_shape);
        detail::read_key(sc, "scenario", "burn_in", c.burn_in);
        detail::read_key(sc, "scenario", "snr_db", c.snr_db);
        if (sc.contains("target_phase") && !sc.at("target_phase").is_null()) {
            double phase = 0.0;
            detail::read_key(sc, "scenario", "target_phase", phase);
            c.target_phase = phase;
        }
    }
    if (j.contains("campaign")) {
        const auto& ca = j.at("campaign");
        if (!ca.is_object()) throw validation_error("campaign must be an object");
        detail::reject_unknown(ca, "campaign",
                               {"m_grid", "rho_abs_grid", "trials_h0", "trials_h1", "base_seed",
                                "pfa_nominal", "noncentrality_trials"});
        detail::read_key(ca, "campaign", "m_grid", c.m_grid);
        detail::read_key(ca, "campaign", "rho_abs_grid", c.rho_abs_grid);
        detail::read_key(ca, "campaign", "trials_h0", c.trials_h0);
        detail::read_key(ca, "campaign", "trials_h1", c.trials_h1);
        detail::read_key(ca, "campaign", "base_seed", c.base_seed);
        detail::read_key(ca, "campaign", "pfa_nominal", c.pfa_nominal);
        detail::read_key(ca, "campaign", "noncentrality_trials", c.noncentrality_trials);
    }
    c.validate();
    return c;
}

inline ConfigDocument ConfigDocument::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path + ": invalid JSON: " + e.what());
    }
    return from_json(j);
}

}  // namespace mwradar
