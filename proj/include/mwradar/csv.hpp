#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mwradar/campaign.hpp"
#include "mwradar/errors.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/wald.hpp"

namespace mwradar {

/// Full-precision decimal rendering (17 significant digits, '.' separator);
/// the same value always renders to the same bytes.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// observation sample files
// ---------------------------------------------------------------------------

/// CSV with a '#'-prefixed header block echoing the generating truth,
/// then one row per virtual channel: index (1-based), x_re, x_im, v_re, v_im.
inline void write_observation_csv(std::ostream& os, const Observation& obs) {
    os << "# mwradar observation\n";
    os << "# hypothesis = " << (obs.hypothesis == Hypothesis::h1 ? "h1" : "h0") << "\n";
    os << "# n = " << obs.n() << "\n";
    os << "# truth_alpha_re = " << fmt17(obs.truth[0]) << "\n";
    os << "# truth_alpha_im = " << fmt17(obs.truth[1]) << "\n";
    os << "# truth_rho_re = " << fmt17(obs.truth[2]) << "\n";
    os << "# truth_rho_im = " << fmt17(obs.truth[3]) << "\n";
    os << "# truth_sigma2 = " << fmt17(obs.truth[4]) << "\n";
    os << "index,x_re,x_im,v_re,v_im\n";
    for (int i = 0; i < obs.n(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        os << (i + 1) << ',' << fmt17(obs.samples[k].real()) << ','
           << fmt17(obs.samples[k].imag()) << ',' << fmt17(obs.steering[k].real()) << ','
           << fmt17(obs.steering[k].imag()) << "\n";
    }
}

inline void write_observation_csv(const std::string& path, const Observation& obs) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_observation_csv(os, obs);
    if (!os.good()) throw io_error("write failed: " + path);
}

inline Observation read_observation_csv(std::istream& is, const std::string& label) {
    Observation obs;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key, eq;
            double value;
            if (meta >> key >> eq >> value && eq == "=") {
                if (key == "truth_alpha_re") obs.truth[0] = value;
                else if (key == "truth_alpha_im") obs.truth[1] = value;
                else if (key == "truth_rho_re") obs.truth[2] = value;
                else if (key == "truth_rho_im") obs.truth[3] = value;
                else if (key == "truth_sigma2") obs.truth[4] = value;
            } else {
                std::istringstream meta2(line.substr(1));
                std::string k2, e2, v2;
                if (meta2 >> k2 >> e2 >> v2 && k2 == "hypothesis" && v2 == "h1") {
                    obs.hypothesis = Hypothesis::h1;
                }
            }
            continue;
        }
        if (!header_seen) {  // column header row
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        double vals[5];
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(row, field, ',')) {
                throw io_error(label + ": malformed sample row: " + line);
            }
            try {
                vals[c] = std::stod(field);
            } catch (const std::exception&) {
                throw io_error(label + ": non-numeric field: " + field);
            }
        }
        obs.samples.emplace_back(vals[1], vals[2]);
        obs.steering.emplace_back(vals[3], vals[4]);
    }
    if (obs.samples.empty()) throw io_error(label + ": no sample rows found");
    for (std::size_t i = 0; i < obs.samples.size(); ++i) {
        if (!is_finite(obs.samples[i]) || !is_finite(obs.steering[i])) {
            throw io_error(label + ": non-finite sample encountered");
        }
    }
    return obs;
}

inline Observation read_observation_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_observation_csv(is, path);
}

// ---------------------------------------------------------------------------
// sweep / theory tables
// ---------------------------------------------------------------------------

/// Frozen sweep schema (one row per grid point):
///   M,rho_abs,nominal,empirical,ci_lo,ci_hi,theory,degenerate_rate,trials,low_confidence
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepResult>& rows) {
    os << "M,rho_abs,nominal,empirical,ci_lo,ci_hi,theory,degenerate_rate,trials,"
          "low_confidence\n";
    for (const SweepResult& r : rows) {
        os << r.m << ',' << fmt17(r.rho_abs) << ',' << fmt17(r.nominal) << ','
           << fmt17(r.empirical) << ',' << fmt17(r.ci_lo) << ',' << fmt17(r.ci_hi) << ','
           << fmt17(r.theory) << ',' << fmt17(r.degenerate_rate) << ',' << r.trials << ','
           << (r.low_confidence ? 1 : 0) << "\n";
    }
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepResult>& rows) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_sweep_csv(os, rows);
    if (!os.good()) throw io_error("write failed: " + path);
}

struct TheoryRow {
    int m = 0;
    double rho_abs = 0.0;
    double pfa_nominal = 0.0;
    double threshold = 0.0;
    double delta = 0.0;
    double delta_se = 0.0;
    double pd_theory = 0.0;
};

/// Asymptotic reference table:
///   M,rho_abs,pfa_nominal,threshold,delta,delta_se,pd_theory
inline void write_theory_csv(std::ostream& os, const std::vector<TheoryRow>& rows) {
    os << "M,rho_abs,pfa_nominal,threshold,delta,delta_se,pd_theory\n";
    for (const TheoryRow& r : rows) {
        os << r.m << ',' << fmt17(r.rho_abs) << ',' << fmt17(r.pfa_nominal) << ','
           << fmt17(r.threshold) << ',' << fmt17(r.delta) << ',' << fmt17(r.delta_se) << ','
           << fmt17(r.pd_theory) << "\n";
    }
}

inline void write_theory_csv(const std::string& path, const std::vector<TheoryRow>& rows) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_theory_csv(os, rows);
    if (!os.good()) throw io_error("write failed: " + path);
}

}  // namespace mwradar
