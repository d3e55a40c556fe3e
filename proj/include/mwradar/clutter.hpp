#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/innovation.hpp"
#include "mwradar/rng.hpp"
#include "mwradar/types.hpp"

namespace mwradar {

/// Stationary complex AR(1) clutter: c_n = rho c_{n-1} + w_n with |rho| < 1
/// and innovations drawn from `law`. The recursion starts from zero and the
/// first `burn_in` samples are discarded; 1000 keeps the start-up transient
/// below 1e-3 relative bias for |rho| <= 0.95.
struct ClutterSpec {
    cx rho{0.0, 0.0};
    InnovationLaw law{};
    int burn_in = 1000;

    void validate() const {
        if (!is_finite(rho) || std::abs(rho) >= 1.0) {
            throw validation_error("ClutterSpec: |rho| must be < 1");
        }
        if (burn_in < 0) throw validation_error("ClutterSpec: burn_in must be >= 0");
        law.validate();
    }

    /// Marginal clutter power R[0] = sigma2 / (1 - |rho|^2).
    double marginal_power() const { return law.sigma2 / (1.0 - abs2(rho)); }

    static ClutterSpec from_polar(double rho_abs, double nu_clutter, InnovationLaw law,
                                  int burn_in = 1000) {
        ClutterSpec spec;
        spec.rho = std::polar(rho_abs, 2.0 * std::numbers::pi * nu_clutter);
        spec.law = law;
        spec.burn_in = burn_in;
        spec.validate();
        return spec;
    }
};

inline std::vector<cx> simulate_clutter(const ClutterSpec& spec, int n, Rng& rng) {
    spec.validate();
    if (n < 1) throw validation_error("simulate_clutter: N must be >= 1");
    std::vector<cx> c(static_cast<std::size_t>(n));
    cx state{0.0, 0.0};
    for (int i = 0; i < spec.burn_in; ++i) {
        state = spec.rho * state + sample_innovation(spec.law, rng);
    }
    for (int i = 0; i < n; ++i) {
        state = spec.rho * state + sample_innovation(spec.law, rng);
        c[static_cast<std::size_t>(i)] = state;
    }
    return c;
}

/// Closed-form autocorrelation R[m] = (sigma2/(1-|rho|^2)) rho^m for m >= 0,
/// extended to negative lags by conjugate symmetry R[-m] = conj(R[m]).
inline cx acf(const ClutterSpec& spec, int m) {
    spec.validate();
    const double r0 = spec.marginal_power();
    cx pow{1.0, 0.0};
    for (int i = 0; i < std::abs(m); ++i) pow *= spec.rho;
    if (m < 0) pow = std::conj(pow);
    return r0 * pow;
}

}  // namespace mwradar
