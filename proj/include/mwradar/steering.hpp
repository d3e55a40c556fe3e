#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/types.hpp"

namespace mwradar {

enum class SteeringMode {
    /// [v]_n = exp(j pi (n-1) sin(phi)), n = 1..M^2, with sin(phi) = nu/2.
    direct_exponential,
    /// v = a_T(phi) kron a_R(phi) for transmit/receive ULAs at the given
    /// element spacings (identity waveform mixing).
    kronecker_mimo,
};

/// Geometry of the virtual array. The output length is N = M^2 in both
/// modes; nu is the normalized spatial frequency with sin(phi) = nu/2.
struct SteeringSpec {
    SteeringMode mode = SteeringMode::direct_exponential;
    int m = 50;
    double nu = 0.25;
    double dt_over_lambda = 0.5;  // Kronecker mode only
    double dr_over_lambda = 0.5;

    int n() const { return m * m; }

    void validate() const {
        if (m < 1) throw validation_error("SteeringSpec: M must be >= 1");
        if (!is_finite(nu) || std::abs(nu) > 2.0) {
            throw validation_error("SteeringSpec: nu must satisfy |nu| <= 2 (sin phi = nu/2)");
        }
        if (mode == SteeringMode::kronecker_mimo &&
            (!(dt_over_lambda > 0.0) || !(dr_over_lambda > 0.0))) {
            throw validation_error("SteeringSpec: element spacings must be > 0");
        }
    }
};

/// Builds the length-M^2 steering vector. Every entry has unit modulus and
/// the first entry is 1+0j.
inline std::vector<cx> build_steering(const SteeringSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const double sin_phi = 0.5 * spec.nu;
    std::vector<cx> v(static_cast<std::size_t>(n));

    if (spec.mode == SteeringMode::direct_exponential) {
        const double step = std::numbers::pi * sin_phi;
        for (int i = 0; i < n; ++i) {
            v[static_cast<std::size_t>(i)] = std::polar(1.0, step * i);
        }
        return v;
    }

    const double wt = 2.0 * std::numbers::pi * spec.dt_over_lambda * sin_phi;
    const double wr = 2.0 * std::numbers::pi * spec.dr_over_lambda * sin_phi;
    // vec(a_R a_T^T): transmit index varies slowly, receive index fast.
    for (int it = 0; it < spec.m; ++it) {
        for (int ir = 0; ir < spec.m; ++ir) {
            v[static_cast<std::size_t>(it * spec.m + ir)] = std::polar(1.0, wt * it + wr * ir);
        }
    }
    return v;
}

}  // namespace mwradar
