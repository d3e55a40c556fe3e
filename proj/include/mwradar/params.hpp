#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "mwradar/types.hpp"

namespace mwradar {

/// The five real parameters [alpha_re, alpha_im, rho_re, rho_im, sigma2]
/// driving the assumed Gaussian AR(1) likelihood. Indices follow the math:
/// theta[0..1] are the target amplitude, theta[2..3] the one-lag clutter
/// coefficient, theta[4] the innovation variance.
struct ParamVector {
    std::array<double, 5> theta{0.0, 0.0, 0.0, 0.0, 1.0};

    double& operator[](int i) { return theta[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return theta[static_cast<std::size_t>(i)]; }

    cx alpha() const { return {theta[0], theta[1]}; }
    cx rho() const { return {theta[2], theta[3]}; }
    double sigma2() const { return theta[4]; }
    double rho_sq() const { return theta[2] * theta[2] + theta[3] * theta[3]; }

    /// Marginal variance of the assumed stationary process,
    /// s = theta5 / (1 - theta3^2 - theta4^2).
    double marginal_variance() const { return theta[4] / (1.0 - rho_sq()); }

    void validate() const {
        for (double t : theta) {
            if (!is_finite(t)) throw std::domain_error("ParamVector: non-finite entry");
        }
        if (rho_sq() >= 1.0) throw std::domain_error("ParamVector: |rho| must be < 1");
        if (theta[4] <= 0.0) throw std::domain_error("ParamVector: sigma2 must be > 0");
    }

    static ParamVector from(cx alpha, cx rho, double sigma2) {
        ParamVector p;
        p.theta = {alpha.real(), alpha.imag(), rho.real(), rho.imag(), sigma2};
        return p;
    }
};

}  // namespace mwradar
