#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mwradar/types.hpp"

namespace mwradar {

/// Upper-tail probability of a central chi-squared with 2 degrees of freedom.
inline double chi2_survival_2dof(double x) {
    if (!is_finite(x) || x < 0.0) {
        throw std::domain_error("chi2_survival_2dof: argument must be finite and >= 0");
    }
    return std::exp(-0.5 * x);
}

/// Detection threshold for a target false-alarm probability under the
/// asymptotic chi^2_2 null law: lambda = -2 ln(pfa).
/// Round-trips with chi2_survival_2dof to machine precision.
inline double threshold_from_pfa(double pfa) {
    if (!is_finite(pfa) || pfa <= 0.0 || pfa >= 1.0) {
        throw std::domain_error("threshold_from_pfa: pfa must lie in (0,1)");
    }
    return -2.0 * std::log(pfa);
}

namespace detail {

// Regularized upper incomplete gamma with integer shape k+1 at y, i.e.
// Q(k+1, y) = e^{-y} sum_{j=0..k} y^j/j!, evaluated by summing the Poisson
// pmf outward from its mode. All terms are positive and <= 1; the widest
// case needs O(sqrt(y)) terms.
inline double poisson_cdf(long k, double y) {
    if (k < 0) return 0.0;
    if (y == 0.0) return 1.0;
    const long jstar = std::min(k, static_cast<long>(y));
    const double log_t0 = -y + static_cast<double>(jstar) * std::log(y) -
                          std::lgamma(static_cast<double>(jstar) + 1.0);
    const double t0 = std::exp(log_t0);
    double sum = t0;
    double t = t0;
    for (long j = jstar + 1; j <= k; ++j) {       // upward from the mode
        t *= y / static_cast<double>(j);
        sum += t;
        if (t < 1e-20 * sum) break;
    }
    t = t0;
    for (long j = jstar; j > 0; --j) {            // downward from the mode
        t *= static_cast<double>(j) / y;
        sum += t;
        if (t < 1e-20 * sum) break;
    }
    return std::min(sum, 1.0);
}

// Q1(a,b) as the Poisson mixture of even-dof central chi-squared survivals:
//   Q1(a,b) = sum_k Pois(k; a^2/2) Q(k+1, b^2/2).
// Summed two-sided from the Poisson mode, so the weights never underflow and
// the truncation error is bounded by the unconsumed Poisson mass. A single
// series covers the whole (a,b) plane at ~1e-14 absolute accuracy; no branch
// switching between small- and large-argument regimes is needed.
inline double marcum_q1_series(double a, double b) {
    const double lam = 0.5 * a * a;  // Poisson mean
    const double y = 0.5 * b * b;

    const long k0 = static_cast<long>(lam);
    const double log_w0 = static_cast<double>(k0) * std::log(lam) - lam -
                          std::lgamma(static_cast<double>(k0) + 1.0);
    const double w0 = std::exp(log_w0);

    // Chi-squared survival factors at the mode; p tracks e^{-y} y^k / k!
    // for the G recurrences G_{k+1} = G_k + p_{k+1}, G_{k-1} = G_k - p_k.
    const double g0 = poisson_cdf(k0, y);
    const double log_p0 = -y + static_cast<double>(k0) * std::log(y) -
                          std::lgamma(static_cast<double>(k0) + 1.0);
    const double p0 = (y > 0.0) ? std::exp(log_p0) : 0.0;

    double sum = w0 * g0;
    double consumed = w0;  // Poisson mass accounted for so far

    double w = w0, g = g0, p = p0;
    for (long k = k0 + 1; consumed < 1.0 - 1e-16; ++k) {   // upward sweep
        w *= lam / static_cast<double>(k);
        p *= y / static_cast<double>(k);
        g += p;
        sum += w * std::min(g, 1.0);
        consumed += w;
        if (w < 1e-18 && k > k0 + 4) break;
    }
    w = w0;
    g = g0;
    p = p0;
    for (long k = k0; k > 0; --k) {                        // downward sweep
        const double w_prev = w * static_cast<double>(k) / lam;
        g = std::max(g - p, 0.0);
        p *= static_cast<double>(k) / y;
        sum += w_prev * g;
        consumed += w_prev;
        w = w_prev;
        if (consumed >= 1.0 - 1e-16 || (w < 1e-18 && k < k0 - 4)) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace detail

/// Marcum Q function of order 1: Q1(a,b) = Pr{chi^2_2(a^2) > b^2}.
/// Strictly increasing in a (for b > 0), strictly decreasing in b.
/// Absolute accuracy better than 1e-10 for a, b in [0, 40].
inline double marcum_q1(double a, double b) {
    if (!is_finite(a) || !is_finite(b) || a < 0.0 || b < 0.0) {
        throw std::domain_error("marcum_q1: arguments must be finite and >= 0");
    }
    if (b == 0.0) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);
    return detail::marcum_q1_series(a, b);
}

}  // namespace mwradar
