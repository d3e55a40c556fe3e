#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/linalg.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/params.hpp"
#include "mwradar/types.hpp"

// Misspecified Gaussian AR(1) likelihood and its exact derivatives.
//
// The assumed joint density factors as
//   f(x; theta) = g(x_1 | mu_1, s) * prod_{n>=2} g(x_n | mu_n, theta5)
// with g(x|mu,s) = (pi s)^{-1} exp(-|x-mu|^2/s),
//   mu_1 = alpha v_1,
//   mu_n = alpha (v_n - rho v_{n-1}) + rho x_{n-1},
//   s    = theta5 / (1 - theta3^2 - theta4^2).
//
// Writing a_n = v_n - rho v_{n-1} and d_{n-1} = x_{n-1} - alpha v_{n-1}, the
// per-sample score for n >= 2 collapses to
//   s_n = (2/theta5) [Re(conj(a_n) eps_n), Im(conj(a_n) eps_n),
//                     Re(conj(d_{n-1}) eps_n), Im(conj(d_{n-1}) eps_n)]
//         + theta5^{-1} (theta5^{-1} |eps_n|^2 - 1) e5,
// and the conditionally expected Hessian keeps only the outer-product terms:
//   H_n = -(2/theta5)(grad Re mu_n grad^T Re mu_n + grad Im mu_n grad^T Im mu_n)
//         - theta5^{-2} e5 e5^T.
// The n = 1 term uses the marginal variance s and its gradient instead.

namespace mwradar {

namespace detail {

inline void check_loglik_args(const ParamVector& theta, const Observation& obs) {
    theta.validate();
    if (obs.n() < 2) throw validation_error("likelihood: needs N >= 2 samples");
    if (obs.samples.size() != obs.steering.size()) {
        throw validation_error("likelihood: samples/steering length mismatch");
    }
}

/// grad s(theta): entries 3..5 of the marginal-variance gradient.
inline Vec5 grad_marginal_variance(const ParamVector& theta) {
    const double om = 1.0 - theta.rho_sq();
    const double om2 = om * om;
    Vec5 g = Vec5::Zero();
    g(2) = 2.0 * theta[2] * theta[4] / om2;
    g(3) = 2.0 * theta[3] * theta[4] / om2;
    g(4) = 1.0 / om;
    return g;
}

/// Expected Hessian of the marginal n = 1 term.
inline Mat5 hessian_term_first_impl(const ParamVector& theta, cx v1) {
    const double s = theta.marginal_variance();
    const Vec5 gr{v1.real(), -v1.imag(), 0.0, 0.0, 0.0};
    const Vec5 gi{v1.imag(), v1.real(), 0.0, 0.0, 0.0};
    const Vec5 gs = grad_marginal_variance(theta);
    return -(2.0 / s) * (gr * gr.transpose() + gi * gi.transpose()) -
           (gs * gs.transpose()) / (s * s);
}

/// Sum of the n >= 2 conditionally expected Hessians given the structural
/// sums over a_n = v_n - rho v_{n-1} and d_{n-1} = x_{n-1} - alpha v_{n-1}:
/// sum |a|^2, sum |d|^2, and sum conj(a) d (split into re/im).
inline Mat5 ehess_tail(const ParamVector& theta, double sum_a2, double sum_d2, double sum_p,
                       double sum_q, double n_minus_1) {
    const double c = -2.0 / theta[4];
    Mat5 h = Mat5::Zero();
    h(0, 0) = c * sum_a2;
    h(1, 1) = c * sum_a2;
    h(2, 2) = c * sum_d2;
    h(3, 3) = c * sum_d2;
    h(0, 2) = c * sum_p;
    h(2, 0) = c * sum_p;
    h(1, 3) = c * sum_p;
    h(3, 1) = c * sum_p;
    h(0, 3) = -c * sum_q;
    h(3, 0) = -c * sum_q;
    h(1, 2) = c * sum_q;
    h(2, 1) = c * sum_q;
    h(4, 4) = -n_minus_1 / (theta[4] * theta[4]);
    return h;
}

/// Fused single pass for the scoring iteration: log-likelihood, score sum,
/// and the summed conditionally expected Hessian (the scoring metric; equals
/// N * A_N of the sandwich estimator). Complex products are spelled out on
/// re/im parts to keep the trial loop free of library complex-multiplication
/// calls.
inline double loglik_score_ehess(const ParamVector& theta, const std::vector<cx>& x,
                                 const std::vector<cx>& v, Vec5& score_sum, Mat5& ehess) {
    const std::size_t n = x.size();
    const double t1 = theta[0], t2 = theta[1], t3 = theta[2], t4 = theta[3], t5 = theta[4];
    const double s = theta.marginal_variance();
    const double inv_s = 1.0 / s;
    const double inv5 = 1.0 / t5;
    const double ln_pi_t5 = std::log(std::numbers::pi * t5);

    const double v0r = v[0].real(), v0i = v[0].imag();
    const double e0r = x[0].real() - (t1 * v0r - t2 * v0i);
    const double e0i = x[0].imag() - (t1 * v0i + t2 * v0r);
    const double e0sq = e0r * e0r + e0i * e0i;
    double loglik = -std::log(std::numbers::pi * s) - e0sq * inv_s;

    score_sum = (inv_s * (inv_s * e0sq - 1.0)) * grad_marginal_variance(theta);
    score_sum(0) += 2.0 * inv_s * (v0r * e0r + v0i * e0i);
    score_sum(1) += 2.0 * inv_s * (v0r * e0i - v0i * e0r);

    double g0 = 0, g1 = 0, g2 = 0, g3 = 0, g4 = 0;
    double sum_a2 = 0, sum_d2 = 0, sum_p = 0, sum_q = 0;
    double vpr = v0r, vpi = v0i;
    double xpr = x[0].real(), xpi = x[0].imag();
    for (std::size_t k = 1; k < n; ++k) {
        const double vr = v[k].real(), vi = v[k].imag();
        const double xr = x[k].real(), xi = x[k].imag();
        const double ar = vr - (t3 * vpr - t4 * vpi);
        const double ai = vi - (t3 * vpi + t4 * vpr);
        const double dr = xpr - (t1 * vpr - t2 * vpi);
        const double di = xpi - (t1 * vpi + t2 * vpr);
        const double er = xr - (t1 * ar - t2 * ai) - (t3 * xpr - t4 * xpi);
        const double ei = xi - (t1 * ai + t2 * ar) - (t3 * xpi + t4 * xpr);
        const double esq = er * er + ei * ei;

        loglik -= ln_pi_t5 + esq * inv5;
        g0 += ar * er + ai * ei;
        g1 += ar * ei - ai * er;
        g2 += dr * er + di * ei;
        g3 += dr * ei - di * er;
        g4 += esq;
        sum_a2 += ar * ar + ai * ai;
        sum_d2 += dr * dr + di * di;
        sum_p += ar * dr + ai * di;
        sum_q += ar * di - ai * dr;

        vpr = vr;
        vpi = vi;
        xpr = xr;
        xpi = xi;
    }
    score_sum(0) += 2.0 * inv5 * g0;
    score_sum(1) += 2.0 * inv5 * g1;
    score_sum(2) += 2.0 * inv5 * g2;
    score_sum(3) += 2.0 * inv5 * g3;
    score_sum(4) += inv5 * (inv5 * g4 - static_cast<double>(n - 1));

    ehess = hessian_term_first_impl(theta, v[0]) +
            ehess_tail(theta, sum_a2, sum_d2, sum_p, sum_q, static_cast<double>(n - 1));
    return loglik;
}

/// Value-only pass (line searches need no gradient).
inline double loglik_value(const ParamVector& theta, const std::vector<cx>& x,
                           const std::vector<cx>& v) {
    const std::size_t n = x.size();
    const double t1 = theta[0], t2 = theta[1], t3 = theta[2], t4 = theta[3], t5 = theta[4];
    const double s = theta.marginal_variance();
    const double inv5 = 1.0 / t5;
    const double ln_pi_t5 = std::log(std::numbers::pi * t5);

    const double v0r = v[0].real(), v0i = v[0].imag();
    const double e0r = x[0].real() - (t1 * v0r - t2 * v0i);
    const double e0i = x[0].imag() - (t1 * v0i + t2 * v0r);
    double loglik = -std::log(std::numbers::pi * s) - (e0r * e0r + e0i * e0i) / s;

    double acc = 0.0;
    double vpr = v0r, vpi = v0i;
    double xpr = x[0].real(), xpi = x[0].imag();
    for (std::size_t k = 1; k < n; ++k) {
        const double vr = v[k].real(), vi = v[k].imag();
        const double xr = x[k].real(), xi = x[k].imag();
        const double ar = vr - (t3 * vpr - t4 * vpi);
        const double ai = vi - (t3 * vpi + t4 * vpr);
        const double er = xr - (t1 * ar - t2 * ai) - (t3 * xpr - t4 * xpi);
        const double ei = xi - (t1 * ai + t2 * ar) - (t3 * xpi + t4 * xpr);
        acc += er * er + ei * ei;
        vpr = vr;
        vpi = vi;
        xpr = xr;
        xpi = xi;
    }
    return loglik - static_cast<double>(n - 1) * ln_pi_t5 - acc * inv5;
}

}  // namespace detail

/// ln f(x; theta) under the assumed Gaussian AR(1) model.
inline double misspecified_loglik(const ParamVector& theta, const Observation& obs) {
    detail::check_loglik_args(theta, obs);
    return detail::loglik_value(theta, obs.samples, obs.steering);
}

/// Score of the first (marginal) term, grad ln g(x_1 | mu_1, s).
inline Vec5 score_term_first(const ParamVector& theta, cx x1, cx v1) {
    const double s = theta.marginal_variance();
    const cx eps = x1 - theta.alpha() * v1;
    Vec5 out = Vec5::Zero();
    const cx ve = std::conj(v1) * eps;
    out(0) = 2.0 / s * ve.real();
    out(1) = 2.0 / s * ve.imag();
    out += (abs2(eps) / s - 1.0) / s * detail::grad_marginal_variance(theta);
    return out;
}

/// Score of one conditional term, grad ln g(x_n | mu_n, theta5), n >= 2.
inline Vec5 score_term(const ParamVector& theta, cx xn, cx xprev, cx vn, cx vprev) {
    const double t5 = theta.sigma2();
    const cx a = vn - theta.rho() * vprev;
    const cx d = xprev - theta.alpha() * vprev;
    const cx eps = xn - theta.alpha() * a - theta.rho() * xprev;
    Vec5 out;
    const cx ae = std::conj(a) * eps;
    const cx de = std::conj(d) * eps;
    out(0) = 2.0 / t5 * ae.real();
    out(1) = 2.0 / t5 * ae.imag();
    out(2) = 2.0 / t5 * de.real();
    out(3) = 2.0 / t5 * de.imag();
    out(4) = (abs2(eps) / t5 - 1.0) / t5;
    return out;
}

/// All N per-sample score vectors (n = 1 uses the marginal term).
inline std::vector<Vec5> score(const ParamVector& theta, const Observation& obs) {
    detail::check_loglik_args(theta, obs);
    const auto& x = obs.samples;
    const auto& v = obs.steering;
    std::vector<Vec5> out(x.size());
    out[0] = score_term_first(theta, x[0], v[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        out[k] = score_term(theta, x[k], x[k - 1], v[k], v[k - 1]);
    }
    return out;
}

/// Conditionally expected Hessian of one term, n >= 2. The expectation over
/// x_n given x_{n-1} is already applied, so no residual appears.
inline Mat5 hessian_term(const ParamVector& theta, cx xprev, cx vn, cx vprev) {
    const double t5 = theta.sigma2();
    const cx a = vn - theta.rho() * vprev;
    const cx d = xprev - theta.alpha() * vprev;
    const Vec5 gr{a.real(), -a.imag(), d.real(), -d.imag(), 0.0};
    const Vec5 gi{a.imag(), a.real(), d.imag(), d.real(), 0.0};
    Mat5 h = -(2.0 / t5) * (gr * gr.transpose() + gi * gi.transpose());
    h(4, 4) -= 1.0 / (t5 * t5);
    return h;
}

/// Expected Hessian of the marginal n = 1 term.
inline Mat5 hessian_term_first(const ParamVector& theta, cx v1) {
    return detail::hessian_term_first_impl(theta, v1);
}

/// All N conditionally expected Hessians.
inline std::vector<Mat5> conditional_hessian(const ParamVector& theta, const Observation& obs) {
    detail::check_loglik_args(theta, obs);
    const auto& x = obs.samples;
    const auto& v = obs.steering;
    std::vector<Mat5> out(x.size());
    out[0] = hessian_term_first(theta, v[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
        out[k] = hessian_term(theta, x[k - 1], v[k], v[k - 1]);
    }
    return out;
}

}  // namespace mwradar
