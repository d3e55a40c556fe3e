#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "mwradar/errors.hpp"
#include "mwradar/likelihood.hpp"
#include "mwradar/linalg.hpp"
#include "mwradar/observation.hpp"
#include "mwradar/params.hpp"

namespace mwradar {

/// Plug-in sandwich matrices at a parameter point:
///   A_N = (1/N) sum_n H_n,  B_N = (1/N) sum_n s_n s_n^T,
///   C_N = A_N^{-1} B_N A_N^{-1}.
struct SandwichMatrices {
    Mat5 a_n;
    Mat5 b_n;
    Mat5 c_n;
    ParamVector at_theta{};
    double cond_a = 0.0;
};

namespace detail {

/// One pass over the data accumulating B_N and the structural sums of A_N.
/// For n >= 2 the Hessian term only depends on |a_n|^2, |d_{n-1}|^2 and
/// conj(a_n) d_{n-1}, so A_N needs four scalar accumulators, not N matrices.
inline void accumulate_sandwich(const ParamVector& theta, const std::vector<cx>& x,
                                const std::vector<cx>& v, Mat5& a_out, Mat5& b_out) {
    const std::size_t n = x.size();
    const double t1 = theta[0], t2 = theta[1], t3 = theta[2], t4 = theta[3], t5 = theta[4];
    const double inv5 = 1.0 / t5;

    Mat5 b = Mat5::Zero();
    {
        const Vec5 s1 = score_term_first(theta, x[0], v[0]);
        b = s1 * s1.transpose();
    }

    double sum_a2 = 0.0, sum_d2 = 0.0, sum_p = 0.0, sum_q = 0.0;
    double vpr = v[0].real(), vpi = v[0].imag();
    double xpr = x[0].real(), xpi = x[0].imag();
    Vec5 s;
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

        s(0) = 2.0 * inv5 * (ar * er + ai * ei);
        s(1) = 2.0 * inv5 * (ar * ei - ai * er);
        s(2) = 2.0 * inv5 * (dr * er + di * ei);
        s(3) = 2.0 * inv5 * (dr * ei - di * er);
        s(4) = inv5 * (inv5 * esq - 1.0);
        b.selfadjointView<Eigen::Lower>().rankUpdate(s);

        sum_a2 += ar * ar + ai * ai;
        sum_d2 += dr * dr + di * di;
        sum_p += ar * dr + ai * di;   // Re(conj(a) d)
        sum_q += ar * di - ai * dr;   // Im(conj(a) d)

        vpr = vr;
        vpi = vi;
        xpr = xr;
        xpi = xi;
    }
    b = b.selfadjointView<Eigen::Lower>();

    const Mat5 a = hessian_term_first(theta, v[0]) +
                   ehess_tail(theta, sum_a2, sum_d2, sum_p, sum_q,
                              static_cast<double>(n - 1));

    const double inv_n = 1.0 / static_cast<double>(n);
    a_out = a * inv_n;
    b_out = b * inv_n;
}

}  // namespace detail

/// Assembles A_N, B_N and C_N = A_N^{-1} B_N A_N^{-1} at `theta`. The inverse
/// is applied through symmetric decompositions, never formed explicitly, and
/// the result is symmetrized against roundoff. Throws singularity_error with
/// the condition estimate when A_N is unusable.
inline SandwichMatrices sandwich(const ParamVector& theta, const Observation& obs,
                                 double condition_limit = 1e12) {
    detail::check_loglik_args(theta, obs);
    if (obs.n() < 10) throw validation_error("sandwich: needs N >= 10");

    SandwichMatrices out;
    out.at_theta = theta;
    detail::accumulate_sandwich(theta, obs.samples, obs.steering, out.a_n, out.b_n);
    out.a_n = 0.5 * (out.a_n + out.a_n.transpose()).eval();
    out.b_n = 0.5 * (out.b_n + out.b_n.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Mat5> eig(out.a_n);
    const double ev_max = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double ev_min = eig.eigenvalues().cwiseAbs().minCoeff();
    out.cond_a = (ev_min > 0.0) ? ev_max / ev_min : std::numeric_limits<double>::infinity();
    if (!(out.cond_a < condition_limit)) {
        throw singularity_error("sandwich: A_N condition estimate exceeds limit", out.cond_a);
    }

    const auto ldlt = out.a_n.ldlt();
    const Mat5 ainv_b = ldlt.solve(out.b_n);
    out.c_n = ldlt.solve(ainv_b.transpose());
    out.c_n = 0.5 * (out.c_n + out.c_n.transpose()).eval();
    return out;
}

}  // namespace mwradar
