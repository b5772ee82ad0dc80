#pragma once

// Internal: derivative-free maximization of objectives g(x, Mx) that are
// invariant under joint scaling of (x, Mx).

#include "xplab/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace xplab::detail {

struct PatternSearchResult {
    Eigen::VectorXd x;
    double value = -std::numeric_limits<double>::infinity();
};

/// Opportunistic coordinate pattern search augmented with a few random
/// directions per sweep; the step halves after an unsuccessful sweep.
template <class Objective>
PatternSearchResult pattern_search(const Eigen::MatrixXd& M, Eigen::VectorXd x, Objective&& g, Rng& rng,
                                   std::size_t max_iters, double min_step = 1e-10)
{
    const Eigen::Index n = x.size();
    auto renormalize = [](Eigen::VectorXd& v, Eigen::VectorXd& mv) {
        const double s = v.cwiseAbs().maxCoeff();
        if (s > 0.0) {
            v /= s;
            mv /= s;
        }
    };

    Eigen::VectorXd y = M * x;
    renormalize(x, y);
    double val = g(x, y);

    const Eigen::Index random_dirs = std::min<Eigen::Index>(n, 4);
    Eigen::VectorXd xt(n);
    Eigen::VectorXd yt(y.size());
    Eigen::VectorXd d(n);
    double step = 0.25;

    for (std::size_t it = 0; it < max_iters && step > min_step; ++it) {
        bool improved = false;
        for (Eigen::Index k = 0; k < n; ++k) {
            for (double s : {1.0, -1.0}) {
                xt = x;
                xt[k] += s * step;
                yt = y + (s * step) * M.col(k);
                const double v = g(xt, yt);
                if (v > val) {
                    x.swap(xt);
                    y.swap(yt);
                    val = v;
                    improved = true;
                    break;
                }
            }
        }
        for (Eigen::Index r = 0; r < random_dirs; ++r) {
            for (Eigen::Index k = 0; k < n; ++k)
                d[k] = rng.normal();
            const double dn = d.norm();
            if (dn == 0.0)
                continue;
            d /= dn;
            const Eigen::VectorXd md = M * d;
            for (double s : {1.0, -1.0}) {
                xt = x + (s * step) * d;
                yt = y + (s * step) * md;
                const double v = g(xt, yt);
                if (v > val) {
                    x.swap(xt);
                    y.swap(yt);
                    val = v;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved)
            step *= 0.5;
        renormalize(x, y);
    }
    return {std::move(x), val};
}

} // namespace xplab::detail
