#pragma once

#include "xplab/criteria.hpp"
#include "xplab/operators.hpp"
#include "xplab/space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xplab {

/// Constants of the small/large ratio splitting together with the inputs
/// they were solved for.
struct SplitConstants {
    // inputs
    double delta = 0;
    double c = 0;
    double eps = 0;
    double normP = 0;  // upper bound for the X_{p,w} norm of P
    double normP2 = 0; // upper bound for the 2w norm of P
    double p = 0;
    // solved
    double eps_prime = 0;
    double rho = 0;
    double alpha = 0;
    double beta = 0;

    /// Names of the violated inequalities, by direct substitution:
    ///  premise      delta < 1/normP2
    ///  eps-prime    eps' < min{eps, delta alpha}
    ///  beta         beta < min{(1 - delta normP2)/normP, eps/c}
    ///  rho          rho <= min{c^{-p/(p-2)} delta^{2/(p-2)}, beta^{p/(p-2)}}
    ///  alpha-upper  beta > alpha
    ///  alpha-lower  alpha >= max{beta delta normP2/(1 - beta normP), beta^2 normP/(1 - delta normP2)}
    std::vector<std::string> violations() const;
};

/// The same inequalities as checks with both sides.
CriterionReport constant_checks(const SplitConstants& k);

/// beta = min{(1 - delta normP2)/normP, eps/c} / 2; alpha the midpoint of
/// its admissible interval (beta halved while that interval is empty, at
/// most 60 times); rho at its upper bound; eps' = min{eps, delta alpha} / 2.
/// Throws InfeasibleError naming the violated constraint.
SplitConstants solve_constants(double delta, double c, double eps, double normP, double normP2, double p);

struct ProjectionNorms {
    double normP = 0;
    double normP2 = 0;
    bool certified = false; // both are proven upper bounds
};

/// Upper bounds for a projection's norms. Block projections use their
/// analytic bounds; other operators use the exact 2w norm and the sampled
/// X_{p,w} estimate times `safety`.
ProjectionNorms projection_norms(const LinearOperator& P, double safety = 1.05, const OpNormOptions& opts = {});

inline const char* const kSplitHypothesis =
    "the witness criterion fails for (delta, c, eps) on the whole space; assumed by the caller, not checked";

struct SplitResult {
    explicit SplitResult(const WeightedSpace& space) : y(space), z(space) {}

    SupportSet E_x;
    SpVector y;
    SpVector z;
    double r_x = 0;
    std::optional<double> r_y; // absent when y is degenerate
    std::optional<double> r_z; // absent when z is degenerate
    bool degenerate_y = false;
    bool degenerate_z = false;
    double sum_residual = 0;   // max |y + z - x| coefficientwise
    bool premise_met = false;  // |x_{E_x}|_2 < delta |x|_2
    double premise_lhs = 0;
    double premise_rhs = 0;
    /// "r(y)<=alpha", "r(z)>=beta", "tail_p" (|x_{E_x^c}|_p <= rho^{(p-2)/p}),
    /// "x_2" (|x|_2 <= beta).
    CriterionReport claims;
    std::string unverified_hypothesis = kSplitHypothesis;
};

/// Splits x = y + z with y = P(x_{E_x}), z = x - y. Throws
/// PreconditionError naming "norm", "support", "ratio-window" or "range".
SplitResult split(const SpVector& x, std::size_t N, const SplitConstants& k, const LinearOperator& P,
                  double tol = 1e-9);

} // namespace xplab
