#include "xplab/splitter.hpp"

#include "xplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xplab {

namespace {

constexpr double kDegenerate = 1e-12;

double beta_cap(double delta, double c, double eps, double normP, double normP2)
{
    return std::min((1.0 - delta * normP2) / normP, eps / c);
}

double alpha_floor(double beta, double delta, double normP, double normP2)
{
    return std::max(beta * delta * normP2 / (1.0 - beta * normP), beta * beta * normP / (1.0 - delta * normP2));
}

double rho_cap(double beta, double delta, double c, double p)
{
    return std::min(std::pow(c, -p / (p - 2.0)) * std::pow(delta, 2.0 / (p - 2.0)), std::pow(beta, p / (p - 2.0)));
}

} // namespace

std::vector<std::string> SplitConstants::violations() const
{
    std::vector<std::string> v;
    if (!(delta * normP2 < 1.0))
        v.emplace_back("premise");
    if (!(eps_prime > 0.0 && eps_prime < std::min(eps, delta * alpha)))
        v.emplace_back("eps-prime");
    if (!(beta > 0.0 && beta < beta_cap(delta, c, eps, normP, normP2)))
        v.emplace_back("beta");
    if (!(rho > 0.0 && rho <= rho_cap(beta, delta, c, p)))
        v.emplace_back("rho");
    if (!(beta > alpha))
        v.emplace_back("alpha-upper");
    if (!(alpha > 0.0 && alpha >= alpha_floor(beta, delta, normP, normP2)))
        v.emplace_back("alpha-lower");
    return v;
}

CriterionReport constant_checks(const SplitConstants& k)
{
    CriterionReport r;
    r.checks.push_back(Check::make("premise", k.delta, Relation::Less, 1.0 / k.normP2));
    r.checks.push_back(Check::make("eps-prime", k.eps_prime, Relation::Less, std::min(k.eps, k.delta * k.alpha)));
    r.checks.push_back(Check::make("beta", k.beta, Relation::Less, beta_cap(k.delta, k.c, k.eps, k.normP, k.normP2)));
    r.checks.push_back(Check::make("rho", k.rho, Relation::LessEq, rho_cap(k.beta, k.delta, k.c, k.p)));
    r.checks.push_back(Check::make("alpha-upper", k.beta, Relation::Greater, k.alpha));
    r.checks.push_back(
        Check::make("alpha-lower", k.alpha, Relation::GreaterEq, alpha_floor(k.beta, k.delta, k.normP, k.normP2)));
    return r;
}

SplitConstants solve_constants(double delta, double c, double eps, double normP, double normP2, double p)
{
    for (double v : {delta, c, eps, normP, normP2}) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw PreconditionError("constants", "delta, c, eps, normP and normP2 must be positive and finite");
    }
    if (!(p > 2.0) || !std::isfinite(p))
        throw PreconditionError("p", "p must be a finite number above 2");
    if (!(delta * normP2 < 1.0))
        throw InfeasibleError("premise", "delta = " + std::to_string(delta) + " is not below 1/normP2 = " +
                                             std::to_string(1.0 / normP2));

    SplitConstants k;
    k.delta = delta;
    k.c = c;
    k.eps = eps;
    k.normP = normP;
    k.normP2 = normP2;
    k.p = p;

    double beta = 0.5 * beta_cap(delta, c, eps, normP, normP2);
    bool found = false;
    for (int halvings = 0; halvings <= 60; ++halvings) {
        const double lower = alpha_floor(beta, delta, normP, normP2);
        if (lower < beta) {
            k.alpha = 0.5 * (lower + beta);
            // The midpoint can round onto an endpoint when the interval is a
            // few ulps wide.
            if (k.alpha >= lower && k.alpha < beta) {
                found = true;
                break;
            }
        }
        beta *= 0.5;
    }
    if (!found)
        throw InfeasibleError("alpha-interval", "no admissible alpha after 60 halvings of beta");
    k.beta = beta;
    k.rho = rho_cap(beta, delta, c, p);
    k.eps_prime = 0.5 * std::min(eps, delta * k.alpha);

    const auto bad = k.violations();
    if (!bad.empty())
        throw InfeasibleError(bad.front(), "solved constants violate " + bad.front());
    return k;
}

ProjectionNorms projection_norms(const LinearOperator& P, double safety, const OpNormOptions& opts)
{
    if (const auto* bp = dynamic_cast<const BlockProjection*>(&P))
        return {bp->xp_norm_upper(), bp->norm_2w_exact(), true};
    OpNormOptions o = opts;
    o.mode = NormMode::XP;
    return {estimate_opnorm(P, o).lower * safety, exact_norm_2w(P), false};
}

SplitResult split(const SpVector& x, std::size_t N, const SplitConstants& k, const LinearOperator& P, double tol)
{
    require_same_space(x.space(), P.space());
    const double nx = xp_norm(x);
    if (std::abs(nx - 1.0) > 1e-9)
        throw PreconditionError("norm", "x must have norm 1 (got " + std::to_string(nx) + ")");
    if (!head_proj(x, N).is_zero())
        throw PreconditionError("support", "x has entries at or below N = " + std::to_string(N));
    const double rx = ratio(x);
    if (!(k.alpha < rx && rx < k.beta))
        throw PreconditionError("ratio-window", "r(x) = " + std::to_string(rx) + " is outside (alpha, beta) = (" +
                                                    std::to_string(k.alpha) + ", " + std::to_string(k.beta) + ")");
    const double off = xp_norm(P.apply(x) - x);
    if (off > 1e-9)
        throw PreconditionError("range", "x is not fixed by P (||Px - x|| = " + std::to_string(off) + ")");

    const auto& space = x.space();
    const double p = space.p();
    SplitResult res(space);
    res.E_x = extract_Ei(x, x.support(), k.rho);
    res.r_x = rx;
    const SpVector xE = restrict(x, res.E_x);
    res.y = P.apply(xE);
    res.z = x - res.y;
    const SpVector back = res.y + res.z;
    for (const auto& [n, v] : x.entries())
        res.sum_residual = std::max(res.sum_residual, std::abs(back[n] - v));
    for (const auto& [n, v] : back.entries())
        res.sum_residual = std::max(res.sum_residual, std::abs(v - x[n]));

    res.premise_lhs = norm_2w(xE);
    res.premise_rhs = k.delta * norm_2w(x);
    res.premise_met = res.premise_lhs < res.premise_rhs;

    res.degenerate_y = xp_norm(res.y) <= kDegenerate;
    res.degenerate_z = xp_norm(res.z) <= kDegenerate;
    if (!res.degenerate_y) {
        res.r_y = ratio(res.y);
        res.claims.checks.push_back(Check::make("r(y)<=alpha", *res.r_y, Relation::LessEq, k.alpha, tol));
    } else {
        res.claims.checks.push_back(Check::not_applicable("r(y)<=alpha", 0.0, Relation::LessEq, k.alpha));
    }
    if (!res.degenerate_z) {
        res.r_z = ratio(res.z);
        res.claims.checks.push_back(Check::make("r(z)>=beta", *res.r_z, Relation::GreaterEq, k.beta, tol));
    } else {
        res.claims.checks.push_back(Check::not_applicable("r(z)>=beta", 0.0, Relation::GreaterEq, k.beta));
    }
    const SpVector rest = restrict(x, x.support().minus(res.E_x));
    res.claims.checks.push_back(
        Check::make("tail_p", norm_p(rest), Relation::LessEq, std::pow(k.rho, (p - 2.0) / p), tol));
    res.claims.checks.push_back(Check::make("x_2", norm_2w(x), Relation::LessEq, k.beta, tol));
    return res;
}

} // namespace xplab
