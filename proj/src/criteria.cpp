#include "xplab/criteria.hpp"

#include "xplab/error.hpp"
#include "xplab/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace xplab {

std::string to_string(Relation r)
{
    switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "==";
    case Relation::GreaterEq: return ">=";
    case Relation::Greater: return ">";
    }
    return "?";
}

Check Check::make(std::string name, double lhs, Relation rel, double rhs, double tol)
{
    Check c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.relation = rel;
    const double slack = tol * std::max(std::abs(lhs), std::abs(rhs));
    switch (rel) {
    case Relation::Less: c.pass = lhs < rhs; break;
    case Relation::LessEq: c.pass = lhs <= rhs + slack; break;
    case Relation::Equal: c.pass = std::abs(lhs - rhs) <= slack; break;
    case Relation::GreaterEq: c.pass = lhs + slack >= rhs; break;
    case Relation::Greater: c.pass = lhs > rhs; break;
    }
    return c;
}

Check Check::not_applicable(std::string name, double lhs, Relation rel, double rhs)
{
    Check c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.relation = rel;
    c.pass = true;
    c.applicable = false;
    return c;
}

bool CriterionReport::verdict() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.applicable || c.pass; });
}

const Check* CriterionReport::find(const std::string& name) const
{
    for (const auto& c : checks) {
        if (c.name == name)
            return &c;
    }
    return nullptr;
}

namespace {

constexpr double kUnitTol = 1e-9;

void require_unit(const SpVector& x, const char* what)
{
    const double n = xp_norm(x);
    if (std::abs(n - 1.0) > kUnitTol)
        throw PreconditionError("normalization", std::string(what) + " must have norm 1 (got " +
                                                     std::to_string(n) + ")");
}

} // namespace

void validate(const Thm13Witness& w)
{
    if (!(w.c > 0.0) || !(w.delta > 0.0) || !(w.eps > 0.0) || !(w.eps_prime > 0.0))
        throw PreconditionError("constants", "c, delta, eps and eps' must be positive");
    if (!(w.eps_prime < w.eps))
        throw PreconditionError("eps-prime", "eps' must be smaller than eps");
    if (w.N == 0)
        throw PreconditionError("N", "N must be at least 1");
    if (!w.E.empty() && w.E.front() <= w.N)
        throw PreconditionError("E", "E must lie past N");
    if (!w.E.empty() && w.E.back() > w.x.space().dim())
        throw PreconditionError("E", "E reaches past the truncation");
}

CriterionReport check_thm13(const Thm13Witness& w, double tol)
{
    validate(w);
    require_unit(w.x, "x");
    const auto& space = w.x.space();
    const double xE2 = norm_2w(restrict(w.x, w.E));
    const double x2 = norm_2w(w.x);
    const double wE = std::pow(omega(space, w.E), space.ratio_exponent());

    CriterionReport rep;
    rep.checks.push_back(
        Check::make("a", xp_norm(head_proj(w.x, w.N)), Relation::Less, 1.0 / static_cast<double>(w.N)));
    rep.checks.push_back(Check::make("b", xE2, Relation::GreaterEq, w.delta * x2, tol));
    rep.checks.push_back(Check::make("c:upper", w.c * xE2, Relation::LessEq, w.eps, tol));
    rep.checks.push_back(Check::make("c:middle", w.c * xE2, Relation::GreaterEq, wE, tol));
    rep.checks.push_back(Check::make("c:lower", wE, Relation::GreaterEq, w.eps_prime, tol));
    return rep;
}

std::vector<Thm13Witness> gen_thm13_witnesses(const WeightedSpace& space, double c, double delta, double eps,
                                              std::size_t count, std::uint64_t seed)
{
    if (!(c > 0.0) || !(delta > 0.0) || !(eps > 0.0))
        throw PreconditionError("constants", "c, delta and eps must be positive");
    // A normalized extremal block has |x_E|_2 = r(x) = omega(E)^e and
    // |x|_p = 1, so b) needs delta <= 1 and c) needs c >= 1 and
    // omega(E)^e <= eps / c; the window [eps/2, eps/c] is empty once c > 2.
    if (c < 1.0)
        throw InfeasibleError("c", "extremal witnesses need c >= 1");
    if (delta > 1.0)
        throw InfeasibleError("delta", "extremal witnesses need delta <= 1");
    const double lo = eps / 2.0;
    const double hi = std::min(eps / c, 1.0);
    if (hi < lo)
        throw InfeasibleError("window", "target window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                            "] for omega(E)^((p-2)/2p) is empty");

    const double e = space.ratio_exponent();
    const std::size_t D = space.dim();
    Rng rng(seed);
    std::vector<Thm13Witness> out;
    out.reserve(count);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t gap = static_cast<std::size_t>(rng.integer(0, 3));
        const std::size_t N = std::max<std::size_t>(1, cursor + gap);
        std::vector<std::size_t> E;
        double mass = 0.0;
        double usable = 0.0;
        for (std::size_t n = N + 1; n <= D; ++n) {
            const double m = space.weight_mass(n);
            if (std::pow(m, e) <= hi)
                usable += m;
            if (std::pow(mass + m, e) <= hi) {
                E.push_back(n);
                mass += m;
                if (std::pow(mass, e) >= lo)
                    break;
            }
        }
        if (E.empty() || std::pow(mass, e) < lo)
            throw InfeasibleError("tail", "witness " + std::to_string(k) + ": sets past N = " + std::to_string(N) +
                                              " reach omega(E)^((p-2)/2p) of at most " +
                                              std::to_string(std::min(std::pow(usable, e), hi)) +
                                              ", below eps' = " + std::to_string(lo));
        SupportSet Es(std::move(E));
        SpVector x = make_rosenthal(space, Es).vector;
        x *= 1.0 / xp_norm(x);
        cursor = Es.back();
        Thm13Witness w{std::move(x), std::move(Es), N, c, delta, eps, lo};
        if (!check_thm13(w).verdict())
            throw std::logic_error("gen_thm13_witnesses: generated witness fails the checker");
        out.push_back(std::move(w));
    }
    return out;
}

SupportSet extract_Ei(const SpVector& y, const SupportSet& F, double rho)
{
    if (y.is_zero())
        throw DomainError("extract_Ei: y must be nonzero");
    if (!(rho > 0.0))
        throw PreconditionError("rho", "rho must be positive");
    if (!y.support().subset_of(F))
        throw PreconditionError("support", "y is not supported in F");
    const auto& space = y.space();
    const double scale = rho * std::pow(norm_2w(y), -space.block_exponent());
    std::vector<std::size_t> E;
    for (std::size_t j : F) {
        if (std::abs(y[j]) >= scale * space.block_coefficient(j))
            E.push_back(j);
    }
    return SupportSet(std::move(E));
}

CriterionReport check_proof_bounds(const SpVector& y, const SupportSet& F, double rho, double delta, double tol)
{
    require_unit(y, "y");
    if (!(delta > 0.0))
        throw PreconditionError("delta", "delta must be positive");
    const auto& space = y.space();
    const double p = space.p();
    const SupportSet E = extract_Ei(y, F, rho);
    const SpVector yE = restrict(y, E);
    const SpVector yR = restrict(y, F.minus(E));
    const double yE2 = norm_2w(yE);
    const double y2 = norm_2w(y);
    const double yp = norm_p(y);
    const double wE = omega(space, E);
    const double rho_p2 = std::pow(rho, p - 2.0);

    CriterionReport rep;
    rep.checks.push_back(Check::make("i:mass_raw", wE, Relation::LessEq,
                                     yE2 * yE2 * std::pow(y2, 4.0 / (p - 2.0)) / (rho * rho), tol));
    const double mass_rhs = std::pow(delta, -4.0 / (p - 2.0)) * std::pow(yE2, space.mass_exponent()) / (rho * rho);
    if (yE2 >= delta * y2)
        rep.checks.push_back(Check::make("i:mass", wE, Relation::LessEq, mass_rhs, tol));
    else
        rep.checks.push_back(Check::not_applicable("i:mass", wE, Relation::LessEq, mass_rhs));

    double tail = 0.0;
    for (const auto& [j, v] : y.entries()) {
        if (!E.contains(j))
            tail += std::pow(std::abs(v), p);
    }
    rep.checks.push_back(Check::make("ii:tail", tail, Relation::LessEq, rho_p2, tol));

    const double nE = xp_norm(yE);
    const double unit_rhs = std::pow(std::max(0.0, 1.0 - rho_p2), 1.0 / p);
    if (std::abs(yp - 1.0) <= kUnitTol)
        rep.checks.push_back(Check::make("iii:norm_E", nE, Relation::GreaterEq, unit_rhs, tol));
    else
        rep.checks.push_back(Check::not_applicable("iii:norm_E", nE, Relation::GreaterEq, unit_rhs));
    rep.checks.push_back(Check::make("iii:norm_E_general", nE, Relation::GreaterEq,
                                     std::pow(std::max(0.0, std::pow(yp, p) - rho_p2), 1.0 / p), tol));
    rep.checks.push_back(Check::make("iii:tail_p", norm_p(yR), Relation::LessEq, std::pow(rho, 1.0 - 2.0 / p), tol));
    return rep;
}

bool MkFamily::implication_holds() const
{
    return std::all_of(rows.begin(), rows.end(), [](const MkRow& r) { return r.implication_ok; });
}

MkFamily mk_family(double K, std::span<const Block> blocks, const BlockProjection& P)
{
    if (blocks.size() != P.system().size())
        throw PreconditionError("blocks", "one block per functional of the projection is required");
    MkFamily fam;
    fam.K = K;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Block& b = blocks[i];
        const SpVector yE = restrict(b.vector(), b.designated());
        const double y2 = norm_2w(b.vector());
        if (y2 == 0.0)
            throw DomainError("mk_family: zero block vector");
        MkRow r;
        r.i = i;
        r.functional = std::abs(P.functional(i, yE));
        r.concentration = norm_2w(yE) / y2;
        r.rhs = K * r.concentration;
        r.in_MK = r.functional <= r.rhs;
        r.in_E_half_K = K > 0.0 && r.concentration >= 1.0 / (2.0 * K);
        r.guard = r.functional >= 0.5;
        r.implication_ok = !(r.guard && r.in_MK) || r.in_E_half_K;
        fam.rows.push_back(r);
    }
    return fam;
}

std::string to_string(KpClass k)
{
    switch (k) {
    case KpClass::Ell2Like: return "ell2-like";
    case KpClass::EllpLike: return "ellp-like";
    case KpClass::Mixed: return "mixed";
    }
    return "?";
}

KpResult kp_classify(std::span<const SpVector> V, double C, std::size_t N, const RatioSearchOptions& opts)
{
    if (V.empty())
        throw PreconditionError("V", "the family must be nonempty");
    KpResult res;
    res.h_inf = estimate_h_inf(V, opts).value;
    if (res.h_inf >= C) {
        res.cls = KpClass::Ell2Like;
        return res;
    }
    std::vector<SpVector> tail;
    for (const auto& v : V) {
        if (head_proj(v, N).is_zero())
            tail.push_back(v);
    }
    res.tail_count = tail.size();
    if (!tail.empty()) {
        res.r_sup_tail = estimate_r_sup(tail, opts).value;
        if (*res.r_sup_tail < C) {
            res.cls = KpClass::EllpLike;
            return res;
        }
    }
    res.cls = KpClass::Mixed;
    return res;
}

Prop24Report check_prop24(std::span<const SpVector> Z, std::span<const SpVector> samples, double eps, double beta,
                          double beta_prime, Prop24Variant variant, double tol, const RatioSearchOptions& opts)
{
    if (variant == Prop24Variant::B && eps > 1.0)
        throw PreconditionError("eps", "the 2w-distance variant needs eps <= 1");
    if (Z.empty())
        throw PreconditionError("Z", "Z must be nonempty");
    const GramProjector Q({Z.begin(), Z.end()});
    Prop24Report out;
    out.report.checks.push_back(Check::make("a", estimate_h_inf(Z, opts).value, Relation::GreaterEq, beta_prime, tol));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const SpVector& x = samples[i];
        if (x.is_zero() || !(ratio(x) > beta)) {
            ++out.skipped;
            continue;
        }
        ++out.evaluated;
        const SpVector y = x - Q.apply(x);
        const double dist = norm_2w(y);
        const double scale = variant == Prop24Variant::B ? norm_2w(x) : xp_norm(x);
        out.report.checks.push_back(Check::make("b[" + std::to_string(i) + "]", dist, Relation::Less, eps * scale));
        // The residual is orthogonal to span Z, so its own distance to the
        // span is its full 2w length.
        if (!y.is_zero() && ratio(y) > beta) {
            out.report.checks.push_back(Check::make("orth[" + std::to_string(i) + "]", norm_2w(y - Q.apply(y)),
                                                    Relation::GreaterEq, norm_2w(y), tol));
        }
    }
    return out;
}

Prop21Report prop21_diagnostic(std::span<const SpVector> u, std::span<const SpVector> w, const BlockProjection& P,
                               double K, std::size_t window, const OpNormOptions& opnorm,
                               const RatioSearchOptions& ratio_opts)
{
    if (u.size() != w.size())
        throw PreconditionError("lists", "u and w must have the same length");
    if (window == 0 || u.empty())
        throw PreconditionError("window", "the window is empty");
    if (window > u.size())
        throw PreconditionError("window", "window longer than the sequence");
    if (!(K > 0.0))
        throw PreconditionError("K", "K must be positive");

    Prop21Report rep;
    rep.window_begin = u.size() - window;
    std::vector<SpVector> us;
    for (std::size_t n = rep.window_begin; n < u.size(); ++n) {
        const SpVector z = u[n] + w[n];
        const double s = xp_norm(z);
        if (s == 0.0)
            throw DomainError("prop21_diagnostic: z_" + std::to_string(n + 1) + " is zero");
        const double r = ratio(z);
        rep.window_ratios.push_back(r);
        rep.beta_hat = std::max(rep.beta_hat, r);
        if (!u[n].is_zero())
            us.push_back((1.0 / s) * u[n]);
    }
    if (!us.empty()) {
        rep.beta_hat_prime = estimate_h_inf(us, ratio_opts).value;
        rep.bound = *rep.beta_hat_prime / (K * rep.beta_hat);
        const double c = P.system().c();
        const double d = P.system().delta();
        rep.eps_threshold = *rep.beta_hat_prime * c * d / std::max(c, 1.0 / d);
    }
    OpNormOptions o = opnorm;
    o.mode = NormMode::XP;
    rep.opnorm_lower = estimate_opnorm(P, o).lower;
    return rep;
}

namespace {

// Dense restriction of the affine map a -> x - Y a to the union support.
struct AffineResidual {
    double p = 0;
    std::vector<double> w;
    Eigen::VectorXd x;
    Eigen::MatrixXd Y;

    double value(const Eigen::VectorXd& a) const
    {
        const Eigen::VectorXd r = x - Y * a;
        return dense::xp_norm(p, w, std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
    }
};

AffineResidual make_residual(std::span<const SpVector> Y, const SpVector& x)
{
    SupportSet U = x.support();
    for (const auto& y : Y)
        U = U.unite(y.support());
    const auto& idx = U.indices();
    auto pos = [&](std::size_t n) {
        return static_cast<Eigen::Index>(std::lower_bound(idx.begin(), idx.end(), n) - idx.begin());
    };
    AffineResidual R;
    R.p = x.space().p();
    for (std::size_t n : idx)
        R.w.push_back(x.space().weight(n));
    R.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
    for (const auto& [n, v] : x.entries())
        R.x[pos(n)] = v;
    R.Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(Y.size()));
    for (std::size_t j = 0; j < Y.size(); ++j) {
        for (const auto& [n, v] : Y[j].entries())
            R.Y(pos(n), static_cast<Eigen::Index>(j)) = v;
    }
    return R;
}

// Convex descent: coordinate and random directions, halving the step when
// no direction improves. Only strict improvements are accepted.
double descend(const AffineResidual& R, Eigen::VectorXd a, double step, Rng& rng)
{
    const Eigen::Index m = a.size();
    double val = R.value(a);
    const double min_step = step * 1e-12;
    Eigen::VectorXd t(m);
    Eigen::VectorXd d(m);
    for (std::size_t it = 0; it < 4000 && step > min_step; ++it) {
        bool improved = false;
        for (Eigen::Index k = 0; k < m; ++k) {
            for (double s : {1.0, -1.0}) {
                t = a;
                t[k] += s * step;
                const double v = R.value(t);
                if (v < val) {
                    a.swap(t);
                    val = v;
                    improved = true;
                    break;
                }
            }
        }
        for (int r = 0; r < 4 && m > 1; ++r) {
            for (Eigen::Index k = 0; k < m; ++k)
                d[k] = rng.normal();
            d.normalize();
            for (double s : {1.0, -1.0}) {
                t = a + (s * step) * d;
                const double v = R.value(t);
                if (v < val) {
                    a.swap(t);
                    val = v;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved)
            step *= 0.5;
    }
    return val;
}

} // namespace

double relative_defect(std::span<const SpVector> Y, const SpVector& x, std::uint64_t seed, std::size_t starts)
{
    if (x.is_zero())
        throw DomainError("relative_defect: x must be nonzero");
    const double nx = xp_norm(x);
    if (Y.empty())
        return 1.0;
    for (const auto& y : Y)
        require_same_space(y.space(), x.space());
    const AffineResidual R = make_residual(Y, x);
    const auto m = static_cast<Eigen::Index>(Y.size());

    double ymin = std::numeric_limits<double>::infinity();
    for (const auto& y : Y) {
        const double ny = xp_norm(y);
        if (ny > 0.0)
            ymin = std::min(ymin, ny);
    }
    if (!std::isfinite(ymin))
        return 1.0;
    const double step = 0.5 * nx / ymin;

    std::vector<Eigen::VectorXd> seeds{Eigen::VectorXd::Zero(m)};
    try {
        const GramProjector Q({Y.begin(), Y.end()});
        seeds.push_back(Q.coefficients(x));
    } catch (const SingularBasis&) {
    }

    double best = R.value(seeds.front());
    for (std::size_t s = 0; s < std::max<std::size_t>(starts, seeds.size()); ++s) {
        Rng rng(derive_seed(seed, s));
        Eigen::VectorXd a0;
        if (s < seeds.size()) {
            a0 = seeds[s];
        } else {
            a0 = seeds.back();
            for (Eigen::Index k = 0; k < m; ++k)
                a0[k] += step * rng.normal();
        }
        best = std::min(best, descend(R, std::move(a0), step, rng));
    }
    return best / nx;
}

DefectResult defect_experiment(std::span<const SpVector> Y, double alpha, std::size_t samples, std::uint64_t seed,
                               std::span<const SpVector> candidates)
{
    if (!(alpha > 0.0))
        throw PreconditionError("alpha", "alpha must be positive");
    if (Y.empty())
        throw PreconditionError("Y", "Y must be nonempty");
    const auto& space = Y.front().space();
    DefectResult out{0.0, SpVector(space), 0};

    auto consider = [&](const SpVector& x, std::uint64_t s) {
        if (x.is_zero() || !(ratio(x) < alpha))
            return;
        const double d = relative_defect(Y, x, s);
        ++out.evaluated;
        if (d > out.worst_defect || out.evaluated == 1) {
            out.worst_defect = d;
            out.witness = x;
        }
    };

    for (std::size_t i = 0; i < candidates.size(); ++i)
        consider(candidates[i], derive_seed(seed, i));

    Rng rng(derive_seed(seed, 0xdefec7));
    const std::size_t D = space.dim();
    const std::size_t max_support = std::min<std::size_t>(D, 8);
    std::size_t accepted = 0;
    for (std::size_t attempt = 0; attempt < 50 * samples && accepted < samples; ++attempt) {
        const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_support)));
        std::vector<SpVector::Entry> entries;
        std::vector<std::size_t> picked;
        while (picked.size() < k) {
            const auto n = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(D)));
            if (std::find(picked.begin(), picked.end(), n) == picked.end())
                picked.push_back(n);
        }
        std::sort(picked.begin(), picked.end());
        for (std::size_t n : picked)
            entries.emplace_back(n, rng.normal());
        SpVector x(space, std::move(entries));
        if (x.is_zero() || !(ratio(x) < alpha))
            continue;
        ++accepted;
        consider(x, derive_seed(seed, candidates.size() + attempt));
    }
    return out;
}

std::vector<SpVector> perturbed_basic_sequence(const WeightedSpace& space, std::size_t from, std::size_t m,
                                               double eta)
{
    const std::size_t D = space.dim();
    std::vector<std::size_t> idx;
    for (std::size_t n = from + 1; n <= D; ++n)
        idx.push_back(n);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return space.weight(a) < space.weight(b); });
    if (idx.size() > m)
        idx.resize(m);
    std::sort(idx.begin(), idx.end());
    std::vector<SpVector> out;
    for (std::size_t n : idx) {
        std::vector<SpVector::Entry> e{{n, 1.0}};
        if (n + 1 <= D && eta != 0.0)
            e.emplace_back(n + 1, eta);
        out.emplace_back(space, std::move(e));
    }
    return out;
}

} // namespace xplab
