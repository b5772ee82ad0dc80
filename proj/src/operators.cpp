#include "xplab/operators.hpp"

#include "pattern_search.hpp"
#include "xplab/error.hpp"
#include "xplab/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace xplab {

namespace {

constexpr std::size_t kMaxMaterializedDim = 4096;
constexpr double kMaxGramCondition = 1e12;

std::span<const double> as_span(const Eigen::VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

Eigen::MatrixXd materialize(const LinearOperator& A)
{
    const std::size_t D = A.dim();
    if (D > kMaxMaterializedDim)
        throw std::invalid_argument("operator dimension " + std::to_string(D) + " exceeds the estimator cap " +
                                    std::to_string(kMaxMaterializedDim));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
    std::vector<double> e(D, 0.0);
    std::vector<double> col(D, 0.0);
    for (std::size_t n = 0; n < D; ++n) {
        e[n] = 1.0;
        A.apply_dense(e, col);
        e[n] = 0.0;
        for (std::size_t r = 0; r < D; ++r)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n)) = col[r];
    }
    return M;
}

double mode_norm(NormMode mode, double p, std::span<const double> w, std::span<const double> x)
{
    return mode == NormMode::XP ? dense::xp_norm(p, w, x) : dense::norm_2w(w, x);
}

double mode_norm(NormMode mode, const SpVector& x)
{
    return mode == NormMode::XP ? xp_norm(x) : norm_2w(x);
}

} // namespace

// ------------------------------------------------------------ LinearOperator

void LinearOperator::apply_dense(std::span<const double> in, std::span<double> out) const
{
    const SpVector y = apply(SpVector::from_dense(space(), in));
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [n, v] : y.entries())
        out[n - 1] = v;
}

MatrixOperator::MatrixOperator(WeightedSpace space, Eigen::MatrixXd matrix)
    : space_(std::move(space)), m_(std::move(matrix))
{
    const auto D = static_cast<Eigen::Index>(space_.dim());
    if (m_.rows() != D || m_.cols() != D)
        throw std::invalid_argument("MatrixOperator: matrix must be " + std::to_string(D) + " x " +
                                    std::to_string(D));
    if (!m_.allFinite())
        throw std::invalid_argument("MatrixOperator: non-finite entry");
}

MatrixOperator MatrixOperator::identity(const WeightedSpace& space, double scale)
{
    const auto D = static_cast<Eigen::Index>(space.dim());
    return MatrixOperator(space, scale * Eigen::MatrixXd::Identity(D, D));
}

SpVector MatrixOperator::apply(const SpVector& x) const
{
    require_same_space(space_, x.space());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_.rows());
    for (const auto& [n, v] : x.entries())
        y += v * m_.col(static_cast<Eigen::Index>(n - 1));
    return SpVector::from_dense(space_, as_span(y));
}

void MatrixOperator::apply_dense(std::span<const double> in, std::span<double> out) const
{
    Eigen::Map<const Eigen::VectorXd> xin(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<Eigen::VectorXd> yout(out.data(), static_cast<Eigen::Index>(out.size()));
    yout.noalias() = m_ * xin;
}

// --------------------------------------------------------------- BlockSystem

BlockSystem::BlockSystem(std::vector<Block> blocks, double delta, double c, Unchecked)
    : blocks_(std::move(blocks)), delta_(delta), c_(c)
{
    if (blocks_.empty())
        throw PreconditionError("blocks", "a block system needs at least one block");
    if (!(delta_ > 0.0) || !(c_ > 0.0))
        throw PreconditionError("constants", "delta and c must be positive");
    const auto& space = blocks_.front().space();
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (!(blocks_[i].space() == space))
            throw SpaceMismatch("BlockSystem: blocks over different spaces");
        for (std::size_t j = 0; j < i; ++j) {
            if (!blocks_[i].support().disjoint(blocks_[j].support()))
                throw PreconditionError("disjoint-supports", "blocks " + std::to_string(j) + " and " +
                                                                 std::to_string(i) + " overlap");
            if (!blocks_[i].designated().disjoint(blocks_[j].designated()))
                throw PreconditionError("disjoint-E", "designated sets " + std::to_string(j) + " and " +
                                                          std::to_string(i) + " overlap");
        }
    }
    // Re-evaluate every block's conditions under the global constants.
    for (auto& b : blocks_)
        b = Block::unchecked(b.support(), b.vector(), b.designated(), delta_, c_);
    induced_.reserve(blocks_.size());
    for (const auto& b : blocks_)
        induced_.push_back(std::pow(omega(space, b.designated()), space.ratio_exponent()));
}

BlockSystem::BlockSystem(std::vector<Block> blocks, double delta, double c)
    : BlockSystem(std::move(blocks), delta, c, Unchecked{})
{
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto& cond = blocks_[j].conditions();
        if (!cond.a)
            throw PreconditionError("condition-a", "block " + std::to_string(j) + " fails (a) for delta = " +
                                                       std::to_string(delta_));
        if (!cond.b)
            throw PreconditionError("condition-b", "block " + std::to_string(j) + " fails (b) for c = " +
                                                       std::to_string(c_));
    }
}

BlockSystem BlockSystem::unchecked(std::vector<Block> blocks, double delta, double c)
{
    return BlockSystem(std::move(blocks), delta, c, Unchecked{});
}

BlockSystem BlockSystem::with_tight_constants(std::vector<Block> blocks)
{
    double delta = std::numeric_limits<double>::infinity();
    double c = 0.0;
    for (const auto& b : blocks) {
        delta = std::min(delta, b.tight_delta());
        c = std::max(c, b.tight_c());
    }
    return BlockSystem(std::move(blocks), delta, c);
}

// ----------------------------------------------------------- BlockProjection

BlockProjection::BlockProjection(BlockSystem system) : system_(std::move(system))
{
    const auto w = space().weights();
    for (const auto& b : system_.blocks()) {
        const SpVector zE = restrict(b.vector(), b.designated());
        const double n2 = norm_2w(zE);
        if (n2 == 0.0)
            throw DomainError("BlockProjection: a block has no 2-mass on its designated set");
        std::vector<std::pair<std::size_t, double>> zc;
        std::vector<std::pair<std::size_t, double>> fc;
        for (const auto& [n, v] : b.vector().entries())
            zc.emplace_back(n - 1, v);
        for (const auto& [n, v] : zE.entries())
            fc.emplace_back(n - 1, v * w[n - 1] * w[n - 1] / (n2 * n2));
        zcols_.push_back(std::move(zc));
        fcols_.push_back(std::move(fc));
    }
}

double BlockProjection::functional(std::size_t j, const SpVector& x) const
{
    return functional_apply(system_.blocks().at(j), x, FunctionalForm::Restricted);
}

SpVector BlockProjection::apply(const SpVector& x) const
{
    require_same_space(space(), x.space());
    SpVector out(space());
    for (const auto& b : system_.blocks()) {
        const double f = functional_apply(b, x, FunctionalForm::Restricted);
        if (f != 0.0)
            out.axpy(f, b.vector());
    }
    return out;
}

void BlockProjection::apply_dense(std::span<const double> in, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < zcols_.size(); ++j) {
        double f = 0.0;
        for (const auto& [k, c] : fcols_[j])
            f += c * in[k];
        if (f == 0.0)
            continue;
        for (const auto& [k, v] : zcols_[j])
            out[k] += f * v;
    }
}

double BlockProjection::norm_2w_exact() const
{
    double best = 0.0;
    for (const auto& b : system_.blocks())
        best = std::max(best, norm_2w(b.vector()) / norm_2w(restrict(b.vector(), b.designated())));
    return best;
}

double BlockProjection::xp_norm_upper() const
{
    // Per block, with f_j the functional and q = p/(p-1):
    //   |f_j(x)| <= a_j |x_{E_j}|_p,  a_j = |(z_n w_n^2)_{E_j}|_q / |z_{E_j}|_2^2
    //   |f_j(x)| <= |x_{E_j}|_2 / |z_{E_j}|_2
    const auto& space = system_.space();
    const double p = space.p();
    const double q = p / (p - 1.0);
    const auto w = space.weights();
    double max_b = 0.0;
    double max_a2 = 0.0;
    double max_ap = 0.0;
    for (const auto& b : system_.blocks()) {
        const SpVector zE = restrict(b.vector(), b.designated());
        const double zE2 = norm_2w(zE);
        double s = 0.0;
        for (const auto& [n, v] : zE.entries())
            s += std::pow(std::abs(v) * w[n - 1] * w[n - 1], q);
        const double a = std::pow(s, 1.0 / q) / (zE2 * zE2);
        max_b = std::max(max_b, norm_2w(b.vector()) / zE2);
        max_a2 = std::max(max_a2, a * norm_2w(b.vector()));
        max_ap = std::max(max_ap, a * norm_p(b.vector()));
    }
    const double m = static_cast<double>(system_.size());
    const double two_part = std::min(max_b, max_a2 * std::pow(m, space.ratio_exponent()));
    return std::max(two_part, max_ap);
}

double prop12_bound(const BlockSystem& sys)
{
    return std::max(1.0 / sys.delta(), sys.c());
}

std::vector<RatioWindow> ratio_bounds_check(const BlockSystem& sys, double rel_tol)
{
    std::vector<RatioWindow> out;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        const double wj = sys.induced_weights()[j];
        RatioWindow rw{j, wj / sys.c(), ratio(sys.blocks()[j].vector()), wj / sys.delta(), false};
        rw.ok = rw.lo <= rw.r * (1 + rel_tol) && rw.r <= rw.hi * (1 + rel_tol);
        out.push_back(rw);
    }
    return out;
}

SpVector project(const BlockProjection& P, const SpVector& x)
{
    return P.apply(x);
}

// ------------------------------------------------------------- GramProjector

GramProjector::GramProjector(std::vector<SpVector> basis) : basis_(std::move(basis))
{
    if (basis_.empty())
        throw SingularBasis("GramProjector: empty basis");
    const auto k = static_cast<Eigen::Index>(basis_.size());
    Eigen::MatrixXd G(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        require_same_space(basis_[0].space(), basis_[static_cast<std::size_t>(i)].space());
        for (Eigen::Index j = 0; j <= i; ++j)
            G(i, j) = G(j, i) = inner(basis_[static_cast<std::size_t>(i)], basis_[static_cast<std::size_t>(j)]);
    }
    const Eigen::VectorXd d = G.diagonal();
    if ((d.array() <= 0.0).any())
        throw SingularBasis("GramProjector: zero vector in basis");
    const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd C = s.asDiagonal() * G * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > kMaxGramCondition)
        throw SingularBasis("GramProjector: basis is dependent or ill-conditioned (condition " +
                            std::to_string(lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity()) +
                            ")");
    cond_ = lmax / lmin;
    llt_.compute(G);
    if (llt_.info() != Eigen::Success)
        throw SingularBasis("GramProjector: Cholesky factorization failed");
}

Eigen::VectorXd GramProjector::coefficients(const SpVector& x) const
{
    require_same_space(space(), x.space());
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i)
        rhs[static_cast<Eigen::Index>(i)] = inner(basis_[i], x);
    return llt_.solve(rhs);
}

SpVector GramProjector::apply(const SpVector& x) const
{
    const Eigen::VectorXd a = coefficients(x);
    SpVector out(space());
    for (std::size_t i = 0; i < basis_.size(); ++i)
        out.axpy(a[static_cast<Eigen::Index>(i)], basis_[i]);
    return out;
}

void GramProjector::apply_dense(std::span<const double> in, std::span<double> out) const
{
    const auto w = space().weights();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        double s = 0.0;
        for (const auto& [n, v] : basis_[i].entries())
            s += v * w[n - 1] * w[n - 1] * in[n - 1];
        rhs[static_cast<Eigen::Index>(i)] = s;
    }
    const Eigen::VectorXd a = llt_.solve(rhs);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        for (const auto& [n, v] : basis_[i].entries())
            out[n - 1] += a[static_cast<Eigen::Index>(i)] * v;
    }
}

SpVector gram_project(const GramProjector& Q, const SpVector& x)
{
    return Q.apply(x);
}

// ----------------------------------------------------------------- estimates

double exact_norm_2w(const LinearOperator& A)
{
    const Eigen::MatrixXd M = materialize(A);
    const auto w = A.space().weights();
    Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i)
        wv[static_cast<Eigen::Index>(i)] = w[i];
    const Eigen::MatrixXd S = wv.asDiagonal() * M * wv.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

OpNormEstimate estimate_opnorm(const LinearOperator& A, const OpNormOptions& opts)
{
    const auto& space = A.space();
    const std::size_t D = space.dim();
    const double p = space.p();
    const auto w = space.weights();
    const Eigen::MatrixXd M = materialize(A);

    OpNormEstimate est{0.0, std::nullopt, SpVector(space), false, opts.budget, opts.seed, 0};
    if (const auto* bp = dynamic_cast<const BlockProjection*>(&A))
        est.upper = opts.mode == NormMode::XP ? bp->xp_norm_upper() : bp->norm_2w_exact();
    else if (opts.mode == NormMode::TwoW)
        est.upper = exact_norm_2w(A);

    if (D == 0 || M.isZero(0.0)) {
        est.zero_operator = true;
        return est;
    }

    auto objective = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        const double nx = mode_norm(opts.mode, p, w, as_span(x));
        if (!(nx > 0.0))
            return -std::numeric_limits<double>::infinity();
        return mode_norm(opts.mode, p, w, as_span(y)) / nx;
    };

    const std::size_t budget = opts.budget;
    std::vector<detail::PatternSearchResult> results(budget);
    auto run_start = [&](std::size_t k) {
        Rng rng(derive_seed(opts.seed, k));
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D));
        if (k < D) {
            x0[static_cast<Eigen::Index>(k)] = 1.0;
        } else {
            for (std::size_t i = 0; i < D; ++i)
                x0[static_cast<Eigen::Index>(i)] = rng.normal();
        }
        results[k] = detail::pattern_search(M, std::move(x0), objective, rng, opts.max_iters);
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(opts.threads, budget));
    if (threads == 1) {
        for (std::size_t k = 0; k < budget; ++k)
            run_start(k);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t k = t; k < budget; k += threads)
                    run_start(k);
            });
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < budget; ++k) {
        if (results[k].value > results[best].value)
            best = k;
    }
    if (budget == 0)
        return est;

    SpVector witness = SpVector::from_dense(space, as_span(results[best].x));
    const double nw = mode_norm(opts.mode, witness);
    witness *= 1.0 / nw;
    est.lower = mode_norm(opts.mode, A.apply(witness)) / mode_norm(opts.mode, witness);
    est.witness = std::move(witness);
    est.best_start = best;
    if (est.lower == 0.0)
        est.zero_operator = true;
    return est;
}

namespace {

struct SpanCoordinates {
    std::vector<std::size_t> support; // union support, 1-based
    Eigen::MatrixXd B;                // |support| x k
    std::vector<double> w;            // weights on the union support
};

SpanCoordinates span_coordinates(std::span<const SpVector> V)
{
    if (V.empty())
        throw SingularBasis("ratio search: empty family");
    SupportSet U;
    for (const auto& v : V)
        U = U.unite(v.support());
    SpanCoordinates sc;
    sc.support = U.indices();
    sc.B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(U.size()), static_cast<Eigen::Index>(V.size()));
    for (std::size_t j = 0; j < V.size(); ++j) {
        for (const auto& [n, val] : V[j].entries()) {
            const auto it = std::lower_bound(sc.support.begin(), sc.support.end(), n);
            sc.B(static_cast<Eigen::Index>(it - sc.support.begin()), static_cast<Eigen::Index>(j)) = val;
        }
    }
    for (std::size_t n : sc.support)
        sc.w.push_back(V[0].space().weight(n));
    return sc;
}

RatioExtremum ratio_search(std::span<const SpVector> V, const RatioSearchOptions& opts, bool maximize)
{
    GramProjector independence_check({V.begin(), V.end()});
    const auto sc = span_coordinates(V);
    const auto& space = V[0].space();
    const double p = space.p();
    const double sign = maximize ? 1.0 : -1.0;

    auto objective = [&](const Eigen::VectorXd&, const Eigen::VectorXd& y) {
        const double np = dense::norm_p(p, as_span(y));
        if (!(np > 0.0))
            return -std::numeric_limits<double>::infinity();
        return sign * dense::norm_2w(sc.w, as_span(y)) / np;
    };

    const std::size_t k = V.size();
    const std::size_t total = k + opts.starts;
    detail::PatternSearchResult best;
    for (std::size_t s = 0; s < total; ++s) {
        Rng rng(derive_seed(opts.seed, s));
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
        if (s < k) {
            a[static_cast<Eigen::Index>(s)] = 1.0;
        } else {
            for (std::size_t i = 0; i < k; ++i)
                a[static_cast<Eigen::Index>(i)] = rng.normal();
        }
        auto r = detail::pattern_search(sc.B, std::move(a), objective, rng, opts.max_iters);
        if (r.value > best.value)
            best = std::move(r);
    }

    SpVector witness(space);
    for (std::size_t j = 0; j < k; ++j)
        witness.axpy(best.x[static_cast<Eigen::Index>(j)], V[j]);
    witness *= 1.0 / xp_norm(witness);
    return {ratio(witness), std::move(witness)};
}

} // namespace

RatioExtremum estimate_r_sup(std::span<const SpVector> V, const RatioSearchOptions& opts)
{
    return ratio_search(V, opts, true);
}

RatioExtremum estimate_h_inf(std::span<const SpVector> V, const RatioSearchOptions& opts)
{
    return ratio_search(V, opts, false);
}

double certified_h_lower(std::span<const SpVector> V)
{
    GramProjector independence_check({V.begin(), V.end()});
    const auto k = static_cast<Eigen::Index>(V.size());
    Eigen::MatrixXd Gw(k, k);
    Eigen::MatrixXd Gu(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const auto& a = V[static_cast<std::size_t>(i)];
            const auto& b = V[static_cast<std::size_t>(j)];
            Gw(i, j) = Gw(j, i) = inner(a, b);
            double s = 0.0;
            for (const auto& [n, v] : a.entries())
                s += v * b[n];
            Gu(i, j) = Gu(j, i) = s;
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Gw, Gu, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

Prop26Chain prop26_chain(const GramProjector& Q, double beta_prime, const SpVector& x, double norm_q)
{
    if (!(beta_prime > 0.0) || beta_prime > 1.0)
        throw PreconditionError("beta-prime", "beta' must lie in (0, 1]");
    if (x.is_zero())
        throw DomainError("prop26_chain: x must be nonzero");
    Prop26Chain out;
    out.norm_q = norm_q;
    out.lhs = xp_norm(Q.apply(x));
    out.rhs = std::sqrt(norm_q) * std::sqrt(ratio(x)) * xp_norm(x) / beta_prime;
    out.ok = out.lhs <= out.rhs;
    return out;
}

double gram_norm_for_chain(const GramProjector& Q, double safety, const OpNormOptions& opts)
{
    OpNormOptions o = opts;
    o.mode = NormMode::XP;
    return std::max(1.0, estimate_opnorm(Q, o).lower) * safety;
}

} // namespace xplab
