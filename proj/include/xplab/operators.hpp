#pragma once

#include "xplab/blocks.hpp"
#include "xplab/space.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace xplab {

/// A linear map of the truncation into itself.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;

    virtual const WeightedSpace& space() const = 0;
    virtual SpVector apply(const SpVector& x) const = 0;

    /// Dense kernel: out = A in, both of length dim(). The default goes
    /// through apply().
    virtual void apply_dense(std::span<const double> in, std::span<double> out) const;

    std::size_t dim() const { return space().dim(); }
};

/// Dense D x D matrix in coefficient coordinates.
class MatrixOperator final : public LinearOperator {
public:
    MatrixOperator(WeightedSpace space, Eigen::MatrixXd matrix);
    static MatrixOperator identity(const WeightedSpace& space, double scale = 1.0);

    const WeightedSpace& space() const override { return space_; }
    SpVector apply(const SpVector& x) const override;
    void apply_dense(std::span<const double> in, std::span<double> out) const override;
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }

private:
    WeightedSpace space_;
    Eigen::MatrixXd m_;
};

/// Disjointly supported blocks with pairwise disjoint designated sets, all
/// admissible for the global (delta, c).
class BlockSystem {
public:
    /// Checked: throws PreconditionError on overlapping supports or sets,
    /// mixed spaces, or a block failing (a)/(b) for the global constants.
    BlockSystem(std::vector<Block> blocks, double delta, double c);
    /// Keeps the structural checks but lets blocks fail (a)/(b).
    static BlockSystem unchecked(std::vector<Block> blocks, double delta, double c);
    /// Global constants chosen as the tightest ones the blocks allow.
    static BlockSystem with_tight_constants(std::vector<Block> blocks);

    const WeightedSpace& space() const { return blocks_.front().space(); }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    std::size_t size() const noexcept { return blocks_.size(); }
    double delta() const noexcept { return delta_; }
    double c() const noexcept { return c_; }
    /// w'_j = omega(E_j)^{(p-2)/2p}.
    const std::vector<double>& induced_weights() const noexcept { return induced_; }

private:
    struct Unchecked {};
    BlockSystem(std::vector<Block> blocks, double delta, double c, Unchecked);

    std::vector<Block> blocks_;
    double delta_;
    double c_;
    std::vector<double> induced_;
};

/// Px = sum_j z_j^*(x) z_j with the restricted block functionals.
class BlockProjection final : public LinearOperator {
public:
    explicit BlockProjection(BlockSystem system);

    const WeightedSpace& space() const override { return system_.space(); }
    const BlockSystem& system() const noexcept { return system_; }
    SpVector apply(const SpVector& x) const override;
    void apply_dense(std::span<const double> in, std::span<double> out) const override;

    /// z_j^*(x).
    double functional(std::size_t j, const SpVector& x) const;

    /// Exact norm in the 2w -> 2w mode: max_j |z_j|_2 / |z_{j|E_j}|_2.
    double norm_2w_exact() const;
    /// A certified upper bound on the X_{p,w} operator norm; never larger
    /// than max{1/delta, c}.
    double xp_norm_upper() const;

private:
    BlockSystem system_;
    // Dense caches: for each block its (index, coefficient) pairs, and the
    // functional weights z_n w_n^2 / |z_E|_2^2 over E.
    std::vector<std::vector<std::pair<std::size_t, double>>> zcols_;
    std::vector<std::vector<std::pair<std::size_t, double>>> fcols_;
};

/// max{1/delta, c}.
double prop12_bound(const BlockSystem& sys);

struct RatioWindow {
    std::size_t j;
    double lo; // c^{-1} omega(E_j)^{(p-2)/2p}
    double r;  // r(z_j)
    double hi; // delta^{-1} omega(E_j)^{(p-2)/2p}
    bool ok;
};

/// Per-block check of c^{-1} w'_j <= r(z_j) <= delta^{-1} w'_j.
std::vector<RatioWindow> ratio_bounds_check(const BlockSystem& sys, double rel_tol = 1e-12);

/// Orthogonal projection onto span(basis) for the weighted inner product.
class GramProjector final : public LinearOperator {
public:
    /// Throws SingularBasis on a dependent basis or a normalized Gram
    /// condition number above 1e12.
    explicit GramProjector(std::vector<SpVector> basis);

    const WeightedSpace& space() const override { return basis_.front().space(); }
    const std::vector<SpVector>& basis() const noexcept { return basis_; }
    SpVector apply(const SpVector& x) const override;
    void apply_dense(std::span<const double> in, std::span<double> out) const override;
    /// Coordinates of Qx in the basis.
    Eigen::VectorXd coefficients(const SpVector& x) const;
    double condition_number() const noexcept { return cond_; }

private:
    std::vector<SpVector> basis_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double cond_ = 1.0;
};

SpVector project(const BlockProjection& P, const SpVector& x);
SpVector gram_project(const GramProjector& Q, const SpVector& x);

enum class NormMode { XP, TwoW };

struct OpNormOptions {
    NormMode mode = NormMode::XP;
    std::size_t budget = 64;   // number of starts
    std::uint64_t seed = 0;
    std::size_t threads = 1;   // results do not depend on this
    std::size_t max_iters = 200;
};

struct OpNormEstimate {
    double lower = 0;                 // attained at `witness`
    std::optional<double> upper;      // analytic bound, when one is known
    SpVector witness;
    bool zero_operator = false;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t best_start = 0;
};

/// Lower bound on sup ||Ax|| / ||x|| from seeded multi-start pattern
/// search. Start k is e_{k+1} for k < dim, a seeded Gaussian direction
/// otherwise; each start is polished independently, so the result is
/// monotone in the budget and independent of the thread count.
OpNormEstimate estimate_opnorm(const LinearOperator& A, const OpNormOptions& opts = {});

/// The exact 2w -> 2w norm of a dense operator (largest singular value of
/// W A W^{-1}).
double exact_norm_2w(const LinearOperator& A);

struct RatioSearchOptions {
    std::size_t starts = 32;
    std::uint64_t seed = 0;
    std::size_t max_iters = 400;
};

struct RatioExtremum {
    double value = 0;
    SpVector witness;
};

/// sup / inf of r over span(V) \ {0}. Throws SingularBasis on dependent V.
RatioExtremum estimate_r_sup(std::span<const SpVector> V, const RatioSearchOptions& opts = {});
RatioExtremum estimate_h_inf(std::span<const SpVector> V, const RatioSearchOptions& opts = {});

/// Certified lower bound on h(span V): sqrt of the least generalized
/// eigenvalue of (weighted Gram, unweighted Gram), valid since |u|_p <= |u|_{l2}.
double certified_h_lower(std::span<const SpVector> V);

struct Prop26Chain {
    double lhs = 0; // ||Qx||
    double rhs = 0; // ||Q||^{1/2} r(x)^{1/2} ||x|| / beta'
    double norm_q = 0;
    bool ok = false;
};

/// Evaluates ||Qx|| <= ||Q||^{1/2} r(x)^{1/2} ||x|| / beta'. `norm_q` must
/// be an upper bound for the X_{p,w} norm of Q.
Prop26Chain prop26_chain(const GramProjector& Q, double beta_prime, const SpVector& x, double norm_q);

/// Upper bound for ||Q|| used by the chain: max(1, sampled estimate) times
/// the safety factor.
double gram_norm_for_chain(const GramProjector& Q, double safety = 1.05, const OpNormOptions& opts = {});

} // namespace xplab
