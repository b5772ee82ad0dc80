#pragma once

#include "xplab/blocks.hpp"
#include "xplab/operators.hpp"
#include "xplab/space.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xplab {

enum class Relation { Less, LessEq, Equal, GreaterEq, Greater };

std::string to_string(Relation r);

/// One inequality with both numeric sides.
struct Check {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    Relation relation = Relation::LessEq;
    bool pass = false;
    bool applicable = true;

    /// Non-strict relations (including Equal) allow a relative slack of
    /// `tol`; strict ones are evaluated exactly.
    static Check make(std::string name, double lhs, Relation rel, double rhs, double tol = 0.0);
    static Check not_applicable(std::string name, double lhs, Relation rel, double rhs);
};

struct CriterionReport {
    std::vector<Check> checks;

    /// Conjunction of the applicable checks.
    bool verdict() const;
    const Check* find(const std::string& name) const;
};

// ------------------------------------------------------------ witness machinery

/// Data of the quantitative witness criterion: a unit vector x, a finite
/// set E past N, and constants (c, delta, eps, eps').
struct Thm13Witness {
    SpVector x;
    SupportSet E;
    std::size_t N = 1;
    double c = 1;
    double delta = 1;
    double eps = 1;
    double eps_prime = 0.5;
};

/// Throws PreconditionError when eps' >= eps, E reaches below N+1 or past
/// the truncation, N = 0, or a constant is nonpositive.
void validate(const Thm13Witness& w);

/// a) ||x_{[1,N]}|| < 1/N;  b) |x_E|_2 >= delta |x|_2;
/// c) eps >= c|x_E|_2 >= omega(E)^{(p-2)/2p} >= eps'.
/// Requires ||x|| = 1 to 1e-9.
CriterionReport check_thm13(const Thm13Witness& w, double tol = 1e-9);

/// Normalized extremal blocks on greedily chosen, pairwise disjoint tail
/// sets with omega(E)^{(p-2)/2p} in [eps/2, min(eps/c, 1)]; eps' = eps/2.
/// Throws InfeasibleError naming the achievable range when the tail cannot
/// reach eps'.
std::vector<Thm13Witness> gen_thm13_witnesses(const WeightedSpace& space, double c, double delta, double eps,
                                              std::size_t count, std::uint64_t seed);

/// {j in F : |y(j)| >= rho w_j^{2/(p-2)} |y|_2^{-2/(p-2)}}, ties included.
SupportSet extract_Ei(const SpVector& y, const SupportSet& F, double rho);

/// The large-coefficient estimates for a unit vector y supported in F:
///  i:mass_raw     omega(E) <= rho^{-2} |y_E|_2^2 |y|_2^{4/(p-2)}
///  i:mass         omega(E) <= rho^{-2} delta^{-4/(p-2)} |y_E|_2^{2p/(p-2)}
///                 (applicable when |y_E|_2 >= delta |y|_2)
///  ii:tail        sum_{j notin E} |y(j)|^p <= rho^{p-2}
///  iii:norm_E     ||y_E|| >= (1 - rho^{p-2})^{1/p}   (applicable when |y|_p = 1)
///  iii:norm_E_general ||y_E|| >= (|y|_p^p - rho^{p-2})_+^{1/p}
///  iii:tail_p     |y_{F\E}|_p <= rho^{1-2/p}
CriterionReport check_proof_bounds(const SpVector& y, const SupportSet& F, double rho, double delta,
                                   double tol = 1e-9);

struct MkRow {
    std::size_t i = 0;
    double functional = 0;    // |y_i^*(y_{i|E_i})|
    double rhs = 0;           // K |y_{i|E_i}|_2 / |y_i|_2
    double concentration = 0; // |y_{i|E_i}|_2 / |y_i|_2
    bool in_MK = false;
    bool in_E_half_K = false; // concentration >= 1/(2K)
    bool guard = false;       // functional >= 1/2
    bool implication_ok = true;
};

struct MkFamily {
    double K = 0;
    std::vector<MkRow> rows;

    bool implication_holds() const;
};

/// Partition by M_K = {i : |y_i^*(y_{i|E_i})| <= K |y_{i|E_i}|_2/|y_i|_2},
/// with y_i, E_i from `blocks` and y_i^* the i-th functional of P.
MkFamily mk_family(double K, std::span<const Block> blocks, const BlockProjection& P);

enum class KpClass { Ell2Like, EllpLike, Mixed };

std::string to_string(KpClass k);

struct KpResult {
    KpClass cls = KpClass::Mixed;
    double h_inf = 0;
    std::optional<double> r_sup_tail;
    std::size_t tail_count = 0;
};

/// ell2-like if h(span V) >= C; otherwise ellp-like if r over the span of
/// the members of V supported past N stays below C; mixed otherwise.
KpResult kp_classify(std::span<const SpVector> V, double C, std::size_t N, const RatioSearchOptions& opts = {});

enum class Prop24Variant { B, BPrime };

struct Prop24Report {
    CriterionReport report;
    std::size_t evaluated = 0; // samples with r(x) > beta
    std::size_t skipped = 0;
};

/// a) h(span Z) >= beta'; b) every sample with r(x) > beta is within
/// eps|x|_2 (b') eps||x||) of span Z in the 2w distance; plus the
/// orthogonality consequence for the residual y = x - Qx.
Prop24Report check_prop24(std::span<const SpVector> Z, std::span<const SpVector> samples, double eps, double beta,
                          double beta_prime, Prop24Variant variant = Prop24Variant::B, double tol = 1e-9,
                          const RatioSearchOptions& opts = {});

struct Prop21Report {
    double beta_hat = 0;
    std::optional<double> beta_hat_prime;
    std::optional<double> bound;  // beta_hat' / (K beta_hat)
    double opnorm_lower = 0;
    std::optional<double> eps_threshold; // beta_hat' c delta / max{c, 1/delta}
    std::vector<double> window_ratios;
    std::size_t window_begin = 0;
};

/// Finite-window surrogates for the asymptotic projection lower bound.
/// Reports only; nothing is asserted.
Prop21Report prop21_diagnostic(std::span<const SpVector> u, std::span<const SpVector> w, const BlockProjection& P,
                               double K, std::size_t window, const OpNormOptions& opnorm = {},
                               const RatioSearchOptions& ratio_opts = {});

struct DefectResult {
    double worst_defect = 0;
    SpVector witness;
    std::size_t evaluated = 0;
};

/// min_a ||x - sum a_i y_i|| / ||x|| by multi-start pattern descent from 0
/// and the 2w-orthogonal coefficients.
double relative_defect(std::span<const SpVector> Y, const SpVector& x, std::uint64_t seed = 0, std::size_t starts = 4);

/// Largest relative defect over sampled x with r(x) < alpha, plus any
/// supplied candidates meeting the same ratio bound.
DefectResult defect_experiment(std::span<const SpVector> Y, double alpha, std::size_t samples, std::uint64_t seed,
                               std::span<const SpVector> candidates = {});

/// Perturbed basis vectors at the m smallest-weight indices past `from`:
/// y_k = e_{n_k} + eta e_{n_k + 1}.
std::vector<SpVector> perturbed_basic_sequence(const WeightedSpace& space, std::size_t from, std::size_t m,
                                               double eta);

} // namespace xplab
