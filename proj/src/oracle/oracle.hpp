#pragma once

// Reference computations on plain dense arrays. Nothing here calls into the
// xplab library: every quantity is recomputed from its defining formula so
// that the library can be checked against it.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xplab::oracle {

using Vec = std::vector<double>;

/// Row-major d x d matrix.
struct Mat {
    std::size_t d = 0;
    Vec a;

    double operator()(std::size_t i, std::size_t j) const { return a[i * d + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a[i * d + j]; }
    Vec apply(const Vec& x) const;
};

double norm_p(double p, const Vec& x);
double norm_2w(const Vec& w, const Vec& x);
double xp_norm(double p, const Vec& w, const Vec& x);
double ratio(double p, const Vec& w, const Vec& x);

/// Sum over 0-based indices I of w_n^{2p/(p-2)}.
double omega(double p, const Vec& w, const std::vector<std::size_t>& I);
/// Dense extremal block: w_n^{2/(p-2)} on I (0-based), zero elsewhere.
Vec rosenthal(double p, const Vec& w, const std::vector<std::size_t>& I);

/// The block projection as a dense matrix, built from its rank-one pieces
/// z_j (w^2 z_j restricted to E_j)^T / |z_j restricted to E_j|_2^2.
/// Sets are 0-based.
struct DenseBlock {
    Vec z;
    std::vector<std::size_t> E;
};
Mat block_projection_matrix(const Vec& w, const std::vector<DenseBlock>& blocks);

enum class Mode { XP, TwoW };

/// Brute-force sup ||Mx|| / ||x|| for d <= 6: a full grid on the faces
/// {x_k = 1} of the cube followed by shrinking local grids around the best
/// points.
double grid_opnorm(double p, const Vec& w, const Mat& M, Mode mode);

/// Brute-force sup (or inf) of r over span of the columns of B (|V| <= 4),
/// B given column-wise as vectors of length D.
double grid_ratio_extremum(double p, const Vec& w, const std::vector<Vec>& B, bool maximize);

/// Largest 2w-norm gain of M: square root of the top eigenvalue of
/// B^T B, B = W M W^{-1}, by cyclic Jacobi rotations.
double jacobi_norm_2w(const Vec& w, const Mat& M);

/// Grid minimization of ||x - sum a_i y_i|| / ||x|| over a box of
/// coefficients (|Y| <= 3), with shrinking local grids.
double grid_relative_defect(double p, const Vec& w, const Vec& x, const std::vector<Vec>& Y);

/// Direct substitution into the splitting constant inequalities; returns
/// the number of violated inequalities (0..6).
int split_constant_violations(double delta, double c, double eps, double normP, double normP2, double p,
                              double eps_prime, double rho, double alpha, double beta);

} // namespace xplab::oracle
