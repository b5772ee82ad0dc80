#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace xplab {

inline constexpr std::size_t kDefaultDimCap = 65536;

/// The first-D section of X_{p,w}: an exponent p > 2 and positive weights
/// w_1..w_D. Copies share the immutable weight data.
class WeightedSpace {
public:
    WeightedSpace(double p, std::vector<double> weights, std::size_t dim_cap = kDefaultDimCap);

    double p() const noexcept { return d_->p; }
    std::size_t dim() const noexcept { return d_->weights.size(); }

    /// Weight w_n, 1-based.
    double weight(std::size_t n) const;
    std::span<const double> weights() const noexcept { return d_->weights; }

    /// 2p/(p-2), the exponent of the weight mass.
    double mass_exponent() const noexcept { return d_->mass_exp; }
    /// 2/(p-2), the exponent of the extremal block coefficients.
    double block_exponent() const noexcept { return d_->block_exp; }
    /// (p-2)/(2p), the exponent relating weight mass to the 2/p ratio.
    double ratio_exponent() const noexcept { return d_->ratio_exp; }

    /// w_n^{2p/(p-2)}, cached.
    double weight_mass(std::size_t n) const { return d_->mass[checked(n)]; }
    /// w_n^{2/(p-2)}, cached.
    double block_coefficient(std::size_t n) const { return d_->block[checked(n)]; }
    std::span<const double> weight_masses() const noexcept { return d_->mass; }

    /// True when both handles refer to the same (p, w).
    bool operator==(const WeightedSpace& other) const noexcept;

private:
    struct Data {
        double p;
        double mass_exp;
        double block_exp;
        double ratio_exp;
        std::vector<double> weights;
        std::vector<double> mass;
        std::vector<double> block;
    };

    std::size_t checked(std::size_t n) const;

    std::shared_ptr<const Data> d_;
};

/// Sorted, duplicate-free set of 1-based indices.
class SupportSet {
public:
    SupportSet() = default;
    SupportSet(std::initializer_list<std::size_t> indices);
    explicit SupportSet(std::vector<std::size_t> indices);

    /// {first, ..., last}; empty when last < first.
    static SupportSet interval(std::size_t first, std::size_t last);

    bool contains(std::size_t n) const noexcept;
    bool empty() const noexcept { return idx_.empty(); }
    std::size_t size() const noexcept { return idx_.size(); }
    std::size_t front() const { return idx_.front(); }
    std::size_t back() const { return idx_.back(); }
    auto begin() const noexcept { return idx_.begin(); }
    auto end() const noexcept { return idx_.end(); }
    const std::vector<std::size_t>& indices() const noexcept { return idx_; }

    SupportSet unite(const SupportSet& other) const;
    SupportSet intersect(const SupportSet& other) const;
    SupportSet minus(const SupportSet& other) const;
    bool disjoint(const SupportSet& other) const noexcept;
    bool subset_of(const SupportSet& other) const noexcept;

    bool operator==(const SupportSet&) const = default;

private:
    std::vector<std::size_t> idx_;
};

/// Finitely supported coefficient vector over a WeightedSpace. Entries are
/// kept sorted by index with no stored zeros.
class SpVector {
public:
    using Entry = std::pair<std::size_t, double>;

    explicit SpVector(WeightedSpace space) : space_(std::move(space)) {}
    /// Duplicate indices are rejected; zero values are dropped.
    SpVector(WeightedSpace space, std::vector<Entry> entries);

    static SpVector basis(const WeightedSpace& space, std::size_t n);
    /// dense[k] is the coefficient of index k+1.
    static SpVector from_dense(const WeightedSpace& space, std::span<const double> dense);
    std::vector<double> to_dense() const;

    const WeightedSpace& space() const noexcept { return space_; }
    std::span<const Entry> entries() const noexcept { return entries_; }
    double operator[](std::size_t n) const;
    bool is_zero() const noexcept { return entries_.empty(); }
    std::size_t nnz() const noexcept { return entries_.size(); }
    SupportSet support() const;

    SpVector& operator*=(double t);
    SpVector& operator+=(const SpVector& other);
    SpVector& operator-=(const SpVector& other);
    /// this += t * other
    SpVector& axpy(double t, const SpVector& other);

    friend SpVector operator*(double t, SpVector x) { return x *= t; }
    friend SpVector operator+(SpVector x, const SpVector& y) { return x += y; }
    friend SpVector operator-(SpVector x, const SpVector& y) { return x -= y; }
    friend SpVector operator-(SpVector x) { return x *= -1.0; }

    /// Exact coefficientwise equality over the same space.
    bool operator==(const SpVector& other) const;

private:
    WeightedSpace space_;
    std::vector<Entry> entries_;
};

/// Throws SpaceMismatch unless a and b are over the same space.
void require_same_space(const WeightedSpace& a, const WeightedSpace& b);

double norm_p(const SpVector& x);
double norm_2w(const SpVector& x);
/// max{|x|_p, |x|_{2,w}}, the norm of X_{p,w}.
double xp_norm(const SpVector& x);
/// |x|_{2,w} / |x|_p. Throws DomainError on the zero vector.
double ratio(const SpVector& x);
/// Sum over E of w_n^{2p/(p-2)}. Throws std::out_of_range past the truncation.
double omega(const WeightedSpace& space, const SupportSet& E);
/// Sum of x_n y_n w_n^2.
double inner(const SpVector& x, const SpVector& y);

SpVector restrict(const SpVector& x, const SupportSet& E);
/// Keeps indices <= n.
SpVector head_proj(const SpVector& x, std::size_t n);
/// Keeps indices > n.
SpVector tail_proj(const SpVector& x, std::size_t n);

/// Kernels over dense coefficient arrays (index 0 is coordinate 1). Used on
/// the hot paths of the sampling estimators.
namespace dense {
double norm_p(double p, std::span<const double> x);
double norm_2w(std::span<const double> w, std::span<const double> x);
double xp_norm(double p, std::span<const double> w, std::span<const double> x);
} // namespace dense

} // namespace xplab
