#include "xplab/space.hpp"

#include "xplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace xplab {

namespace {

// Below this the power is taken through the logarithm so tiny weights
// degrade gracefully instead of flushing to zero mid-expression.
constexpr double kLogDomainCutoff = 1e-100;

double weight_power(double w, double e)
{
    if (w < kLogDomainCutoff)
        return std::exp(e * std::log(w));
    return std::pow(w, e);
}

} // namespace

WeightedSpace::WeightedSpace(double p, std::vector<double> weights, std::size_t dim_cap)
{
    if (!(p > 2.0) || !std::isfinite(p))
        throw std::invalid_argument("WeightedSpace: exponent p must satisfy 2 < p < inf, got " + std::to_string(p));
    if (weights.size() > dim_cap)
        throw std::invalid_argument("WeightedSpace: dimension " + std::to_string(weights.size()) +
                                    " exceeds cap " + std::to_string(dim_cap));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw std::invalid_argument("WeightedSpace: weight w_" + std::to_string(i + 1) +
                                        " must be positive and finite");
    }

    auto data = std::make_shared<Data>();
    data->p = p;
    data->mass_exp = 2.0 * p / (p - 2.0);
    data->block_exp = 2.0 / (p - 2.0);
    data->ratio_exp = (p - 2.0) / (2.0 * p);
    if (std::abs(data->mass_exp * data->ratio_exp - 1.0) > 4.0 * std::numeric_limits<double>::epsilon())
        throw std::logic_error("WeightedSpace: inconsistent derived exponents");

    data->mass.reserve(weights.size());
    data->block.reserve(weights.size());
    for (double w : weights) {
        data->mass.push_back(weight_power(w, data->mass_exp));
        data->block.push_back(weight_power(w, data->block_exp));
    }
    data->weights = std::move(weights);
    d_ = std::move(data);
}

std::size_t WeightedSpace::checked(std::size_t n) const
{
    if (n == 0 || n > dim())
        throw std::out_of_range("index " + std::to_string(n) + " outside 1.." + std::to_string(dim()));
    return n - 1;
}

double WeightedSpace::weight(std::size_t n) const
{
    return d_->weights[checked(n)];
}

bool WeightedSpace::operator==(const WeightedSpace& other) const noexcept
{
    if (d_ == other.d_)
        return true;
    return d_->p == other.d_->p && d_->weights == other.d_->weights;
}

void require_same_space(const WeightedSpace& a, const WeightedSpace& b)
{
    if (!(a == b))
        throw SpaceMismatch("operands belong to different weighted spaces");
}

// ---------------------------------------------------------------- SupportSet

SupportSet::SupportSet(std::initializer_list<std::size_t> indices)
    : SupportSet(std::vector<std::size_t>(indices))
{
}

SupportSet::SupportSet(std::vector<std::size_t> indices) : idx_(std::move(indices))
{
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    if (!idx_.empty() && idx_.front() == 0)
        throw std::out_of_range("SupportSet: indices are 1-based");
}

SupportSet SupportSet::interval(std::size_t first, std::size_t last)
{
    if (first == 0)
        throw std::out_of_range("SupportSet: indices are 1-based");
    SupportSet s;
    for (std::size_t n = first; n <= last; ++n)
        s.idx_.push_back(n);
    return s;
}

bool SupportSet::contains(std::size_t n) const noexcept
{
    return std::binary_search(idx_.begin(), idx_.end(), n);
}

SupportSet SupportSet::unite(const SupportSet& other) const
{
    SupportSet s;
    std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(), std::back_inserter(s.idx_));
    return s;
}

SupportSet SupportSet::intersect(const SupportSet& other) const
{
    SupportSet s;
    std::set_intersection(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                          std::back_inserter(s.idx_));
    return s;
}

SupportSet SupportSet::minus(const SupportSet& other) const
{
    SupportSet s;
    std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                        std::back_inserter(s.idx_));
    return s;
}

bool SupportSet::disjoint(const SupportSet& other) const noexcept
{
    auto a = idx_.begin();
    auto b = other.idx_.begin();
    while (a != idx_.end() && b != other.idx_.end()) {
        if (*a == *b)
            return false;
        if (*a < *b)
            ++a;
        else
            ++b;
    }
    return true;
}

bool SupportSet::subset_of(const SupportSet& other) const noexcept
{
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

// ------------------------------------------------------------------ SpVector

SpVector::SpVector(WeightedSpace space, std::vector<Entry> entries) : space_(std::move(space))
{
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto [n, v] = entries[i];
        if (n == 0 || n > space_.dim())
            throw std::out_of_range("SpVector: index " + std::to_string(n) + " outside 1.." +
                                    std::to_string(space_.dim()));
        if (i > 0 && entries[i - 1].first == n)
            throw std::invalid_argument("SpVector: duplicate index " + std::to_string(n));
        if (!std::isfinite(v))
            throw std::invalid_argument("SpVector: non-finite coefficient at index " + std::to_string(n));
    }
    std::erase_if(entries, [](const Entry& e) { return e.second == 0.0; });
    entries_ = std::move(entries);
}

SpVector SpVector::basis(const WeightedSpace& space, std::size_t n)
{
    return SpVector(space, {{n, 1.0}});
}

SpVector SpVector::from_dense(const WeightedSpace& space, std::span<const double> dense)
{
    if (dense.size() > space.dim())
        throw std::out_of_range("SpVector::from_dense: array longer than the truncation");
    SpVector x(space);
    for (std::size_t k = 0; k < dense.size(); ++k) {
        if (dense[k] != 0.0)
            x.entries_.emplace_back(k + 1, dense[k]);
    }
    return x;
}

std::vector<double> SpVector::to_dense() const
{
    std::vector<double> out(space_.dim(), 0.0);
    for (const auto& [n, v] : entries_)
        out[n - 1] = v;
    return out;
}

double SpVector::operator[](std::size_t n) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                               [](const Entry& e, std::size_t key) { return e.first < key; });
    return (it != entries_.end() && it->first == n) ? it->second : 0.0;
}

SupportSet SpVector::support() const
{
    std::vector<std::size_t> idx;
    idx.reserve(entries_.size());
    for (const auto& e : entries_)
        idx.push_back(e.first);
    return SupportSet(std::move(idx));
}

SpVector& SpVector::operator*=(double t)
{
    if (t == 0.0) {
        entries_.clear();
        return *this;
    }
    for (auto& e : entries_)
        e.second *= t;
    std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
    return *this;
}

SpVector& SpVector::axpy(double t, const SpVector& other)
{
    require_same_space(space_, other.space_);
    std::vector<Entry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
        if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            merged.push_back(*a++);
        } else if (a == entries_.end() || b->first < a->first) {
            const double v = t * b->second;
            if (v != 0.0)
                merged.emplace_back(b->first, v);
            ++b;
        } else {
            const double v = a->second + t * b->second;
            if (v != 0.0)
                merged.emplace_back(a->first, v);
            ++a;
            ++b;
        }
    }
    entries_ = std::move(merged);
    return *this;
}

SpVector& SpVector::operator+=(const SpVector& other)
{
    return axpy(1.0, other);
}

SpVector& SpVector::operator-=(const SpVector& other)
{
    return axpy(-1.0, other);
}

bool SpVector::operator==(const SpVector& other) const
{
    return space_ == other.space_ && entries_ == other.entries_;
}

// --------------------------------------------------------------------- norms

namespace dense {

double norm_p(double p, std::span<const double> x)
{
    double m = 0.0;
    for (double v : x)
        m = std::max(m, std::abs(v));
    if (m == 0.0 || !std::isfinite(m))
        return m;
    double s = 0.0;
    for (double v : x) {
        if (v != 0.0)
            s += std::pow(std::abs(v) / m, p);
    }
    return m * std::pow(s, 1.0 / p);
}

double norm_2w(std::span<const double> w, std::span<const double> x)
{
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        m = std::max(m, std::abs(x[k]) * w[k]);
    if (m == 0.0 || !std::isfinite(m))
        return m;
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = x[k] * w[k] / m;
        s += t * t;
    }
    return m * std::sqrt(s);
}

double xp_norm(double p, std::span<const double> w, std::span<const double> x)
{
    return std::max(norm_p(p, x), norm_2w(w, x));
}

} // namespace dense

double norm_p(const SpVector& x)
{
    const double p = x.space().p();
    double m = 0.0;
    for (const auto& e : x.entries())
        m = std::max(m, std::abs(e.second));
    if (m == 0.0)
        return 0.0;
    double s = 0.0;
    for (const auto& e : x.entries())
        s += std::pow(std::abs(e.second) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double norm_2w(const SpVector& x)
{
    const auto w = x.space().weights();
    double m = 0.0;
    for (const auto& [n, v] : x.entries())
        m = std::max(m, std::abs(v) * w[n - 1]);
    if (m == 0.0)
        return 0.0;
    double s = 0.0;
    for (const auto& [n, v] : x.entries()) {
        const double t = v * w[n - 1] / m;
        s += t * t;
    }
    return m * std::sqrt(s);
}

double xp_norm(const SpVector& x)
{
    return std::max(norm_p(x), norm_2w(x));
}

double ratio(const SpVector& x)
{
    if (x.is_zero())
        throw DomainError("ratio: r(x) is undefined for the zero vector");
    return norm_2w(x) / norm_p(x);
}

double omega(const WeightedSpace& space, const SupportSet& E)
{
    double s = 0.0;
    for (std::size_t n : E)
        s += space.weight_mass(n);
    return s;
}

double inner(const SpVector& x, const SpVector& y)
{
    require_same_space(x.space(), y.space());
    const auto w = x.space().weights();
    const auto xe = x.entries();
    const auto ye = y.entries();
    double s = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < xe.size() && j < ye.size()) {
        if (xe[i].first < ye[j].first) {
            ++i;
        } else if (ye[j].first < xe[i].first) {
            ++j;
        } else {
            const double wn = w[xe[i].first - 1];
            s += xe[i].second * ye[j].second * wn * wn;
            ++i;
            ++j;
        }
    }
    return s;
}

SpVector restrict(const SpVector& x, const SupportSet& E)
{
    std::vector<SpVector::Entry> kept;
    for (const auto& e : x.entries()) {
        if (E.contains(e.first))
            kept.push_back(e);
    }
    return SpVector(x.space(), std::move(kept));
}

SpVector head_proj(const SpVector& x, std::size_t n)
{
    std::vector<SpVector::Entry> kept;
    for (const auto& e : x.entries()) {
        if (e.first <= n)
            kept.push_back(e);
    }
    return SpVector(x.space(), std::move(kept));
}

SpVector tail_proj(const SpVector& x, std::size_t n)
{
    std::vector<SpVector::Entry> kept;
    for (const auto& e : x.entries()) {
        if (e.first > n)
            kept.push_back(e);
    }
    return SpVector(x.space(), std::move(kept));
}

} // namespace xplab
