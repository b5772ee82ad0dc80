#include "xplab/blocks.hpp"

#include "xplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xplab {

namespace {

// Relative slack on the non-strict block conditions, so that the extremal
// (equality) cases are recognized despite rounding.
constexpr double kConditionSlack = 1e-12;

bool geq(double lhs, double rhs)
{
    return lhs >= rhs * (1.0 - kConditionSlack);
}

bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

} // namespace

RosenthalBlock make_rosenthal(const WeightedSpace& space, const SupportSet& I)
{
    if (I.empty())
        throw std::invalid_argument("make_rosenthal: support must be nonempty");
    std::vector<SpVector::Entry> entries;
    entries.reserve(I.size());
    for (std::size_t n : I)
        entries.emplace_back(n, space.block_coefficient(n));
    RosenthalBlock y{I, SpVector(space, std::move(entries))};

    const double w = omega(space, I);
    if (!close_rel(norm_2w(y.vector), std::sqrt(w), 1e-10) ||
        !close_rel(norm_p(y.vector), std::pow(w, 1.0 / space.p()), 1e-10))
        throw std::logic_error("make_rosenthal: norm identities violated (weights out of floating range?)");
    return y;
}

Block::Block(SupportSet support, SpVector z, SupportSet E, double delta, double c)
    : support_(std::move(support)), z_(std::move(z)), E_(std::move(E)), delta_(delta), c_(c)
{
    if (!(delta > 0.0) || !(c > 0.0))
        throw PreconditionError("constants", "delta and c must be positive");
    if (!z_.support().subset_of(support_))
        throw PreconditionError("support", "block vector has entries outside its support");
    if (!E_.subset_of(support_))
        throw PreconditionError("designated-set", "E must lie inside the block support");
    for (std::size_t n : support_) {
        if (n > z_.space().dim())
            throw std::out_of_range("Block: support index " + std::to_string(n) + " outside the truncation");
    }

    const auto& space = z_.space();
    const double e = space.ratio_exponent();
    const SpVector zE = restrict(z_, E_);
    const double zE2 = norm_2w(zE);
    const double z2 = norm_2w(z_);

    cond_.a_lhs = zE2;
    cond_.a_rhs = delta_ * z2;
    cond_.a = geq(cond_.a_lhs, cond_.a_rhs);

    cond_.b_lhs = c_ * zE2;
    cond_.b_rhs = std::pow(omega(space, E_), e) * xp_norm(z_);
    cond_.b = geq(cond_.b_lhs, cond_.b_rhs);

    cond_.s_lhs = c_ * z2;
    cond_.s_rhs = std::pow(omega(space, support_), e) * norm_p(z_);
    cond_.support_form = geq(cond_.s_lhs, cond_.s_rhs);
}

Block Block::make(SupportSet support, SpVector z, SupportSet E, double delta, double c)
{
    Block b(std::move(support), std::move(z), std::move(E), delta, c);
    if (!b.cond_.a)
        throw PreconditionError("condition-a", "|z_E|_2 = " + std::to_string(b.cond_.a_lhs) +
                                                   " < delta |z|_2 = " + std::to_string(b.cond_.a_rhs));
    if (!b.cond_.b)
        throw PreconditionError("condition-b", "c |z_E|_2 = " + std::to_string(b.cond_.b_lhs) +
                                                   " < omega(E)^((p-2)/2p) ||z|| = " +
                                                   std::to_string(b.cond_.b_rhs));
    return b;
}

Block Block::make(SpVector z, SupportSet E, double delta, double c)
{
    SupportSet support = z.support();
    return make(std::move(support), std::move(z), std::move(E), delta, c);
}

Block Block::unchecked(SupportSet support, SpVector z, SupportSet E, double delta, double c)
{
    return Block(std::move(support), std::move(z), std::move(E), delta, c);
}

double Block::tight_delta() const
{
    const double z2 = norm_2w(z_);
    if (z2 == 0.0)
        throw DomainError("tight_delta: zero block");
    return norm_2w(restrict(z_, E_)) / z2;
}

double Block::tight_c() const
{
    const double zE2 = norm_2w(restrict(z_, E_));
    if (zE2 == 0.0)
        throw DomainError("tight_c: block has no 2-mass on E");
    return std::pow(omega(space(), E_), space().ratio_exponent()) * xp_norm(z_) / zE2;
}

double Block::tight_support_c() const
{
    const double z2 = norm_2w(z_);
    if (z2 == 0.0)
        throw DomainError("tight_support_c: zero block");
    return std::pow(omega(space(), support_), space().ratio_exponent()) * norm_p(z_) / z2;
}

Block rosenthal_as_block(const RosenthalBlock& y)
{
    auto b = Block::unchecked(y.support, y.vector, y.support, 1.0, 1.0);
    return Block::make(y.support, y.vector, y.support, 1.0, std::max(1.0, b.tight_c()));
}

double functional_apply(const RosenthalBlock& y, const SpVector& x)
{
    require_same_space(y.vector.space(), x.space());
    const double y2 = norm_2w(y.vector);
    return inner(y.vector, x) / (y2 * y2);
}

double functional_apply(const Block& b, const SpVector& x, FunctionalForm form)
{
    require_same_space(b.space(), x.space());
    const SpVector carrier = form == FunctionalForm::Restricted ? restrict(b.vector(), b.designated()) : b.vector();
    const double n2 = norm_2w(carrier);
    if (n2 == 0.0)
        throw DomainError("functional_apply: block functional undefined (no 2-mass on its carrier set)");
    return inner(carrier, x) / (n2 * n2);
}

HolderBounds holder_bounds(const RosenthalBlock& y, const SpVector& x)
{
    HolderBounds h;
    h.functional = functional_apply(y, x);
    const SpVector fx = h.functional * y.vector;
    const SpVector xr = restrict(x, y.support);
    h.lhs2 = norm_2w(fx);
    h.lhsp = norm_p(fx);
    h.rhs2 = norm_2w(xr);
    h.rhsp = norm_p(xr);
    return h;
}

HolderBounds holder_bounds(const Block& b, const SpVector& x, FunctionalForm form)
{
    HolderBounds h;
    h.functional = functional_apply(b, x, form);
    const SpVector fx = h.functional * b.vector();
    h.lhs2 = norm_2w(fx);
    h.lhsp = norm_p(fx);
    h.factorp = b.c();
    if (form == FunctionalForm::Support) {
        const SpVector xr = restrict(x, b.support());
        h.rhs2 = norm_2w(xr);
        h.rhsp = norm_p(xr);
        h.factor2 = 1.0;
        h.applicable = b.conditions().support_form;
    } else {
        const SpVector xr = restrict(x, b.designated());
        h.rhs2 = norm_2w(xr);
        h.rhsp = norm_p(xr);
        h.factor2 = 1.0 / b.delta();
        h.applicable = b.admissible();
    }
    return h;
}

bool extremality_check(const WeightedSpace& space, const SupportSet& I, const SpVector& x, double tol)
{
    require_same_space(space, x.space());
    if (!x.support().subset_of(I))
        throw PreconditionError("support", "x is not supported on I");
    const double rx = ratio(x);
    const double ry = ratio(make_rosenthal(space, I).vector);
    return rx <= ry + tol;
}

} // namespace xplab
