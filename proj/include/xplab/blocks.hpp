#pragma once

#include "xplab/space.hpp"

namespace xplab {

/// The extremal vector with coefficients w_n^{2/(p-2)} on its support.
struct RosenthalBlock {
    SupportSet support;
    SpVector vector;
};

/// Builds the extremal block on I. Throws std::invalid_argument on empty I
/// and std::logic_error if the two norm identities fail to 1e-10.
RosenthalBlock make_rosenthal(const WeightedSpace& space, const SupportSet& I);

/// Which biorthogonal functional a Block carries.
///  - Restricted: |z_E|_2^{-2} <z_E, x>, uses only coordinates in E.
///  - Support:    |z|_2^{-2} <z, x>, the full-support form.
enum class FunctionalForm { Restricted, Support };

/// Evaluated two-sided block conditions. Each compares lhs >= rhs.
struct BlockConditions {
    // (a) |z_E|_2 >= delta |z|_2
    double a_lhs = 0, a_rhs = 0;
    bool a = false;
    // (b) c |z_E|_2 >= omega(E)^{(p-2)/2p} ||z||   (homogeneous form; for
    //     normalized z this is c|z_E|_2 >= omega(E)^{(p-2)/2p})
    double b_lhs = 0, b_rhs = 0;
    bool b = false;
    // full-support form: c |z|_2 >= omega(supp)^{(p-2)/2p} |z|_p
    double s_lhs = 0, s_rhs = 0;
    bool support_form = false;
};

/// A block vector z with support F, a designated set E inside F and the
/// constants (delta, c).
class Block {
public:
    /// Checked construction: throws PreconditionError if (a) or (b) fails.
    static Block make(SupportSet support, SpVector z, SupportSet E, double delta, double c);
    /// Same, with support = supp(z).
    static Block make(SpVector z, SupportSet E, double delta, double c);
    /// Records the conditions without enforcing them. Structural
    /// requirements (z inside support, E inside support) still apply.
    static Block unchecked(SupportSet support, SpVector z, SupportSet E, double delta, double c);

    const WeightedSpace& space() const noexcept { return z_.space(); }
    const SupportSet& support() const noexcept { return support_; }
    const SpVector& vector() const noexcept { return z_; }
    const SupportSet& designated() const noexcept { return E_; }
    double delta() const noexcept { return delta_; }
    double c() const noexcept { return c_; }
    const BlockConditions& conditions() const noexcept { return cond_; }
    bool admissible() const noexcept { return cond_.a && cond_.b; }

    /// Largest delta for which (a) holds.
    double tight_delta() const;
    /// Smallest c for which (b) holds.
    double tight_c() const;
    /// Smallest c for which the full-support condition holds.
    double tight_support_c() const;

private:
    Block(SupportSet support, SpVector z, SupportSet E, double delta, double c);

    SupportSet support_;
    SpVector z_;
    SupportSet E_;
    double delta_;
    double c_;
    BlockConditions cond_;
};

/// The block with E = support, built from the extremal vector, with the
/// tight constants of its normalization.
Block rosenthal_as_block(const RosenthalBlock& y);

double functional_apply(const RosenthalBlock& y, const SpVector& x);
/// Throws DomainError when the functional is undefined (zero mass on E, or
/// z = 0 for the support form).
double functional_apply(const Block& b, const SpVector& x, FunctionalForm form = FunctionalForm::Restricted);

/// The two Hölder-type estimates for one block at x:
///   lhs2 = |f(x) z|_2  <=  factor2 * rhs2
///   lhsp = |f(x) z|_p  <=  factorp * rhsp
/// where rhs* are norms of x restricted to the support (Support form) or to
/// E (Restricted form). `applicable` is false when the block does not meet
/// the condition that guarantees the estimate.
struct HolderBounds {
    double functional = 0;
    double lhs2 = 0, rhs2 = 0, factor2 = 1;
    double lhsp = 0, rhsp = 0, factorp = 1;
    bool applicable = true;

    bool holds(double rel_slack = 1e-12) const
    {
        return lhs2 <= factor2 * rhs2 * (1 + rel_slack) && lhsp <= factorp * rhsp * (1 + rel_slack);
    }
};

HolderBounds holder_bounds(const RosenthalBlock& y, const SpVector& x);
HolderBounds holder_bounds(const Block& b, const SpVector& x, FunctionalForm form = FunctionalForm::Support);

/// True iff r(x) <= r(rosenthal(I)) + tol. x must be nonzero and supported
/// on I.
bool extremality_check(const WeightedSpace& space, const SupportSet& I, const SpVector& x, double tol = 1e-9);

} // namespace xplab
