#include "helpers.hpp"

#include "suite/generators.hpp"
#include "xplab/error.hpp"
#include "xplab/random.hpp"
#include "xplab/space.hpp"

#include <cmath>
#include <stdexcept>

using namespace xplab;
using doctest::Approx;

namespace {

WeightedSpace two_point()
{
    return WeightedSpace(4.0, {1.0, 0.5});
}

} // namespace

TEST_CASE("construction rejects bad exponents and weights")
{
    CHECK_THROWS(WeightedSpace(2.0, {1.0}));
    CHECK_THROWS(WeightedSpace(1.5, {1.0}));
    CHECK_THROWS(WeightedSpace(4.0, {1.0, 0.0}));
    CHECK_THROWS(WeightedSpace(4.0, {1.0, -0.5}));
    // The zero-dimensional section is valid; only the zero vector lives there.
    CHECK(WeightedSpace(4.0, {}).dim() == 0);
    CHECK_THROWS(WeightedSpace(4.0, std::vector<double>(10, 1.0), 5));
}

TEST_CASE("exponents")
{
    const WeightedSpace s(6.0, {0.5});
    CHECK(s.mass_exponent() == Approx(3.0));
    CHECK(s.block_exponent() == Approx(0.5));
    CHECK(s.ratio_exponent() == Approx(1.0 / 3.0));
    CHECK(s.weight_mass(1) == Approx(0.125));
    CHECK_THROWS_AS(s.weight(2), std::out_of_range);
    CHECK_THROWS_AS(s.weight(0), std::out_of_range);
}

TEST_CASE("norm examples on w = (1, 1/2), p = 4")
{
    const auto s = two_point();
    const SpVector x = SpVector::from_dense(s, std::vector<double>{1.0, 2.0});
    const SpVector zero(s);

    CHECK(norm_p(zero) == 0.0);
    CHECK(norm_2w(zero) == 0.0);
    CHECK(xp_norm(zero) == 0.0);
    CHECK_THROWS_AS(ratio(zero), DomainError);

    CHECK(norm_p(x) == Approx(std::pow(17.0, 0.25)).epsilon(1e-14));
    CHECK(norm_p(x) == Approx(2.030543).epsilon(1e-6));
    CHECK(norm_2w(x) == Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(xp_norm(x) == Approx(std::pow(17.0, 0.25)).epsilon(1e-14));
    CHECK(ratio(x) == Approx(0.69654).epsilon(1e-4));

    for (std::size_t n = 1; n <= 2; ++n) {
        const auto e = SpVector::basis(s, n);
        CHECK(norm_p(e) == 1.0);
        CHECK(norm_2w(e) == Approx(s.weight(n)));
        CHECK(xp_norm(e) == 1.0); // w_n <= 1
        CHECK(ratio(e) == Approx(s.weight(n)));
    }
    const SpVector single(s, {{2, -3.5}});
    CHECK(norm_p(single) == Approx(3.5));
}

TEST_CASE("omega, inner and projections")
{
    const auto s = two_point();
    CHECK(omega(s, {}) == 0.0);
    CHECK(omega(s, {1, 2}) == Approx(1.0625));
    CHECK(omega(s, {2}) == Approx(std::pow(0.5, 4.0)));
    CHECK_THROWS_AS(omega(s, {3}), std::out_of_range);

    const SpVector x = SpVector::from_dense(s, std::vector<double>{1.0, 2.0});
    const SpVector y = SpVector::from_dense(s, std::vector<double>{1.0, 1.0});
    CHECK(inner(x, y) == Approx(1.5));
    CHECK(inner(SpVector::basis(s, 1), SpVector::basis(s, 2)) == 0.0);
    CHECK(inner(SpVector::basis(s, 2), SpVector::basis(s, 2)) == Approx(0.25));

    const WeightedSpace s3(4.0, {1.0, 1.0, 1.0});
    const SpVector v = SpVector::from_dense(s3, std::vector<double>{1.0, 2.0, 3.0});
    CHECK(restrict(v, {2}) == SpVector(s3, {{2, 2.0}}));
    CHECK(restrict(v, {}).is_zero());
    CHECK(restrict(SpVector::basis(s3, 2), {2}) == SpVector::basis(s3, 2));
    CHECK(tail_proj(v, 1) == SpVector(s3, {{2, 2.0}, {3, 3.0}}));
    CHECK(tail_proj(v, 0) == v);
    CHECK(head_proj(v, 0).is_zero());
    CHECK(head_proj(v, 2) + tail_proj(v, 2) == v);
}

TEST_CASE("sparse vector bookkeeping")
{
    const auto s = two_point();
    CHECK_THROWS(SpVector(s, {{1, 1.0}, {1, 2.0}}));
    CHECK_THROWS(SpVector(s, {{3, 1.0}}));
    CHECK_THROWS(SpVector(s, {{0, 1.0}}));
    const SpVector x(s, {{2, 1.0}, {1, 0.0}});
    CHECK(x.nnz() == 1);
    CHECK(x.support() == SupportSet{2});
    SpVector y = x;
    y -= x;
    CHECK(y.is_zero());

    const WeightedSpace other(4.0, {1.0, 0.25});
    CHECK_THROWS_AS(SpVector::basis(s, 1) + SpVector::basis(other, 1), SpaceMismatch);
    CHECK_THROWS_AS(inner(SpVector::basis(s, 1), SpVector::basis(other, 1)), SpaceMismatch);
    // Equal (p, w) loaded separately is the same space.
    const WeightedSpace again(4.0, {1.0, 0.5});
    CHECK(s == again);
    CHECK_NOTHROW(SpVector::basis(s, 1) + SpVector::basis(again, 2));
}

TEST_CASE("support set algebra")
{
    const SupportSet a{5, 1, 3, 3};
    CHECK(a.indices() == std::vector<std::size_t>{1, 3, 5});
    const SupportSet b = SupportSet::interval(3, 6);
    CHECK(b.size() == 4);
    CHECK(SupportSet::interval(4, 3).empty());
    CHECK(a.intersect(b) == SupportSet{3, 5});
    CHECK(a.unite(b) == SupportSet{1, 3, 4, 5, 6});
    CHECK(a.minus(b) == SupportSet{1});
    CHECK(a.disjoint(SupportSet{2, 4}));
    CHECK(SupportSet{3, 5}.subset_of(a));
    CHECK_FALSE(b.subset_of(a));
}

TEST_CASE("property: norms agree with the dense oracle")
{
    Rng rng(101);
    for (int t = 0; t < 500; ++t) {
        const double p = rng.uniform(2.1, 8.0);
        const auto s = gen::space(rng, 1 + static_cast<std::size_t>(rng.integer(0, 40)), p);
        const auto x = gen::vector(rng, s, 16);
        const auto w = test::weights_of(s);
        const auto d = x.to_dense();
        CHECK(norm_p(x) == Approx(oracle::norm_p(p, d)).epsilon(1e-12));
        CHECK(norm_2w(x) == Approx(oracle::norm_2w(w, d)).epsilon(1e-12));
        CHECK(xp_norm(x) == Approx(oracle::xp_norm(p, w, d)).epsilon(1e-12));
        if (!x.is_zero())
            CHECK(ratio(x) == Approx(oracle::ratio(p, w, d)).epsilon(1e-12));
    }
}

TEST_CASE("property: homogeneity, triangle inequality and scale invariance of r")
{
    Rng rng(202);
    for (int t = 0; t < 500; ++t) {
        const auto s = gen::space(rng, 30, rng.uniform(2.1, 8.0));
        const auto x = gen::vector(rng, s, 10);
        const auto y = gen::vector(rng, s, 10);
        const double a = rng.uniform(-5.0, 5.0);
        CHECK(norm_p(a * x) == Approx(std::abs(a) * norm_p(x)).epsilon(1e-12));
        CHECK(norm_2w(a * x) == Approx(std::abs(a) * norm_2w(x)).epsilon(1e-12));
        CHECK(xp_norm(a * x) == Approx(std::abs(a) * xp_norm(x)).epsilon(1e-12));
        CHECK(xp_norm(x + y) <= (xp_norm(x) + xp_norm(y)) * (1 + 1e-12));
        if (!x.is_zero() && a != 0.0)
            CHECK(ratio(a * x) == Approx(ratio(x)).epsilon(1e-12));
        // |x|_p <= ||x|| and |x|_2w <= ||x||
        CHECK(norm_p(x) <= xp_norm(x));
        CHECK(norm_2w(x) <= xp_norm(x));
    }
}

TEST_CASE("property: omega is additive over disjoint sets")
{
    Rng rng(303);
    for (int t = 0; t < 200; ++t) {
        const auto s = gen::space(rng, 40, rng.uniform(2.1, 8.0));
        const auto A = gen::subset(rng, 40, static_cast<std::size_t>(rng.integer(1, 10)));
        const auto B = gen::subset(rng, 40, static_cast<std::size_t>(rng.integer(1, 10))).minus(A);
        CHECK(omega(s, A.unite(B)) == Approx(omega(s, A) + omega(s, B)).epsilon(1e-12));
        CHECK(omega(s, A) == Approx(oracle::omega(s.p(), test::weights_of(s), test::zero_based(A))).epsilon(1e-12));
    }
}
