#include "helpers.hpp"

#include "suite/generators.hpp"
#include "xplab/criteria.hpp"
#include "xplab/error.hpp"
#include "xplab/random.hpp"

#include <cmath>

using namespace xplab;
using doctest::Approx;

namespace {

SpVector normalized(SpVector x)
{
    x *= 1.0 / xp_norm(x);
    return x;
}

} // namespace

TEST_CASE("relations and reports")
{
    CHECK(Check::make("x", 1.0, Relation::LessEq, 1.0).pass);
    CHECK_FALSE(Check::make("x", 1.0, Relation::Less, 1.0).pass);
    CHECK(Check::make("x", 1.0 + 1e-12, Relation::LessEq, 1.0, 1e-9).pass);
    CHECK_FALSE(Check::make("x", 1.0 + 1e-12, Relation::LessEq, 1.0).pass);
    CHECK(Check::make("x", 2.0, Relation::Equal, 2.0 * (1 + 1e-10), 1e-9).pass);
    CHECK_FALSE(Check::make("x", std::nan(""), Relation::LessEq, 1.0).pass);

    CriterionReport r;
    r.checks.push_back(Check::make("ok", 1.0, Relation::GreaterEq, 0.0));
    r.checks.push_back(Check::not_applicable("skip", 5.0, Relation::Less, 0.0));
    CHECK(r.verdict());
    r.checks.push_back(Check::make("bad", 1.0, Relation::Greater, 2.0));
    CHECK_FALSE(r.verdict());
    REQUIRE(r.find("bad") != nullptr);
    CHECK(r.find("bad")->lhs == 1.0);
    CHECK(r.find("absent") == nullptr);
}

TEST_CASE("witness criterion examples")
{
    // Normalized extremal block past N with omega(E) <= 1.
    const WeightedSpace s(4.0, {1.0, 0.9, 0.5, 0.5, 0.4});
    const SupportSet E{3, 4, 5};
    REQUIRE(omega(s, E) <= 1.0);
    const auto x = normalized(make_rosenthal(s, E).vector);
    const double wE = std::pow(omega(s, E), 0.25);
    const Thm13Witness w{x, E, 2, 1.0, 1.0, wE * 1.1, wE * 0.9};
    const auto rep = check_thm13(w);
    CHECK(rep.find("a")->pass);
    CHECK(rep.find("a")->lhs == 0.0);
    CHECK(rep.find("b")->lhs == Approx(rep.find("b")->rhs).epsilon(1e-12));
    CHECK(rep.find("c:middle")->lhs == Approx(rep.find("c:middle")->rhs).epsilon(1e-12));
    CHECK(rep.verdict());
    // The verdict reduces to eps >= omega^{1/4} >= eps'.
    CHECK_FALSE(check_thm13({x, E, 2, 1.0, 1.0, wE * 0.95, wE * 0.5}).verdict());
    CHECK_FALSE(check_thm13({x, E, 2, 1.0, 1.0, wE * 2.0, wE * 1.05}).verdict());

    // x = e_1, N = 1: the head norm is 1, not below 1.
    const auto e1 = SpVector::basis(s, 1);
    const auto a = check_thm13({e1, {2}, 1, 1.0, 1.0, 1.0, 0.5});
    CHECK_FALSE(a.find("a")->pass);

    // delta > 1 with E a proper part of a spread x.
    const auto spread = normalized(SpVector(s, {{3, 1.0}, {4, 1.0}}));
    CHECK_FALSE(check_thm13({spread, {3}, 2, 1.0, 1.5, 1.0, 0.1}).find("b")->pass);

    CHECK_THROWS_AS(check_thm13({2.0 * x, E, 2, 1.0, 1.0, 1.0, 0.5}), PreconditionError);
    CHECK_THROWS_AS(check_thm13({x, E, 3, 1.0, 1.0, 1.0, 0.5}), PreconditionError);
    CHECK_THROWS_AS(check_thm13({x, E, 2, 1.0, 1.0, 0.5, 0.5}), PreconditionError);
}

TEST_CASE("witness generator examples")
{
    const WeightedSpace s(4.0, std::vector<double>(12, 0.5));
    const auto ws = gen_thm13_witnesses(s, 1.0, 1.0, 0.6, 3, 5);
    REQUIRE(ws.size() == 3);
    for (std::size_t i = 0; i < ws.size(); ++i) {
        CHECK(ws[i].E.size() == 1);
        CHECK(ws[i].eps_prime == Approx(0.3));
        CHECK(check_thm13(ws[i]).verdict());
        for (std::size_t j = 0; j < i; ++j)
            CHECK(ws[i].E.disjoint(ws[j].E));
    }
    // Whole-tail mass: omega = 4 / 16, omega^{1/4} ~ 0.707 < eps' = 1.
    const WeightedSpace thin(4.0, std::vector<double>(4, 0.5));
    CHECK_THROWS_AS(gen_thm13_witnesses(thin, 1.0, 1.0, 2.0, 1, 0), InfeasibleError);
    CHECK_THROWS_AS(gen_thm13_witnesses(s, 0.5, 1.0, 0.6, 1, 0), InfeasibleError);
    CHECK_THROWS_AS(gen_thm13_witnesses(s, 1.0, 1.5, 0.6, 1, 0), InfeasibleError);
}

TEST_CASE("property: generator output passes the checker")
{
    Rng rng(31);
    int checked = 0;
    for (int t = 0; t < 150; ++t) {
        const auto s = gen::space(rng, 200, rng.uniform(2.2, 8.0), 1e-3, 1.0);
        const double c = rng.uniform(1.0, 2.0);
        const double delta = rng.uniform(0.3, 1.0);
        const double eps = rng.uniform(0.05, 1.5);
        try {
            for (const auto& w : gen_thm13_witnesses(s, c, delta, eps, 4, rng.engine()())) {
                CHECK(check_thm13(w).verdict());
                ++checked;
            }
        } catch (const InfeasibleError&) {
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("large-coefficient set examples")
{
    const WeightedSpace s(4.0, {1.0, 0.5});
    const auto y = SpVector::from_dense(s, std::vector<double>{1.0, 2.0});
    CHECK(extract_Ei(y, {1, 2}, 0.1) == SupportSet{1, 2});
    CHECK(extract_Ei(y, {1, 2}, 1e-12) == SupportSet{1, 2});
    CHECK(extract_Ei(y, {1, 2}, 1e6).empty());
    CHECK_THROWS(extract_Ei(SpVector(s), {1, 2}, 0.1));
    // Tie: |y(1)| = rho w_1 |y|_2^{-1} exactly when rho = |y|_2 = sqrt 2.
    const auto e = SpVector::basis(s, 1);
    CHECK(extract_Ei(e, {1}, 1.0) == SupportSet{1});
}

TEST_CASE("property: the large-coefficient set shrinks as rho grows")
{
    Rng rng(32);
    for (int t = 0; t < 10000; ++t) {
        const auto s = gen::space(rng, 16, rng.uniform(2.1, 8.0));
        const auto y = gen::vector(rng, s, 12);
        if (y.is_zero())
            continue;
        const double r1 = rng.log_uniform(1e-4, 10.0);
        const double r2 = r1 * rng.uniform(1.0, 10.0);
        CHECK(extract_Ei(y, y.support(), r2).subset_of(extract_Ei(y, y.support(), r1)));
        CHECK(extract_Ei(y, y.support(), r1).subset_of(y.support()));
    }
}

TEST_CASE("proof bounds examples")
{
    const WeightedSpace s(4.0, {1.0, 0.8, 0.5, 0.3});
    const auto y = normalized(make_rosenthal(s, {1, 2, 3}).vector);
    const auto rep = check_proof_bounds(y, y.support(), 1e-3, 0.5);
    CHECK(rep.verdict());
    CHECK(rep.find("ii:tail")->lhs == 0.0);

    // Flat unit y: 16 entries of 1/4 with |y|_2 = 1, so the threshold is rho
    // itself. rho = 1/4 is a tie (included); with rho = 1 all of y is tail.
    const WeightedSpace flat(4.0, std::vector<double>(16, 1.0));
    const auto v = SpVector::from_dense(flat, std::vector<double>(16, 0.25));
    REQUIRE(xp_norm(v) == Approx(1.0));
    CHECK(extract_Ei(v, v.support(), 0.25).size() == 16);
    REQUIRE(extract_Ei(v, v.support(), 1.0).empty());
    const auto b = check_proof_bounds(v, v.support(), 1.0, 0.5);
    CHECK(b.find("ii:tail")->lhs == Approx(1.0 / 16));
    CHECK(b.find("ii:tail")->rhs == Approx(1.0));
    CHECK(b.find("ii:tail")->pass);
    CHECK_FALSE(b.find("i:mass")->applicable);
}

TEST_CASE("property: proof bounds hold on random admissible inputs")
{
    Rng rng(33);
    int violations = 0;
    for (int t = 0; t < 10000; ++t) {
        const auto s = gen::space(rng, 20, rng.uniform(2.1, 8.0));
        const auto y0 = gen::vector(rng, s, 12);
        if (y0.is_zero())
            continue;
        const auto y = normalized(y0);
        const double rho = rng.uniform(0.0, 1.0);
        if (rho == 0.0)
            continue;
        const double delta = rng.uniform(0.05, 1.0);
        violations += !check_proof_bounds(y, y.support(), rho, delta).verdict();
    }
    CHECK(violations == 0);
}

TEST_CASE("M_K examples and implication")
{
    const WeightedSpace s(4.0, {1.0, 0.8, 0.5, 0.3, 0.2, 0.1});
    std::vector<Block> blocks{rosenthal_as_block(make_rosenthal(s, {1, 2})),
                              rosenthal_as_block(make_rosenthal(s, {4, 5, 6}))};
    const BlockProjection P(BlockSystem::with_tight_constants(blocks));
    const auto in = mk_family(1.5, blocks, P);
    for (const auto& r : in.rows) {
        CHECK(r.functional == Approx(1.0));
        CHECK(r.concentration == Approx(1.0));
        CHECK(r.in_MK);
    }
    const auto out = mk_family(0.5, blocks, P);
    for (const auto& r : out.rows)
        CHECK_FALSE(r.in_MK);
    const auto none = mk_family(0.0, blocks, P);
    for (const auto& r : none.rows)
        CHECK_FALSE(r.in_MK);

    Rng rng(34);
    for (int t = 0; t < 300; ++t) {
        const auto sp = gen::space(rng, 30, rng.uniform(2.1, 8.0));
        const auto sys = gen::block_system(rng, sp, 5);
        const BlockProjection Q(sys);
        CHECK(mk_family(rng.uniform(0.1, 5.0), sys.blocks(), Q).implication_holds());
    }
}

TEST_CASE("ratio dichotomy examples")
{
    const WeightedSpace s(4.0, {1.0, 0.9, 0.8, 0.05, 0.04, 0.03, 0.02, 0.01});
    const std::vector<SpVector> big{SpVector::basis(s, 1), SpVector::basis(s, 2), SpVector::basis(s, 3)};
    CHECK(kp_classify(big, 0.8, 0).cls == KpClass::Ell2Like);

    const std::vector<SpVector> small{make_rosenthal(s, {4, 5}).vector, make_rosenthal(s, {6, 7, 8}).vector};
    const auto k = kp_classify(small, 0.5, 3);
    CHECK(k.cls == KpClass::EllpLike);
    REQUIRE(k.r_sup_tail.has_value());
    CHECK(*k.r_sup_tail < 0.5);

    const std::vector<SpVector> mixed{SpVector::basis(s, 2), SpVector::basis(s, 4)};
    CHECK(kp_classify(mixed, 0.5, 1).cls == KpClass::Mixed);

    Rng rng(35);
    for (int t = 0; t < 30; ++t) {
        const auto sp = gen::space(rng, 12, rng.uniform(2.1, 8.0), 0.01, 2.0);
        auto V = gen::independent_family(rng, sp, 3, 4);
        const double C = rng.uniform(0.05, 1.0);
        const std::size_t N = static_cast<std::size_t>(rng.integer(0, 6));
        const auto before = kp_classify(V, C, N).cls;
        for (auto& v : V)
            v *= rng.uniform(0.1, 10.0);
        CHECK(kp_classify(V, C, N).cls == before);
    }
}

TEST_CASE("approximation by a subspace")
{
    const WeightedSpace s(4.0, {1.0, 0.8, 0.5});
    const std::vector<SpVector> Z{SpVector::basis(s, 1)};
    const std::vector<SpVector> X{SpVector::basis(s, 2)};
    const auto fail = check_prop24(Z, X, 0.5, 0.1, 0.5);
    const auto* b = fail.report.find("b[0]");
    REQUIRE(b != nullptr);
    CHECK(b->lhs == Approx(0.8));
    CHECK_FALSE(b->pass);
    CHECK(fail.report.find("orth[0]")->pass);
    // At eps = 1 the orthogonal vector sits exactly on the boundary.
    CHECK_FALSE(check_prop24(Z, X, 1.0, 0.1, 0.5).report.find("b[0]")->pass);

    const std::vector<SpVector> in{3.0 * SpVector::basis(s, 1)};
    const auto ok = check_prop24(Z, in, 0.5, 0.1, 0.5);
    CHECK(ok.report.verdict());
    CHECK(ok.report.find("b[0]")->lhs == 0.0);
    // Samples with r(x) <= beta are skipped.
    CHECK(check_prop24(Z, X, 0.5, 0.9, 0.5).skipped == 1);
    // The norm variant measures against ||x||.
    const auto bp = check_prop24(Z, X, 0.5, 0.1, 0.5, Prop24Variant::BPrime);
    CHECK(bp.report.find("b[0]")->rhs == Approx(0.5));
    CHECK_THROWS_AS(check_prop24(Z, X, 1.5, 0.1, 0.5), PreconditionError);
}

TEST_CASE("projection lower-bound diagnostic")
{
    const WeightedSpace s(4.0, {1.0, 0.8, 0.5, 0.5, 0.3, 0.25, 0.2, 0.2});
    std::vector<Block> blocks;
    std::vector<SpVector> u, w;
    for (std::size_t k = 0; k < 4; ++k) {
        const std::size_t a = 2 * k + 1;
        blocks.push_back(rosenthal_as_block(make_rosenthal(s, {a, a + 1})));
        u.push_back(SpVector::basis(s, a));
        w.push_back(SpVector(s));
    }
    const BlockProjection P(BlockSystem::with_tight_constants(blocks));
    const auto d1 = prop21_diagnostic(u, w, P, 1.0, 3);
    const auto d2 = prop21_diagnostic(u, w, P, 2.0, 3);
    CHECK(d1.window_begin == 1);
    CHECK(d1.window_ratios.size() == 3);
    REQUIRE(d1.bound.has_value());
    REQUIRE(d2.bound.has_value());
    CHECK(*d2.bound == Approx(*d1.bound / 2));
    CHECK(std::isfinite(d1.beta_hat));
    CHECK(std::isfinite(d1.opnorm_lower));
    REQUIRE(d1.beta_hat_prime.has_value());
    // With w = 0 the unit vectors are e_n, whose ratios are the weights.
    CHECK(*d1.beta_hat_prime == Approx(0.2).epsilon(1e-6));
    CHECK_THROWS(prop21_diagnostic(u, w, P, 1.0, 0));
}

TEST_CASE("relative defect: forced disjoint case and the grid oracle")
{
    const WeightedSpace s(4.0, {1.0, 0.8, 0.5, 0.5, 0.3, 0.25});
    const std::vector<SpVector> Y{SpVector::basis(s, 1), SpVector::basis(s, 2)};
    const auto x = make_rosenthal(s, {4, 5, 6}).vector;
    CHECK(relative_defect(Y, x) == Approx(1.0).epsilon(1e-9));
    std::vector<oracle::Vec> Yd;
    for (const auto& y : Y)
        Yd.push_back(y.to_dense());
    CHECK(oracle::grid_relative_defect(4.0, test::weights_of(s), x.to_dense(), Yd) == Approx(1.0).epsilon(1e-6));

    CHECK(relative_defect(Y, 2.0 * Y[0] - Y[1]) <= 1e-9);

    const auto res = defect_experiment(Y, 10.0, 20, 3, std::vector<SpVector>{x});
    CHECK(res.worst_defect <= 1.0 + 1e-9);
    CHECK(res.worst_defect >= 1.0 - 1e-9);

    Rng rng(36);
    for (int t = 0; t < 20; ++t) {
        const auto sp = gen::space(rng, 5, rng.uniform(2.2, 6.0), 0.05, 2.0);
        const auto Yr = gen::independent_family(rng, sp, 2, 3);
        const auto xr = gen::vector(rng, sp, 5);
        if (xr.is_zero())
            continue;
        std::vector<oracle::Vec> Yo;
        for (const auto& y : Yr)
            Yo.push_back(y.to_dense());
        const double got = relative_defect(Yr, xr, 1);
        const double ref = oracle::grid_relative_defect(sp.p(), test::weights_of(sp), xr.to_dense(), Yo);
        CHECK(got <= ref * (1 + 1e-3) + 1e-9);
        CHECK(got >= ref * (1 - 0.02) - 1e-9);
    }
}

TEST_CASE("perturbed basic sequence")
{
    const WeightedSpace s(4.0, {1.0, 0.05, 0.3, 0.2, 0.8, 0.1, 0.7, 0.9});
    const auto Y = perturbed_basic_sequence(s, 2, 2, 0.1);
    REQUIRE(Y.size() == 2);
    CHECK(Y[0].support() == SupportSet{4, 5});
    CHECK(Y[1].support() == SupportSet{6, 7});
    for (const auto& y : Y) {
        REQUIRE(y.nnz() == 2);
        CHECK(y.entries()[0].second == 1.0);
        CHECK(y.entries()[1].second == Approx(0.1));
    }
    // The last index has no successor to perturb.
    const WeightedSpace t(4.0, {1.0, 0.5, 0.05});
    CHECK(perturbed_basic_sequence(t, 1, 1, 0.1)[0].nnz() == 1);
}
