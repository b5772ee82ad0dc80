#include "helpers.hpp"

#include "suite/generators.hpp"
#include "xplab/error.hpp"
#include "xplab/operators.hpp"
#include "xplab/random.hpp"

#include <cmath>

using namespace xplab;
using doctest::Approx;

namespace {

oracle::Mat dense_matrix(const LinearOperator& A)
{
    const std::size_t d = A.dim();
    oracle::Mat M{d, oracle::Vec(d * d)};
    std::vector<double> e(d), col(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        A.apply_dense(e, col);
        for (std::size_t i = 0; i < d; ++i)
            M(i, j) = col[i];
    }
    return M;
}

BlockProjection single_rosenthal(const WeightedSpace& s, const SupportSet& I)
{
    return BlockProjection(BlockSystem::with_tight_constants({rosenthal_as_block(make_rosenthal(s, I))}));
}

} // namespace

TEST_CASE("block projection example")
{
    const WeightedSpace s(4.0, {1.0, 0.5});
    const auto P = single_rosenthal(s, {1, 2});
    const SpVector x = SpVector::from_dense(s, std::vector<double>{1.0, 1.0});
    CHECK(P.functional(0, x) == Approx(18.0 / 17.0).epsilon(1e-14));
    const auto Px = project(P, x);
    CHECK(Px[1] == Approx(18.0 / 17.0).epsilon(1e-14));
    CHECK(Px[2] == Approx(9.0 / 17.0).epsilon(1e-14));
    CHECK(project(P, P.system().blocks()[0].vector()) == P.system().blocks()[0].vector());
}

TEST_CASE("block projection annihilates vectors off the designated sets")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.4, 0.3});
    const SpVector z(s, {{1, 1.0}, {2, 0.3}});
    const auto b = Block::unchecked({1, 2}, z, {1}, 1.0, 1.0);
    const BlockProjection P(BlockSystem::with_tight_constants({b}));
    CHECK(project(P, SpVector(s, {{2, 5.0}, {4, 1.0}})).is_zero());
}

TEST_CASE("block system validation")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.4, 0.3});
    const auto a = rosenthal_as_block(make_rosenthal(s, {1, 2}));
    const auto b = rosenthal_as_block(make_rosenthal(s, {2, 3}));
    const auto c = rosenthal_as_block(make_rosenthal(s, {3, 4}));
    CHECK_THROWS_AS(BlockSystem({a, b}, 1.0, 1.0), PreconditionError);
    CHECK_NOTHROW(BlockSystem({a, c}, 1.0, std::max(a.c(), c.c())));
    CHECK_THROWS(BlockSystem({}, 1.0, 1.0));

    // A block whose designated set carries little mass fails (a) for delta = 1
    const SpVector z(s, {{1, 1e-3}, {2, 1.0}});
    const auto weak = Block::unchecked({1, 2}, z, {1}, 1.0, 1.0);
    CHECK_THROWS_AS(BlockSystem({weak}, 1.0, 1.0), PreconditionError);
    const auto sys = BlockSystem::unchecked({weak}, 1.0, 1.0);
    const auto win = ratio_bounds_check(sys);
    REQUIRE(win.size() == 1);
    CHECK_FALSE(win[0].ok);
}

TEST_CASE("bound formula")
{
    const WeightedSpace s(4.0, {0.8, 0.5});
    const auto blk = rosenthal_as_block(make_rosenthal(s, {1, 2}));
    CHECK(prop12_bound(BlockSystem({blk}, 1.0, 1.0)) == 1.0);
    CHECK(prop12_bound(BlockSystem({blk}, 0.5, 3.0)) == 3.0);
    CHECK(prop12_bound(BlockSystem({blk}, 0.25, 2.0)) == 4.0);
    const auto win = ratio_bounds_check(BlockSystem({blk}, 1.0, 1.0));
    CHECK(win[0].lo == Approx(win[0].r).epsilon(1e-12));
    CHECK(win[0].hi == Approx(win[0].r).epsilon(1e-12));
}

TEST_CASE("gram projector examples")
{
    const WeightedSpace s(4.0, {1.0, 0.5});
    const GramProjector Q({SpVector::basis(s, 1)});
    const SpVector x = SpVector::from_dense(s, std::vector<double>{1.0, 1.0});
    const auto Qx = gram_project(Q, x);
    CHECK(Qx[1] == Approx(1.0));
    CHECK(Qx[2] == 0.0);
    CHECK(gram_project(Q, SpVector::basis(s, 2)).is_zero());
    CHECK(gram_project(Q, 3.0 * SpVector::basis(s, 1)) == 3.0 * SpVector::basis(s, 1));

    const WeightedSpace s3(4.0, {1.0, 0.5, 0.2});
    const SpVector u(s3, {{1, 1.0}, {2, 1.0}});
    CHECK_THROWS_AS(GramProjector({u, 2.0 * u}), SingularBasis);
    CHECK_THROWS_AS(GramProjector({u, u + SpVector(s3, {{3, 1e-14}})}), SingularBasis);
}

TEST_CASE("property: gram projector is an orthogonal projection")
{
    Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const auto s = gen::space(rng, 20, rng.uniform(2.1, 8.0), 0.05, 2.0);
        const auto basis = gen::independent_family(rng, s, static_cast<std::size_t>(rng.integer(1, 5)));
        const GramProjector Q(basis);
        const auto x = gen::vector(rng, s, 12);
        const auto y = gen::vector(rng, s, 12);
        const auto Qx = gram_project(Q, x);
        const auto r = x - Qx;
        for (const auto& b : basis)
            CHECK(std::abs(inner(r, b)) <= 1e-9 * (norm_2w(x) * norm_2w(b) + 1e-300));
        const double lhs = norm_2w(x) * norm_2w(x);
        const double rhs = norm_2w(Qx) * norm_2w(Qx) + norm_2w(r) * norm_2w(r);
        CHECK(test::rel_close(lhs, rhs, 1e-9));
        CHECK(xp_norm(gram_project(Q, Qx) - Qx) <= 1e-9 * (xp_norm(Qx) + 1e-300));
        CHECK(std::abs(inner(Qx, y) - inner(x, gram_project(Q, y))) <=
              1e-9 * (norm_2w(x) * norm_2w(y) + 1e-300));
    }
}

TEST_CASE("property: block projection bound, idempotence, window and the dense oracle")
{
    Rng rng(22);
    for (int t = 0; t < 60; ++t) {
        const auto s = gen::space(rng, 30, rng.uniform(2.1, 8.0));
        const auto sys = gen::block_system(rng, s, 5);
        const BlockProjection P(sys);
        const double bound = prop12_bound(sys);
        for (const auto& w : ratio_bounds_check(sys))
            CHECK(w.ok);
        for (std::size_t j = 0; j < sys.size(); ++j)
            CHECK(xp_norm(project(P, sys.blocks()[j].vector()) - sys.blocks()[j].vector()) <=
                  1e-12 * xp_norm(sys.blocks()[j].vector()));

        std::vector<oracle::DenseBlock> db;
        for (const auto& b : sys.blocks())
            db.push_back({b.vector().to_dense(), test::zero_based(b.designated())});
        const auto M = oracle::block_projection_matrix(test::weights_of(s), db);

        for (int k = 0; k < 200; ++k) {
            const auto x = gen::vector(rng, s, 16);
            if (x.is_zero())
                continue;
            const auto Px = project(P, x);
            CHECK(xp_norm(Px) <= bound * xp_norm(x) * (1 + 1e-9));
            CHECK(xp_norm(project(P, Px) - Px) <= 1e-9 * xp_norm(Px) + 1e-300);
            const auto ref = M.apply(x.to_dense());
            const auto got = Px.to_dense();
            for (std::size_t i = 0; i < ref.size(); ++i)
                CHECK(std::abs(got[i] - ref[i]) <= 1e-9 * (xp_norm(Px) + 1.0));
        }
        CHECK(P.xp_norm_upper() <= bound * (1 + 1e-12));
        CHECK(P.norm_2w_exact() == Approx(exact_norm_2w(P)).epsilon(1e-9));
    }
}

TEST_CASE("operator norm estimator examples")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.3});
    CHECK(estimate_opnorm(MatrixOperator::identity(s)).lower == Approx(1.0).epsilon(1e-12));
    CHECK(estimate_opnorm(MatrixOperator::identity(s, 2.0)).lower == Approx(2.0).epsilon(1e-12));
    const auto zero = estimate_opnorm(MatrixOperator::identity(s, 0.0));
    CHECK(zero.lower == 0.0);
    CHECK(zero.zero_operator);
    CHECK(zero.witness.is_zero());

    const auto P = single_rosenthal(s, {1, 2, 3});
    const auto e = estimate_opnorm(P);
    CHECK(e.lower <= 1 + 1e-9);
    CHECK(e.lower >= 1 - 1e-9);
    REQUIRE(e.upper.has_value());
    CHECK(*e.upper <= 1 + 1e-12);
}

TEST_CASE("operator norm estimator: witness, budget monotonicity, seeds and threads")
{
    Rng rng(23);
    for (int t = 0; t < 8; ++t) {
        const auto s = gen::space(rng, 6, rng.uniform(2.1, 6.0), 0.1, 2.0);
        Eigen::MatrixXd M(6, 6);
        for (Eigen::Index i = 0; i < 36; ++i)
            M.data()[i] = rng.normal();
        const MatrixOperator A(s, M);
        for (auto mode : {NormMode::XP, NormMode::TwoW}) {
            OpNormOptions o;
            o.mode = mode;
            o.seed = 7;
            o.budget = 8;
            const auto small = estimate_opnorm(A, o);
            o.budget = 24;
            const auto big = estimate_opnorm(A, o);
            CHECK(big.lower >= small.lower * (1 - 1e-12));
            o.threads = 4;
            const auto par = estimate_opnorm(A, o);
            CHECK(par.lower == big.lower);
            CHECK(par.witness == big.witness);
            CHECK(estimate_opnorm(A, o).lower == big.lower);

            const auto Aw = A.apply(big.witness);
            const double attained = mode == NormMode::XP ? xp_norm(Aw) / xp_norm(big.witness)
                                                         : norm_2w(Aw) / norm_2w(big.witness);
            CHECK(attained == Approx(big.lower).epsilon(1e-9));

            const double grid = oracle::grid_opnorm(s.p(), test::weights_of(s), dense_matrix(A),
                                                    mode == NormMode::XP ? oracle::Mode::XP : oracle::Mode::TwoW);
            CHECK(std::abs(big.lower - grid) <= 0.02 * grid);
        }
        CHECK(exact_norm_2w(A) == Approx(oracle::jacobi_norm_2w(test::weights_of(s), dense_matrix(A))).epsilon(1e-9));
    }
}

TEST_CASE("ratio extrema examples")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.3, 0.2, 0.7, 0.6});
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::vector<SpVector> V{SpVector::basis(s, n)};
        CHECK(estimate_r_sup(V).value == Approx(s.weight(n)).epsilon(1e-9));
        CHECK(estimate_h_inf(V).value == Approx(s.weight(n)).epsilon(1e-9));
    }
    const std::vector<SpVector> E{SpVector::basis(s, 1), SpVector::basis(s, 3), SpVector::basis(s, 4)};
    CHECK(estimate_h_inf(E).value >= 0.2 * (1 - 1e-9));
    CHECK(certified_h_lower(E) >= 0.2 * (1 - 1e-9));

    const auto y1 = make_rosenthal(s, {1, 2});
    const auto y2 = make_rosenthal(s, {3, 4});
    const auto y3 = make_rosenthal(s, {5, 6});
    const std::vector<SpVector> Y{y1.vector, y2.vector, y3.vector};
    // The extremal block on the union lies in the span, so the supremum is
    // its ratio rather than the largest single-block ratio.
    const double top = std::pow(omega(s, SupportSet::interval(1, 6)), s.ratio_exponent());
    const double est = estimate_r_sup(Y).value;
    CHECK(est == Approx(top).epsilon(1e-6));
    std::vector<oracle::Vec> B;
    for (const auto& y : Y)
        B.push_back(y.to_dense());
    CHECK(est == Approx(oracle::grid_ratio_extremum(s.p(), test::weights_of(s), B, true)).epsilon(0.02));

    CHECK_THROWS_AS(estimate_r_sup(std::vector<SpVector>{y1.vector, 2.0 * y1.vector}), SingularBasis);
}

TEST_CASE("property: ratio extrema against the grid oracle")
{
    Rng rng(24);
    for (int t = 0; t < 15; ++t) {
        const auto s = gen::space(rng, 6, rng.uniform(2.2, 6.0), 0.05, 2.0);
        const auto V = gen::independent_family(rng, s, static_cast<std::size_t>(rng.integer(1, 3)), 4);
        std::vector<oracle::Vec> B;
        for (const auto& v : V)
            B.push_back(v.to_dense());
        const auto w = test::weights_of(s);
        const auto sup = estimate_r_sup(V);
        const auto inf = estimate_h_inf(V);
        const double hi = sup.value, lo = inf.value;
        CHECK(ratio(sup.witness) == Approx(hi).epsilon(1e-12));
        CHECK(ratio(inf.witness) == Approx(lo).epsilon(1e-12));
        CHECK(std::abs(hi - oracle::grid_ratio_extremum(s.p(), w, B, true)) <= 0.02 * hi);
        // The infimum can sit on a sharp cancellation (a badly scaled basis
        // combining to a unit vector) that the grid steps over, so the grid
        // only bounds the attained estimate from above.
        CHECK(lo <= oracle::grid_ratio_extremum(s.p(), w, B, false) * 1.02);
        CHECK(certified_h_lower(V) <= lo * (1 + 1e-9));
    }
}

TEST_CASE("norm chain for orthogonal projections")
{
    const WeightedSpace s(4.0, {1.0, 0.5, 0.3});
    const GramProjector Q({SpVector::basis(s, 1)});
    const double nq = gram_norm_for_chain(Q);
    CHECK(nq >= 1.0);
    const auto orth = prop26_chain(Q, 0.5, SpVector::basis(s, 2), nq);
    CHECK(orth.lhs == 0.0);
    CHECK(orth.ok);
    const auto vac = prop26_chain(Q, 1e-12, SpVector(s, {{1, 1.0}, {3, 2.0}}), nq);
    CHECK(vac.rhs > 1e10);
    CHECK(vac.ok);
    CHECK_THROWS(prop26_chain(Q, 0.5, SpVector(s), nq));

    Rng rng(25);
    for (int t = 0; t < 200; ++t) {
        const auto sp = gen::space(rng, 12, rng.uniform(2.1, 8.0), 0.05, 2.0);
        const GramProjector G(gen::independent_family(rng, sp, static_cast<std::size_t>(rng.integer(1, 4))));
        const double bp = std::min(1.0, certified_h_lower(G.basis()));
        OpNormOptions o;
        o.budget = 16;
        const double n = gram_norm_for_chain(G, 1.05, o);
        for (int k = 0; k < 20; ++k) {
            const auto x = gen::vector(rng, sp, 8);
            if (!x.is_zero())
                CHECK(prop26_chain(G, bp, x, n).ok);
        }
    }
}
