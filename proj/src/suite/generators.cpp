#include "suite/generators.hpp"

#include "xplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xplab::gen {

WeightedSpace space(Rng& rng, std::size_t D, double p, double wlo, double whi)
{
    std::vector<double> w(D);
    for (auto& v : w)
        v = rng.log_uniform(wlo, whi);
    return WeightedSpace(p, std::move(w));
}

SupportSet subset(Rng& rng, std::size_t D, std::size_t k)
{
    k = std::min(k, D);
    std::vector<std::size_t> idx(D);
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rng.integer(static_cast<std::int64_t>(i), static_cast<std::int64_t>(D - 1)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return SupportSet(std::move(idx));
}

SpVector gaussian_on(Rng& rng, const WeightedSpace& space, const SupportSet& S)
{
    std::vector<SpVector::Entry> e;
    for (std::size_t n : S)
        e.emplace_back(n, rng.normal());
    return SpVector(space, std::move(e));
}

SpVector vector(Rng& rng, const WeightedSpace& space, std::size_t max_support)
{
    const std::size_t D = space.dim();
    for (;;) {
        const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(std::min(D, max_support))));
        const SupportSet S = subset(rng, D, k);
        const double u = rng.uniform();
        SpVector x(space);
        if (u < 0.2) {
            x = make_rosenthal(space, S).vector;
            x *= rng.log_uniform(1e-2, 1e2) * (rng.coin() ? 1.0 : -1.0);
        } else if (u < 0.3) {
            std::vector<SpVector::Entry> e;
            for (std::size_t n : S)
                e.emplace_back(n, rng.log_uniform(1e-3, 1e3) * (rng.coin() ? 1.0 : -1.0));
            x = SpVector(space, std::move(e));
        } else {
            x = gaussian_on(rng, space, S);
        }
        if (!x.is_zero())
            return x;
    }
}

Block block(Rng& rng, const WeightedSpace& space, const SupportSet& S)
{
    for (;;) {
        const SpVector z = rng.uniform() < 0.25 ? make_rosenthal(space, S).vector : gaussian_on(rng, space, S);
        const auto k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(S.size())));
        std::vector<std::size_t> pool = S.indices();
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(
                rng.integer(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size() - 1)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        SupportSet E(std::move(pool));
        if (norm_2w(restrict(z, E)) == 0.0)
            continue;
        const Block probe = Block::unchecked(S, z, E, 1.0, 1.0);
        const double delta = probe.tight_delta() * rng.uniform(0.5, 1.0);
        const double c = std::max(probe.tight_c(), probe.tight_support_c()) * rng.uniform(1.0, 1.5);
        return Block::make(S, z, std::move(E), delta, c);
    }
}

BlockSystem block_system(Rng& rng, const WeightedSpace& space, std::size_t nblocks, std::size_t max_block)
{
    const std::size_t D = space.dim();
    const SupportSet all = subset(rng, D, D);
    std::vector<std::size_t> order = all.indices();
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto j = static_cast<std::size_t>(
            rng.integer(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size() - 1)));
        std::swap(order[i], order[j]);
    }
    std::vector<Block> blocks;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < nblocks && pos < order.size(); ++b) {
        const auto len = std::min<std::size_t>(
            static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_block))), order.size() - pos);
        SupportSet S(std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                              order.begin() + static_cast<std::ptrdiff_t>(pos + len)));
        pos += len;
        blocks.push_back(block(rng, space, S));
    }
    double delta = 1.0;
    double c = 0.0;
    for (const auto& b : blocks) {
        delta = std::min(delta, b.delta());
        c = std::max(c, b.c());
    }
    return BlockSystem(std::move(blocks), delta, c);
}

std::vector<SpVector> independent_family(Rng& rng, const WeightedSpace& space, std::size_t k, std::size_t max_support)
{
    for (;;) {
        std::vector<SpVector> V;
        for (std::size_t i = 0; i < k; ++i)
            V.push_back(vector(rng, space, max_support));
        try {
            GramProjector check(V);
            if (check.condition_number() < 1e8)
                return V;
        } catch (const SingularBasis&) {
        }
    }
}

std::optional<SplitInstance> split_instance(Rng& rng)
{
    const auto D = static_cast<std::size_t>(rng.integer(24, 48));
    const double p = rng.uniform(2.5, 6.0);
    const WeightedSpace sp = space(rng, D, p, 1e-3, 2.0);
    const auto N = static_cast<std::size_t>(rng.integer(0, 4));

    std::vector<std::size_t> tail(D - N);
    std::iota(tail.begin(), tail.end(), N + 1);
    std::sort(tail.begin(), tail.end(), [&](std::size_t a, std::size_t b) { return sp.weight(a) < sp.weight(b); });
    const std::size_t s = tail.front();
    const auto m = static_cast<std::size_t>(rng.integer(4, 12));
    std::vector<std::size_t> smalls(tail.end() - static_cast<std::ptrdiff_t>(m), tail.end());
    std::vector<std::size_t> rest(tail.begin() + 1, tail.end() - static_cast<std::ptrdiff_t>(m));
    const bool with_extremal = rest.size() >= 3 && rng.coin();
    SupportSet I;
    if (with_extremal) {
        const SupportSet pick = subset(rng, rest.size(), static_cast<std::size_t>(rng.integer(2, 3)));
        std::vector<std::size_t> idx;
        for (std::size_t k : pick)
            idx.push_back(rest[k - 1]);
        I = SupportSet(std::move(idx));
    }

    std::vector<Block> blocks;
    auto singleton = [&](std::size_t n) {
        blocks.push_back(Block::unchecked(SupportSet{n}, SpVector::basis(sp, n), SupportSet{n}, 1.0, 1.0));
    };
    singleton(s);
    for (std::size_t n : smalls)
        singleton(n);
    RosenthalBlock yI{I, SpVector(sp)};
    if (with_extremal) {
        yI = make_rosenthal(sp, I);
        blocks.push_back(Block::unchecked(I, yI.vector, I, 1.0, 1.0));
    }
    BlockProjection P(BlockSystem::with_tight_constants(std::move(blocks)));
    const ProjectionNorms norms = projection_norms(P);

    const double delta = rng.uniform(0.05, 0.9) / norms.normP2;
    const double c = rng.uniform(1.0, 3.0);
    const double eps = rng.uniform(0.05, 1.0);
    SplitConstants k;
    try {
        k = solve_constants(delta, c, eps, norms.normP, norms.normP2, p);
    } catch (const InfeasibleError&) {
        return std::nullopt;
    }

    // Coefficients kappa rho w_j^{2/(p-2)} tau^{-2/(p-2)} with kappa < 1 stay
    // below the extraction threshold as long as |x|_2 <= tau.
    const double tau = rng.uniform(k.alpha, k.beta);
    const double e2 = sp.block_exponent();
    const double scale = k.rho * std::pow(tau, -e2);
    std::vector<double> kappa(smalls.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < smalls.size(); ++i) {
        kappa[i] = rng.uniform(0.2, 0.8);
        const double v = kappa[i] * scale * sp.block_coefficient(smalls[i]);
        mass += v * v * sp.weight(smalls[i]) * sp.weight(smalls[i]);
    }
    double kappa_I = 0.0;
    if (with_extremal) {
        kappa_I = rng.uniform(0.2, 0.8);
        const double t = kappa_I * scale;
        mass += t * t * omega(sp, I);
    }
    const double ws = sp.weight(s);
    const double target = tau * tau - ws * ws;
    if (!(target > 0.0) || !(mass > 0.0))
        return std::nullopt;
    const double f = std::sqrt(target / mass);
    for (auto& v : kappa)
        v *= f;
    kappa_I *= f;
    if (*std::max_element(kappa.begin(), kappa.end()) >= 0.95 || kappa_I >= 0.95)
        return std::nullopt;

    std::vector<SpVector::Entry> entries;
    double pmass = 0.0;
    for (std::size_t i = 0; i < smalls.size(); ++i) {
        const double v = kappa[i] * scale * sp.block_coefficient(smalls[i]) * (rng.coin() ? 1.0 : -1.0);
        pmass += std::pow(std::abs(v), p);
        entries.emplace_back(smalls[i], v);
    }
    SpVector x(sp, std::move(entries));
    if (with_extremal) {
        const SpVector part = (kappa_I * scale * (rng.coin() ? 1.0 : -1.0)) * yI.vector;
        pmass += std::pow(norm_p(part), p);
        x += part;
    }
    if (pmass >= 1.0)
        return std::nullopt;
    x += std::pow(1.0 - pmass, 1.0 / p) * SpVector::basis(sp, s);
    x *= 1.0 / xp_norm(x);

    try {
        const SplitResult r = split(x, N, k, P);
        if (!r.premise_met)
            return std::nullopt;
    } catch (const PreconditionError&) {
        return std::nullopt;
    }
    return SplitInstance{std::move(x), N, k, std::move(P)};
}

} // namespace xplab::gen
