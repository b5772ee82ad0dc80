#pragma once

// Random instances shared by the unit tests and the acceptance runner.

#include "xplab/blocks.hpp"
#include "xplab/operators.hpp"
#include "xplab/random.hpp"
#include "xplab/space.hpp"
#include "xplab/splitter.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace xplab::gen {

/// D weights log-uniform on [wlo, whi].
WeightedSpace space(Rng& rng, std::size_t D, double p, double wlo = 1e-3, double whi = 2.0);

/// k distinct indices from 1..D, sorted.
SupportSet subset(Rng& rng, std::size_t D, std::size_t k);

/// Gaussian coefficients on S.
SpVector gaussian_on(Rng& rng, const WeightedSpace& space, const SupportSet& S);

/// Sparse random vector: random support of size 1..max_support, Gaussian
/// values, occasionally a scaled extremal block.
SpVector vector(Rng& rng, const WeightedSpace& space, std::size_t max_support = 12);

/// A block on S with random coefficients and a random nonempty E inside S,
/// with delta = tight delta and c = max(tight c, tight support c), each
/// loosened by a random factor.
Block block(Rng& rng, const WeightedSpace& space, const SupportSet& S);

/// Up to `nblocks` blocks on disjoint random supports, with global
/// constants taken from the blocks.
BlockSystem block_system(Rng& rng, const WeightedSpace& space, std::size_t nblocks, std::size_t max_block = 6);

/// Independent family of k random vectors with supports of size <= max_support.
std::vector<SpVector> independent_family(Rng& rng, const WeightedSpace& space, std::size_t k,
                                         std::size_t max_support = 6);

/// An input of the splitting procedure: x fixed by P, supported past N.
/// Satisfies every precondition of split() and the premise
/// |x_{E_x}|_2 < delta |x|_2.
struct SplitInstance {
    SpVector x;
    std::size_t N = 0;
    SplitConstants constants;
    BlockProjection P;
};

/// P consists of singleton blocks and extremal blocks (both with norm 1 in
/// either mode) plus nothing else; x is a large coefficient at a small
/// weight plus many coefficients just under the extraction threshold.
/// Returns nothing when the attempt misses a precondition.
std::optional<SplitInstance> split_instance(Rng& rng);

} // namespace xplab::gen
