#pragma once

#include <cstdint>

#include "cpmi/decode.hpp"
#include "cpmi/rng.hpp"
#include "cpmi/tree.hpp"

namespace cpmi {

/// Chain connecting adjacent words.
UndirectedTree linear_tree(int n);

/// Decodes an i.i.d. Uniform(0,1) symmetric weight matrix drawn from `rng`.
DecodedTree random_tree(int n, CounterRng& rng, bool projective);
DecodedTree random_tree(int n, std::uint64_t seed, bool projective);

struct LengthMatchOptions {
  int max_restarts = 10000;
  // Backtracking nodes visited per restart before giving up on that order.
  int node_budget_per_n = 64;
};

/// A random spanning tree whose multiset of arc lengths equals gold's.
/// Longest arcs are placed first; candidate positions for each arc are
/// tried in random order with backtracking. The result is uniform over
/// backtracking orders, not over valid trees, and may be nonprojective.
UndirectedTree length_matched_tree(const UndirectedTree& gold, CounterRng& rng,
                                   const LengthMatchOptions& options = {});
UndirectedTree length_matched_tree(const UndirectedTree& gold, std::uint64_t seed,
                                   const LengthMatchOptions& options = {});

}  // namespace cpmi
