#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpmi/matrix.hpp"
#include "cpmi/tree.hpp"

namespace cpmi {

enum class DecoderKind { projective, mst, brute_force };

const char* to_string(DecoderKind k);

/// Rule shared by all decoders when two trees have exactly equal score.
inline constexpr const char* kTieBreakRule =
    "prefer lexicographically smallest edge list under (min, max) ordering";

struct DecodedTree {
  std::string sentence_id;
  UndirectedTree tree;
  double total_score = 0.0;
  DecoderKind decoder = DecoderKind::mst;
  std::vector<std::string> tie_break_trace;  // first entry is kTieBreakRule
};

/// Sum of matrix entries over the edges, accumulated in sorted edge order
/// starting from 0.0. Every decoder reports its score through this.
double tree_score(const CpmiMatrix& m, const std::vector<Edge>& edges);

/// Maximum projective (non-crossing) spanning tree via Eisner's O(n^3)
/// span chart, with the tree rooted at word 1 and directions discarded.
DecodedTree eisner_projective(const CpmiMatrix& m);

/// Maximum spanning tree of the complete graph (Kruskal, weight descending
/// then edge order ascending).
DecodedTree max_spanning_tree(const CpmiMatrix& m);

inline constexpr int kBruteForceMaxN = 8;

/// Enumerates all n^(n-2) labelled trees. Refuses n > kBruteForceMaxN.
DecodedTree brute_force_best(const CpmiMatrix& m, bool projective);

/// Calls `visit` with every labelled spanning tree on n vertices (sorted edges).
template <class Visit>
void for_each_spanning_tree(int n, Visit&& visit);

/// `sentence_id<TAB>i-j,i-j,...`
std::string tree_line(const std::string& sentence_id, const std::vector<Edge>& edges);

struct TreeLine {
  std::string sentence_id;
  std::vector<Edge> edges;
};

/// Reads edge-list files; lines starting with '#' are skipped.
std::vector<TreeLine> read_tree_lines(std::istream& in);
std::vector<TreeLine> load_tree_lines(const std::string& path);

}  // namespace cpmi

#include "cpmi/detail/spanning_trees.hpp"
