#include "cpmi/baselines.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace cpmi {

UndirectedTree linear_tree(int n) {
  if (n < 1) throw Error("linear tree needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return UndirectedTree(n, std::move(edges));
}

DecodedTree random_tree(int n, CounterRng& rng, bool projective) {
  if (n < 1) throw Error("random tree needs n >= 1");
  CpmiMatrix m = CpmiMatrix::zeros(n);
  m.variant = Variant::signed_score;
  m.source = "uniform-random";
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) m.set_pair(i, j, rng.uniform());
  }
  return projective ? eisner_projective(m) : max_spanning_tree(m);
}

DecodedTree random_tree(int n, std::uint64_t seed, bool projective) {
  CounterRng rng(mix64(seed));
  return random_tree(n, rng, projective);
}

namespace {

// Union-find without path compression so unions can be undone.
class UndoableForest {
 public:
  explicit UndoableForest(int n) : parent_(static_cast<std::size_t>(n) + 1), size_(parent_.size(), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }

  void undo() {
    int b = history_.back();
    history_.pop_back();
    int a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

}  // namespace

UndirectedTree length_matched_tree(const UndirectedTree& gold, CounterRng& rng,
                                   const LengthMatchOptions& options) {
  if (!gold.is_spanning_tree()) throw Error("length-matched control needs a spanning gold tree");
  const int n = gold.n;
  std::vector<int> lengths;
  for (const Edge& e : gold.edges) lengths.push_back(e.length());
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
  if (lengths.empty()) return UndirectedTree(n, {});

  const long budget = static_cast<long>(options.node_budget_per_n) * n * n + 1000;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    UndoableForest forest(n);
    std::vector<Edge> placed;
    long visited = 0;

    std::function<bool(std::size_t)> place = [&](std::size_t k) -> bool {
      if (k == lengths.size()) return true;
      if (++visited > budget) return false;
      const int len = lengths[k];
      std::vector<int> starts(static_cast<std::size_t>(n - len));
      std::iota(starts.begin(), starts.end(), 1);
      rng.shuffle(starts);
      for (int i : starts) {
        if (!forest.unite(i, i + len)) continue;
        placed.emplace_back(i, i + len);
        if (place(k + 1)) return true;
        placed.pop_back();
        forest.undo();
        if (visited > budget) return false;
      }
      return false;
    };

    if (place(0)) return UndirectedTree(n, std::move(placed));
  }
  throw Error("no length-matched tree found after " + std::to_string(options.max_restarts) +
              " restarts");
}

UndirectedTree length_matched_tree(const UndirectedTree& gold, std::uint64_t seed,
                                   const LengthMatchOptions& options) {
  CounterRng rng(mix64(seed));
  return length_matched_tree(gold, rng, options);
}

}  // namespace cpmi
