#include "cpmi/decode.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

namespace cpmi {

const char* to_string(DecoderKind k) {
  switch (k) {
    case DecoderKind::projective: return "projective";
    case DecoderKind::mst: return "mst";
    case DecoderKind::brute_force: return "brute_force";
  }
  return "?";
}

double tree_score(const CpmiMatrix& m, const std::vector<Edge>& edges) {
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (const Edge& e : sorted) total += m.at(e.lo, e.hi);
  return total;
}

namespace {

void require_decodable(const CpmiMatrix& m) {
  if (m.n < 1) throw Error("cannot decode a matrix with n < 1");
  if (static_cast<int>(m.score.size()) != m.n * m.n) throw Error("matrix storage does not match n");
  if (!m.is_symmetric()) {
    throw Error("matrix '" + m.sentence_id + "' is not symmetric; undirected decoding requires it");
  }
}

bool lex_less(std::vector<Edge> a, std::vector<Edge> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a < b;
}

DecodedTree finish(const CpmiMatrix& m, std::vector<Edge> edges, DecoderKind kind,
                   std::vector<std::string> trace) {
  DecodedTree out;
  out.sentence_id = m.sentence_id;
  out.tree = UndirectedTree(m.n, std::move(edges));
  out.total_score = tree_score(m, out.tree.edges);
  out.decoder = kind;
  out.tie_break_trace.push_back(kTieBreakRule);
  for (auto& t : trace) out.tie_break_trace.push_back(std::move(t));
  return out;
}

// First-order Eisner chart over 0-based words. Directions: 0 = head on the
// right end of the span, 1 = head on the left end.
class EisnerChart {
 public:
  explicit EisnerChart(const CpmiMatrix& m)
      : m_(m), n_(m.n), size_(static_cast<std::size_t>(n_) * n_) {
    for (auto& c : complete_) c.assign(size_, 0.0);
    for (auto& c : incomplete_) c.assign(size_, 0.0);
    for (auto& b : complete_split_) b.assign(size_, -1);
    for (auto& b : incomplete_split_) b.assign(size_, -1);
  }

  std::vector<Edge> solve() {
    for (int width = 1; width < n_; ++width) {
      for (int s = 0; s + width < n_; ++s) {
        const int t = s + width;
        fill_incomplete(s, t);
        fill_complete(s, t, 0);
        fill_complete(s, t, 1);
      }
    }
    std::vector<Edge> edges;
    collect(true, 0, n_ - 1, 1, edges);
    return edges;
  }

  std::vector<std::string> take_trace() {
    if (suppressed_ > 0) trace_.push_back(std::to_string(suppressed_) + " further ties not itemized");
    return std::move(trace_);
  }

 private:
  std::size_t at(int s, int t) const { return static_cast<std::size_t>(s) * n_ + t; }

  double weight(int s, int t) const { return m_.at(s + 1, t + 1); }

  void fill_incomplete(int s, int t) {
    const double arc = weight(s, t);
    for (int dir = 0; dir < 2; ++dir) {
      double best = 0.0;
      int best_r = -1;
      for (int r = s; r < t; ++r) {
        const double cand = complete_[1][at(s, r)] + complete_[0][at(r + 1, t)] + arc;
        if (best_r < 0 || cand > best) {
          best = cand;
          best_r = r;
        } else if (cand == best && prefer(false, s, t, dir, r, best_r)) {
          best_r = r;
        }
      }
      incomplete_[dir][at(s, t)] = best;
      incomplete_split_[dir][at(s, t)] = best_r;
    }
  }

  void fill_complete(int s, int t, int dir) {
    double best = 0.0;
    int best_r = -1;
    if (dir == 0) {
      for (int r = s; r < t; ++r) {
        const double cand = complete_[0][at(s, r)] + incomplete_[0][at(r, t)];
        if (best_r < 0 || cand > best) {
          best = cand;
          best_r = r;
        } else if (cand == best && prefer(true, s, t, dir, r, best_r)) {
          best_r = r;
        }
      }
    } else {
      for (int r = s + 1; r <= t; ++r) {
        const double cand = incomplete_[1][at(s, r)] + complete_[1][at(r, t)];
        if (best_r < 0 || cand > best) {
          best = cand;
          best_r = r;
        } else if (cand == best && prefer(true, s, t, dir, r, best_r)) {
          best_r = r;
        }
      }
    }
    complete_[dir][at(s, t)] = best;
    complete_split_[dir][at(s, t)] = best_r;
  }

  // Exact score tie between splits: keep the one yielding the smaller edge list.
  bool prefer(bool is_complete, int s, int t, int dir, int r, int incumbent) {
    auto a = split_edges(is_complete, s, t, dir, r);
    auto b = split_edges(is_complete, s, t, dir, incumbent);
    const bool take = lex_less(a, b);
    if (trace_.size() >= kMaxTraceNotes) {
      ++suppressed_;
      return take;
    }
    std::ostringstream note;
    note << (is_complete ? "complete" : "incomplete") << " span [" << s + 1 << "," << t + 1
         << "]: split " << (take ? r : incumbent) + 1 << " kept over "
         << (take ? incumbent : r) + 1;
    trace_.push_back(note.str());
    return take;
  }

  std::vector<Edge> split_edges(bool is_complete, int s, int t, int dir, int r) {
    std::vector<Edge> edges;
    if (!is_complete) {
      edges.emplace_back(s + 1, t + 1);
      collect(true, s, r, 1, edges);
      collect(true, r + 1, t, 0, edges);
    } else if (dir == 0) {
      collect(true, s, r, 0, edges);
      collect(false, r, t, 0, edges);
    } else {
      collect(false, s, r, 1, edges);
      collect(true, r, t, 1, edges);
    }
    return edges;
  }

  void collect(bool is_complete, int s, int t, int dir, std::vector<Edge>& out) const {
    if (s >= t) return;
    if (!is_complete) {
      const int r = incomplete_split_[dir][at(s, t)];
      out.emplace_back(s + 1, t + 1);
      collect(true, s, r, 1, out);
      collect(true, r + 1, t, 0, out);
    } else if (dir == 0) {
      const int r = complete_split_[0][at(s, t)];
      collect(true, s, r, 0, out);
      collect(false, r, t, 0, out);
    } else {
      const int r = complete_split_[1][at(s, t)];
      collect(false, s, r, 1, out);
      collect(true, r, t, 1, out);
    }
  }

  const CpmiMatrix& m_;
  int n_;
  std::size_t size_;
  std::array<std::vector<double>, 2> complete_;
  std::array<std::vector<double>, 2> incomplete_;
  std::array<std::vector<int>, 2> complete_split_;
  std::array<std::vector<int>, 2> incomplete_split_;
  std::vector<std::string> trace_;
  std::size_t suppressed_ = 0;
  static constexpr std::size_t kMaxTraceNotes = 64;
};

}  // namespace

DecodedTree eisner_projective(const CpmiMatrix& m) {
  require_decodable(m);
  EisnerChart chart(m);
  auto edges = chart.solve();
  return finish(m, std::move(edges), DecoderKind::projective, chart.take_trace());
}

DecodedTree max_spanning_tree(const CpmiMatrix& m) {
  require_decodable(m);
  struct Candidate {
    Edge edge;
    double weight;
  };
  std::vector<Candidate> cands;
  for (int i = 1; i <= m.n; ++i) {
    for (int j = i + 1; j <= m.n; ++j) cands.push_back({Edge(i, j), m.at(i, j)});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.edge < b.edge;
  });

  std::vector<int> parent(static_cast<std::size_t>(m.n) + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::vector<Edge> edges;
  std::vector<std::string> trace;
  for (std::size_t g = 0; g < cands.size() && static_cast<int>(edges.size()) < m.n - 1;) {
    std::size_t end = g;
    while (end < cands.size() && cands[end].weight == cands[g].weight) ++end;
    std::size_t accepted = 0, rejected = 0;
    for (std::size_t k = g; k < end; ++k) {
      int a = find(cands[k].edge.lo), b = find(cands[k].edge.hi);
      if (a == b) {
        ++rejected;
        continue;
      }
      parent[a] = b;
      edges.push_back(cands[k].edge);
      ++accepted;
    }
    if (end - g > 1 && accepted > 0 && rejected > 0) {
      std::ostringstream note;
      note << "equal weight " << cands[g].weight << " shared by " << end - g
           << " edges: accepted in edge order";
      trace.push_back(note.str());
    }
    g = end;
  }
  return finish(m, std::move(edges), DecoderKind::mst, std::move(trace));
}

DecodedTree brute_force_best(const CpmiMatrix& m, bool projective) {
  if (m.n > kBruteForceMaxN) {
    throw Error("brute force decoding refused for n=" + std::to_string(m.n) + " (limit " +
                std::to_string(kBruteForceMaxN) + ")");
  }
  require_decodable(m);
  std::vector<Edge> best;
  double best_score = 0.0;
  bool found = false;
  std::size_t ties = 0;
  for_each_spanning_tree(m.n, [&](const std::vector<Edge>& edges) {
    if (projective && !UndirectedTree(m.n, edges).is_projective()) return;
    const double s = tree_score(m, edges);
    if (!found || s > best_score) {
      best = edges;
      best_score = s;
      found = true;
    } else if (s == best_score) {
      ++ties;
      if (edges < best) best = edges;
    }
  });
  std::vector<std::string> trace;
  if (ties > 0) trace.push_back(std::to_string(ties) + " exactly tied trees resolved by edge order");
  return finish(m, std::move(best), DecoderKind::brute_force, std::move(trace));
}

std::string tree_line(const std::string& sentence_id, const std::vector<Edge>& edges) {
  return sentence_id + '\t' + format_edges(edges);
}

std::vector<TreeLine> read_tree_lines(std::istream& in) {
  std::vector<TreeLine> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    TreeLine t;
    t.sentence_id = line.substr(0, tab);
    if (tab != std::string::npos) t.edges = parse_edges(line.substr(tab + 1));
    std::sort(t.edges.begin(), t.edges.end());
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TreeLine> load_tree_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tree file '" + path + "'");
  return read_tree_lines(in);
}

}  // namespace cpmi
