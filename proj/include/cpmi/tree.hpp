#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpmi {

/// Base class for every data error raised by the toolkit. The CLI maps
/// these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An unordered pair of 1-based word positions. Always stored with
/// lo < hi, so the default ordering is the canonical (min, max) order
/// used for tie-breaking.
struct Edge {
  int lo = 0;
  int hi = 0;

  Edge() = default;
  Edge(int i, int j);

  int length() const { return hi - lo; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// |i - j| for two distinct positions.
int arc_length(int i, int j);
inline int arc_length(const Edge& e) { return e.length(); }

/// Whether {a,b} and {c,d} cross when drawn above the sentence.
bool edges_cross(const Edge& a, const Edge& b);

struct UndirectedTree {
  int n = 0;
  std::vector<Edge> edges;  // kept sorted

  UndirectedTree() = default;
  UndirectedTree(int n, std::vector<Edge> edges);

  bool contains(const Edge& e) const;
  bool is_spanning_tree() const;
  bool is_projective() const;
};

std::string format_edges(const std::vector<Edge>& edges);  // "1-2,2-3"
std::vector<Edge> parse_edges(const std::string& text);

}  // namespace cpmi
