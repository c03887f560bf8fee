#include "cpmi/tree.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cpmi {

Edge::Edge(int i, int j) : lo(std::min(i, j)), hi(std::max(i, j)) {
  if (i == j) {
    throw Error("self edge {" + std::to_string(i) + "," + std::to_string(j) + "}");
  }
}

int arc_length(int i, int j) {
  if (i == j) {
    throw Error("arc length undefined for identical positions " + std::to_string(i));
  }
  return i < j ? j - i : i - j;
}

bool edges_cross(const Edge& a, const Edge& b) {
  return (a.lo < b.lo && b.lo < a.hi && a.hi < b.hi) ||
         (b.lo < a.lo && a.lo < b.hi && b.hi < a.hi);
}

UndirectedTree::UndirectedTree(int n_, std::vector<Edge> edges_)
    : n(n_), edges(std::move(edges_)) {
  std::sort(edges.begin(), edges.end());
}

bool UndirectedTree::contains(const Edge& e) const {
  return std::binary_search(edges.begin(), edges.end(), e);
}

bool UndirectedTree::is_spanning_tree() const {
  if (n < 1 || static_cast<int>(edges.size()) != n - 1) return false;
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : edges) {
    if (e.lo < 1 || e.hi > n) return false;
    int a = find(e.lo), b = find(e.hi);
    if (a == b) return false;
    parent[a] = b;
  }
  return true;
}

bool UndirectedTree::is_projective() const {
  for (std::size_t x = 0; x < edges.size(); ++x) {
    for (std::size_t y = x + 1; y < edges.size(); ++y) {
      if (edges_cross(edges[x], edges[y])) return false;
    }
  }
  return true;
}

std::string format_edges(const std::vector<Edge>& edges) {
  std::string out;
  for (const Edge& e : edges) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.lo) + '-' + std::to_string(e.hi);
  }
  return out;
}

std::vector<Edge> parse_edges(const std::string& text) {
  std::vector<Edge> edges;
  if (text.empty()) return edges;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto dash = item.find('-');
    if (dash == std::string::npos) throw Error("malformed edge '" + item + "'");
    try {
      std::size_t used_a = 0, used_b = 0;
      std::string a = item.substr(0, dash), b = item.substr(dash + 1);
      int i = std::stoi(a, &used_a), j = std::stoi(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(item);
      edges.emplace_back(i, j);
    } catch (const std::logic_error&) {
      throw Error("malformed edge '" + item + "'");
    }
  }
  return edges;
}

}  // namespace cpmi
