#pragma once

#include <algorithm>
#include <vector>

#include "cpmi/tree.hpp"

namespace cpmi {

// Walks every Pruefer sequence over 1..n in odometer order and decodes it.
template <class Visit>
void for_each_spanning_tree(int n, Visit&& visit) {
  if (n <= 1) {
    visit(std::vector<Edge>{});
    return;
  }
  if (n == 2) {
    visit(std::vector<Edge>{Edge(1, 2)});
    return;
  }
  const int len = n - 2;
  std::vector<int> code(static_cast<std::size_t>(len), 1);
  std::vector<int> degree(static_cast<std::size_t>(n) + 1);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) - 1);
  while (true) {
    std::fill(degree.begin(), degree.end(), 1);
    for (int c : code) ++degree[static_cast<std::size_t>(c)];
    edges.clear();
    for (int c : code) {
      int leaf = 1;
      while (degree[static_cast<std::size_t>(leaf)] != 1) ++leaf;
      edges.emplace_back(leaf, c);
      --degree[static_cast<std::size_t>(leaf)];
      --degree[static_cast<std::size_t>(c)];
    }
    int u = 0, v = 0;
    for (int x = 1; x <= n; ++x) {
      if (degree[static_cast<std::size_t>(x)] == 1) (u == 0 ? u : v) = x;
    }
    edges.emplace_back(u, v);
    std::sort(edges.begin(), edges.end());
    visit(static_cast<const std::vector<Edge>&>(edges));

    int pos = len - 1;
    while (pos >= 0 && code[static_cast<std::size_t>(pos)] == n) {
      code[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++code[static_cast<std::size_t>(pos)];
  }
}

}  // namespace cpmi
