#pragma once

// Brute-force tree edit distance: enumerates every valid edit mapping
// (one-to-one, ancestor- and sibling-order-preserving) and prices it as
// renames of mapped pairs plus unit deletes and inserts for the rest.
// Exponential; meant for trees of at most ~7 nodes.

#include <cstddef>
#include <string>
#include <vector>

#include "fdr/table_metrics.hpp"
#include "levenshtein_oracle.hpp"

namespace oracle {

struct FlatTree {
  std::vector<const fdr::TableNode*> node;  // preorder
  std::vector<std::size_t> end;             // one past the last preorder descendant
};

inline FlatTree flatten(const fdr::TableTree& t) {
  FlatTree f;
  f.node.reserve(t.size());
  f.end.resize(t.size());
  // Recursive preorder walk over child lists; does not trust index order.
  struct Walk {
    const fdr::TableTree& t;
    FlatTree& f;
    std::size_t go(std::size_t idx) {
      std::size_t me = f.node.size();
      f.node.push_back(&t.nodes[idx]);
      for (std::size_t c : t.nodes[idx].children) go(c);
      f.end[me] = f.node.size();
      return me;
    }
  } walk{t, f};
  if (!t.nodes.empty()) walk.go(0);
  f.end.resize(f.node.size());
  return f;
}

inline double rename(const fdr::TableNode& a, const fdr::TableNode& b, bool structure_only) {
  if (a.tag != b.tag) return 1.0;
  if (a.tag != fdr::TableTag::Td) return 0.0;
  if (a.header != b.header || a.rowspan != b.rowspan || a.colspan != b.colspan) return 1.0;
  if (structure_only) return 0.0;
  return ned(decode_utf8(a.text), decode_utf8(b.text));
}

namespace detail {

struct Search {
  const FlatTree& a;
  const FlatTree& b;
  bool structure_only;
  std::vector<std::pair<std::size_t, std::size_t>> mapping;
  std::vector<bool> used;
  double best = 1e300;

  bool ancestor(const FlatTree& t, std::size_t x, std::size_t y) const { return x < y && y < t.end[x]; }

  bool compatible(std::size_t i, std::size_t j) const {
    for (auto [pi, pj] : mapping) {
      if (ancestor(a, pi, i) != ancestor(b, pj, j)) return false;
      // pi precedes i in preorder; the partner must precede j as well.
      if (!(pj < j)) return false;
    }
    return true;
  }

  void run(std::size_t i, double cost) {
    if (cost >= best) return;
    if (i == a.node.size()) {
      std::size_t mapped = mapping.size();
      double total = cost + static_cast<double>(b.node.size() - mapped);
      if (total < best) best = total;
      return;
    }
    run(i + 1, cost + 1.0);  // delete a-node i
    for (std::size_t j = 0; j < b.node.size(); ++j) {
      if (used[j] || !compatible(i, j)) continue;
      used[j] = true;
      mapping.emplace_back(i, j);
      run(i + 1, cost + rename(*a.node[i], *b.node[j], structure_only));
      mapping.pop_back();
      used[j] = false;
    }
  }
};

}  // namespace detail

inline double ted(const fdr::TableTree& t1, const fdr::TableTree& t2, bool structure_only) {
  FlatTree a = flatten(t1), b = flatten(t2);
  detail::Search s{a, b, structure_only, {}, std::vector<bool>(b.node.size(), false)};
  s.run(0, 0.0);
  return s.best;
}

}  // namespace oracle
