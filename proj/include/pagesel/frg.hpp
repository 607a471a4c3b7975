#pragma once

#include <cstdint>
#include <vector>

#include "pagesel/analysis.hpp"
#include "pagesel/ir.hpp"
#include "pagesel/rational.hpp"

namespace pagesel {

/// Function relation graph: a symmetric, zero-diagonal weight table over the
/// program's functions. An edge weight approximates the code-size savings of
/// co-locating the two functions in one page.
class Frg {
 public:
  Frg() = default;
  explicit Frg(uint32_t n) : n_(n), w_(static_cast<size_t>(n) * n) {}

  uint32_t size() const { return n_; }

  const Rational& weight(FuncId g, FuncId h) const { return w_[idx(g, h)]; }

  void add_weight(FuncId g, FuncId h, const Rational& v) {
    w_[idx(g, h)] += v;
    w_[idx(h, g)] += v;
  }

  Rational total_weight() const {
    Rational t;
    for (FuncId g = 0; g < n_; ++g)
      for (FuncId h = g + 1; h < n_; ++h) t += weight(g, h);
    return t;
  }

  struct Edge {
    FuncId g, h;  // g < h
    Rational weight;
  };

  /// Nonzero edges in (g, h) index order.
  std::vector<Edge> edges() const {
    std::vector<Edge> e;
    for (FuncId g = 0; g < n_; ++g)
      for (FuncId h = g + 1; h < n_; ++h)
        if (!weight(g, h).is_zero()) e.push_back({g, h, weight(g, h)});
    return e;
  }

 private:
  size_t idx(FuncId g, FuncId h) const { return static_cast<size_t>(g) * n_ + h; }

  uint32_t n_ = 0;
  std::vector<Rational> w_;
};

/// One scan over all page-nontransparent instructions in canonical order
/// (function, block, instruction). A site whose incoming relation V differs
/// from its required target T spreads prevalue/|V| over every unordered pair
/// of distinct functions in V ∪ T.
Frg build_frg(const Program& p, const VopTable& vop);

inline Frg build_frg(const Program& p, const DataflowResult& d) {
  return build_frg(p, VopTable(p, d));
}

}  // namespace pagesel
