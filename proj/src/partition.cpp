#include "pagesel/partition.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pagesel/psi.hpp"

namespace pagesel {

namespace {

constexpr uint32_t kMaxExhaustiveFuncs = 10;
constexpr uint32_t kMaxExhaustivePages = 3;

}  // namespace

GreedyResult greedy_partition(const Frg& frg, const Program& p, const PartitionOptions& opts) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  const uint32_t pages = p.config.page_count;

  std::vector<uint64_t> est(n);
  std::vector<uint64_t> refund(n);
  for (FuncId f = 0; f < n; ++f) {
    est[f] = estimated_size(p.functions[f], p.config);
    refund[f] = opts.conservative_size
                    ? 0
                    : static_cast<uint64_t>(p.config.psi_cost) * p.functions[f].pnti_count;
  }

  // Largest first; equal sizes keep declaration order.
  std::vector<FuncId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](FuncId a, FuncId b) { return est[a] > est[b]; });

  GreedyResult result;
  result.assignment.func_page.assign(n, 0);
  result.assignment.page_free.assign(pages, p.config.page_size);
  auto& free = result.assignment.page_free;

  std::vector<bool> placed(n, false);
  // Affinity of each unplaced function to each page: sum of its graph
  // weights to the functions already in that page.
  std::vector<std::vector<Rational>> affinity(pages, std::vector<Rational>(n));

  auto place = [&](FuncId f, uint32_t pg, bool refund_selects) {
    placed[f] = true;
    result.assignment.func_page[f] = pg;
    free[pg] -= est[f];
    if (refund_selects) free[pg] += refund[f];  // assume its selects get saved
    for (FuncId g = 0; g < n; ++g)
      if (!placed[g]) affinity[pg][g] += frg.weight(f, g);
    result.placements.push_back({f, pg});
  };

  // Seed: the largest function goes to page 0, at full pessimistic size.
  const FuncId seed = order[0];
  uint32_t current = 0;
  if (!(free[current] > est[seed]))
    throw CapacityError("not enough memory: function '" + p.functions[seed].name + "' (" +
                        std::to_string(est[seed]) + " words) does not fit a page");
  place(seed, current, false);

  for (uint32_t iter = 1; iter < n; ++iter) {
    // Highest affinity to the current page; ties fall to declaration order.
    FuncId best = n;
    for (FuncId f = 0; f < n; ++f) {
      if (placed[f]) continue;
      if (best == n || affinity[current][f] > affinity[current][best]) best = f;
    }

    if (free[current] > est[best]) {
      place(best, current, true);
      continue;
    }

    // Move to the page with room where this function is most wanted.
    uint32_t target = pages;
    for (uint32_t pg = 0; pg < pages; ++pg) {
      if (!(free[pg] > est[best])) continue;
      if (target == pages || affinity[pg][best] > affinity[target][best]) target = pg;
    }
    if (target == pages)
      throw CapacityError("not enough memory: function '" + p.functions[best].name + "' (" +
                          std::to_string(est[best]) + " words) does not fit any page");
    place(best, target, true);
    current = target;
  }

  return result;
}

PageAssignment exhaustive_partition(const Frg& frg, const Program& p, Objective objective,
                                    const VopTable& vop) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  const uint32_t pages = p.config.page_count;
  if (n > kMaxExhaustiveFuncs || pages > kMaxExhaustivePages)
    throw InstanceTooLargeError("instance too large for exhaustive partitioning (" +
                                std::to_string(n) + " functions, " + std::to_string(pages) +
                                " pages)");

  std::vector<uint64_t> est(n);
  for (FuncId f = 0; f < n; ++f) est[f] = estimated_size(p.functions[f], p.config);

  std::vector<uint32_t> assign(n, 0);
  std::vector<uint32_t> best_assign;
  std::vector<uint64_t> best_used;
  Rational best_residual;
  uint64_t best_psis = 0;
  std::vector<uint64_t> used(pages);

  auto evaluate = [&]() {
    std::fill(used.begin(), used.end(), 0);
    uint64_t psis = 0;
    if (objective == Objective::ResidualWeight) {
      for (FuncId f = 0; f < n; ++f) used[assign[f]] += est[f];
    } else {
      for (FuncId f = 0; f < n; ++f) {
        const Function& fn = p.functions[f];
        uint64_t exact = fn.base_size;
        for (BlockId b = 0; b < fn.blocks.size(); ++b)
          for (uint32_t ii = 0; ii < fn.blocks[b].instrs.size(); ++ii)
            if (is_pnti(fn.blocks[b].instrs[ii]) && psi_needed(p, vop, assign, {f, b, ii})) {
              exact += p.config.psi_cost;
              ++psis;
            }
        used[assign[f]] += exact;
      }
    }
    for (uint32_t pg = 0; pg < pages; ++pg)
      if (used[pg] > p.config.page_size) return;  // capacity-infeasible

    bool better;
    if (objective == Objective::ResidualWeight) {
      Rational res = residual_cost(frg, PageAssignment{assign, {}});
      better = best_assign.empty() || res < best_residual;
      if (better) best_residual = res;
    } else {
      better = best_assign.empty() || psis < best_psis;
      if (better) best_psis = psis;
    }
    if (better) {
      best_assign = assign;
      best_used = used;
    }
  };

  // Lexicographic enumeration: the first minimum found is the
  // lexicographically smallest minimizing assignment vector.
  while (true) {
    evaluate();
    uint32_t i = n;
    while (i-- > 0) {
      if (++assign[i] < pages) break;
      assign[i] = 0;
      if (i == 0) {
        if (best_assign.empty()) throw CapacityError("no feasible assignment exists");
        PageAssignment result{std::move(best_assign),
                              std::vector<uint64_t>(pages, p.config.page_size)};
        for (uint32_t pg = 0; pg < pages; ++pg) result.page_free[pg] -= best_used[pg];
        return result;
      }
    }
  }
}

Rational residual_cost(const Frg& frg, const PageAssignment& a) {
  Rational r;
  for (FuncId g = 0; g < frg.size(); ++g)
    for (FuncId h = g + 1; h < frg.size(); ++h)
      if (a.func_page[g] != a.func_page[h]) r += frg.weight(g, h);
  return r;
}

Rational intra_weight(const Frg& frg, const PageAssignment& a) {
  Rational r;
  for (FuncId g = 0; g < frg.size(); ++g)
    for (FuncId h = g + 1; h < frg.size(); ++h)
      if (a.func_page[g] == a.func_page[h]) r += frg.weight(g, h);
  return r;
}

}  // namespace pagesel
