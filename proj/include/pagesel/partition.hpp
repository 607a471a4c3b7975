#pragma once

#include <cstdint>
#include <vector>

#include "pagesel/analysis.hpp"
#include "pagesel/frg.hpp"
#include "pagesel/ir.hpp"

namespace pagesel {

/// Total function → page map plus the per-page residual word budget as
/// tracked by the partitioner's size accounting.
struct PageAssignment {
  std::vector<uint32_t> func_page;
  std::vector<uint64_t> page_free;
};

/// Pessimistic size of a function before placement: every one of its
/// page-nontransparent instructions might need a page-select prefix.
inline uint64_t estimated_size(const Function& f, const Config& cfg) {
  return f.base_size + static_cast<uint64_t>(cfg.psi_cost) * f.pnti_count;
}

struct PartitionOptions {
  // Skip the optimistic "all selects saved" refund when deducting a placed
  // function from its page, guaranteeing post-insertion sizes always fit.
  bool conservative_size = false;
};

struct GreedyStep {
  FuncId func;
  uint32_t page;
};

struct GreedyResult {
  PageAssignment assignment;
  std::vector<GreedyStep> placements;  // in placement order
};

/// Weight-driven first-fit-decreasing heuristic: seed the emptiest
/// interesting page with the largest function, then repeatedly pull the
/// unplaced function with the highest accumulated affinity to the current
/// page; when it does not fit, move to the affinity-best page with room.
/// Throws CapacityError when some function fits nowhere.
GreedyResult greedy_partition(const Frg& frg, const Program& p, const PartitionOptions& opts = {});

enum class Objective {
  ResidualWeight,  // minimize cross-page weight, pessimistic capacity check
  PsiCount,        // minimize inserted selects, exact post-insertion capacity check
};

/// Small-instance oracle: enumerates all page^NOF assignments in
/// lexicographic order and returns the first global minimizer. Bounded to
/// 10 functions and 3 pages; throws InstanceTooLargeError beyond that and
/// CapacityError when nothing is feasible.
PageAssignment exhaustive_partition(const Frg& frg, const Program& p, Objective objective,
                                    const VopTable& vop);

/// Sum of weights across page boundaries — the cost an assignment fails to
/// recover.
Rational residual_cost(const Frg& frg, const PageAssignment& a);

/// Sum of weights inside pages; residual + intra = total, exactly.
Rational intra_weight(const Frg& frg, const PageAssignment& a);

}  // namespace pagesel
