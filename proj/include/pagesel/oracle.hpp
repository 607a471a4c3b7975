#pragma once

#include <optional>
#include <vector>

#include "pagesel/analysis.hpp"
#include "pagesel/funcset.hpp"
#include "pagesel/ir.hpp"

namespace pagesel {

/// Verification oracle for the dataflow: relation sets computed by brute
/// force, enumerating every path from every function entry and simulating
/// the page-selection relation symbolically. Only defined for programs whose
/// CFGs and call graph are acyclic (and small enough to enumerate).
struct OracleVop {
  std::vector<std::vector<std::vector<FuncSet>>> before;  // [func][block][instr]
  std::vector<std::vector<std::vector<FuncSet>>> after;
};

/// Throws CyclicProgramError on loops or recursion, InstanceTooLargeError
/// when enumeration would blow up. Positions never reached by any path keep
/// the empty set, matching a solved dataflow on unreachable blocks.
OracleVop oracle_vop_paths(const Program& p);

struct VopMismatch {
  Position pos;
  bool before;  // mismatch at the before-set (otherwise the after-set)
};

/// Exact set-equality comparison at every instruction boundary.
std::optional<VopMismatch> first_vop_mismatch(const Program& p, const OracleVop& oracle,
                                              const VopTable& vop);

}  // namespace pagesel
