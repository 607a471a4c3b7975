#pragma once

#include <cstdint>
#include <vector>

#include "pagesel/analysis.hpp"
#include "pagesel/ir.hpp"
#include "pagesel/partition.hpp"

namespace pagesel {

struct PsiSite {
  Position pnti;  // position of the nontransparent instruction in the source program
  uint32_t page;  // page the inserted select loads

  bool operator==(const PsiSite&) const = default;
};

/// A program with page-select instructions inserted plus the assignment it
/// was built for. Sizes are exact: base size plus psi_cost per select in the
/// function (selects already present in the input count too).
struct OptimizedProgram {
  Program program;
  PageAssignment assignment;
  std::vector<PsiSite> sites;
  std::vector<uint64_t> exact_sizes;  // per function

  uint64_t total_size() const {
    uint64_t t = 0;
    for (uint64_t s : exact_sizes) t += s;
    return t;
  }
  uint32_t psi_count() const { return static_cast<uint32_t>(sites.size()); }
};

/// Page a nontransparent instruction needs selected: branches stay in the
/// current function's page, calls need the callee's.
inline uint32_t required_page(const Instruction& i, FuncId current, const PageAssignment& a) {
  return i.op == Opcode::Call ? a.func_page[i.operand] : a.func_page[current];
}

/// Whether the site at `pos` needs a select under `func_page`: yes unless
/// every function the incoming relation may refer to lives in the required
/// page (an empty relation — unreachable code — is handled conservatively).
bool psi_needed(const Program& p, const VopTable& vop, const std::vector<uint32_t>& func_page,
                const Position& pos);

/// Inserts the minimum selects the analysis admits: one before each
/// nontransparent instruction whose known page set differs from the required
/// page. Validates per-page occupancy against exact sizes; throws
/// CapacityError on overflow.
OptimizedProgram insert_psi(const Program& p, const PageAssignment& a, const VopTable& vop);

/// Baseline: first-fit placement in declaration order using exact naive
/// sizes, and a select before every nontransparent instruction.
OptimizedProgram naive_placement(const Program& p);

struct SizeReport {
  uint64_t total_words;
  uint32_t psi_count;
  uint32_t nof;
  std::vector<uint64_t> page_used;
};

SizeReport code_size(const OptimizedProgram& o);

}  // namespace pagesel
