#pragma once

#include <utility>
#include <vector>

#include "pagesel/funcset.hpp"
#include "pagesel/ir.hpp"

namespace pagesel {

struct SolveOptions {
  bool record_history = false;  // keep per-pass in/out snapshots (for monotonicity checks)
};

struct DataflowSnapshot {
  std::vector<std::vector<FuncSet>> in;
  std::vector<std::vector<FuncSet>> out;
};

/// Converged per-block function sets, indexed [function][block] with the
/// pseudo exit block included. Out of a function's pseudo exit summarizes the
/// page-selection relation the function leaves behind for its callers.
struct DataflowResult {
  std::vector<std::vector<FuncSet>> gen;
  std::vector<std::vector<FuncSet>> kill;
  std::vector<std::vector<FuncSet>> in;
  std::vector<std::vector<FuncSet>> out;
  std::vector<uint32_t> scc_id;  // call-graph strongly connected component per function
  uint32_t iterations = 0;       // fixpoint passes, summed over components
  std::vector<DataflowSnapshot> history;

  const FuncSet& summary(const Program& p, FuncId f) const {
    return out[f][p.functions[f].pseudo_exit];
  }
};

/// Interprocedural fixpoint:
///   in(entry of f) = {f} ∪ ⋃ preds' out      (a caller must have set f's page)
///   in(b)          = ⋃ preds' out
///   out(b)         = gen(b) ∪ (in(b) − kill(b))
/// with gen/kill refreshed as callee exit summaries grow. Call-graph
/// components are solved callees-first; calls that stay inside a recursive
/// component seed the callee id into the summary so cycles converge to the
/// union of their members instead of the degenerate empty solution.
DataflowResult solve(const Program& p, const SolveOptions& opts = {});

/// Relation the page-selection register carries immediately after a
/// page-nontransparent instruction: branches pin it to the current function,
/// calls take the callee's exit summary (seeded with the callee itself when
/// caller and callee share a recursive component).
FuncSet ret_vop(const Program& p, const DataflowResult& d, FuncId current, const Instruction& i);

/// Per-block transfer: a block with page-nontransparent instructions
/// generates the relation of its last one and kills everything else; a
/// transparent block generates and kills nothing.
std::pair<FuncSet, FuncSet> gen_kill(const Program& p, const DataflowResult& d, FuncId current,
                                     const BasicBlock& b);

/// Relation sets at every instruction boundary, derived from a solved
/// dataflow by one linear walk per block: block entry starts at In(b),
/// transparent instructions keep the set, nontransparent ones reset it.
class VopTable {
 public:
  VopTable() = default;
  VopTable(const Program& p, const DataflowResult& d);

  const FuncSet& before(const Position& pos) const {
    return pos.instr == 0 ? entry_[pos.func][pos.block]
                          : after_[pos.func][pos.block][pos.instr - 1];
  }
  const FuncSet& after(const Position& pos) const {
    return after_[pos.func][pos.block][pos.instr];
  }

 private:
  std::vector<std::vector<FuncSet>> entry_;               // In(b) per block
  std::vector<std::vector<std::vector<FuncSet>>> after_;  // per instruction
};

}  // namespace pagesel
