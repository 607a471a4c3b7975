#include "pagesel/psi.hpp"

#include <string>

namespace pagesel {

namespace {

/// Rebuilds the program with a select inserted before every site the
/// predicate accepts. Block ids are stable (no blocks are added), so CFG
/// operands survive the copy; edges are rebuilt for the widened blocks.
template <typename NeedPsi>
OptimizedProgram insert_selected(const Program& p, PageAssignment assignment, NeedPsi&& need) {
  OptimizedProgram o;
  o.program.config = p.config;
  o.exact_sizes.reserve(p.functions.size());

  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const Function& src = p.functions[f];
    Function fn;
    fn.name = src.name;
    fn.base_size = src.base_size;
    fn.pnti_count = src.pnti_count;
    uint32_t selects = 0;  // includes any selects already present in the input
    for (BlockId b = 0; b < src.blocks.size(); ++b) {
      const BasicBlock& sb = src.blocks[b];
      if (sb.is_pseudo) continue;
      BasicBlock blk;
      blk.name = sb.name;
      blk.line = sb.line;
      for (uint32_t ii = 0; ii < sb.instrs.size(); ++ii) {
        const Instruction& ins = sb.instrs[ii];
        if (is_pnti(ins)) {
          Position pos{f, b, ii};
          uint32_t page = required_page(ins, f, assignment);
          if (need(pos, ins, page)) {
            blk.instrs.push_back({Opcode::Psi, page});
            o.sites.push_back({pos, page});
            ++selects;
          }
        } else if (ins.op == Opcode::Psi) {
          ++selects;
        }
        blk.instrs.push_back(ins);
      }
      fn.blocks.push_back(std::move(blk));
    }
    build_cfg(fn);
    o.exact_sizes.push_back(src.base_size +
                            static_cast<uint64_t>(p.config.psi_cost) * selects);
    o.program.functions.push_back(std::move(fn));
  }

  // Condition on every page: what it holds may never exceed its size.
  std::vector<uint64_t> used(p.config.page_count, 0);
  for (FuncId f = 0; f < p.functions.size(); ++f)
    used[assignment.func_page[f]] += o.exact_sizes[f];
  for (uint32_t pg = 0; pg < p.config.page_count; ++pg)
    if (used[pg] > p.config.page_size)
      throw CapacityError("page " + std::to_string(pg) + " overflows after select insertion (" +
                          std::to_string(used[pg]) + " > " + std::to_string(p.config.page_size) +
                          " words); retry with --conservative-size");

  o.assignment = std::move(assignment);
  return o;
}

}  // namespace

bool psi_needed(const Program& p, const VopTable& vop, const std::vector<uint32_t>& func_page,
                const Position& pos) {
  const Instruction& ins = p.functions[pos.func].blocks[pos.block].instrs[pos.instr];
  const uint32_t required =
      ins.op == Opcode::Call ? func_page[ins.operand] : func_page[pos.func];
  const FuncSet& v = vop.before(pos);
  if (v.empty()) return true;  // unreachable site: keep the select
  for (uint32_t g = 0; g < v.universe(); ++g)
    if (v.contains(g) && func_page[g] != required) return true;
  return false;
}

OptimizedProgram insert_psi(const Program& p, const PageAssignment& a, const VopTable& vop) {
  return insert_selected(p, a, [&](const Position& pos, const Instruction&, uint32_t) {
    return psi_needed(p, vop, a.func_page, pos);
  });
}

OptimizedProgram naive_placement(const Program& p) {
  PageAssignment a;
  a.func_page.resize(p.functions.size());
  a.page_free.assign(p.config.page_count, p.config.page_size);
  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const uint64_t size = estimated_size(p.functions[f], p.config);
    bool placed = false;
    for (uint32_t pg = 0; pg < p.config.page_count && !placed; ++pg) {
      if (a.page_free[pg] >= size) {
        a.func_page[f] = pg;
        a.page_free[pg] -= size;
        placed = true;
      }
    }
    if (!placed)
      throw CapacityError("naive placement: no page holds function '" + p.functions[f].name +
                          "' (" + std::to_string(size) + " words)");
  }
  return insert_selected(p, a, [](const Position&, const Instruction&, uint32_t) { return true; });
}

SizeReport code_size(const OptimizedProgram& o) {
  SizeReport r;
  r.total_words = o.total_size();
  r.psi_count = o.psi_count();
  r.nof = static_cast<uint32_t>(o.program.functions.size());
  r.page_used.assign(o.program.config.page_count, 0);
  for (FuncId f = 0; f < o.program.functions.size(); ++f)
    r.page_used[o.assignment.func_page[f]] += o.exact_sizes[f];
  return r;
}

}  // namespace pagesel
