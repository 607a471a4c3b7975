#include "pagesel/oracle.hpp"

#include <string>

namespace pagesel {

namespace {

constexpr uint32_t kMaxFunctions = 12;
constexpr uint32_t kMaxBlocks = 10;
constexpr uint64_t kMaxVisits = 4'000'000;

class PathEnumerator {
 public:
  explicit PathEnumerator(const Program& p) : p_(p), n_(static_cast<uint32_t>(p.functions.size())) {
    if (n_ > kMaxFunctions)
      throw InstanceTooLargeError("oracle: too many functions (" + std::to_string(n_) + ")");
    for (const Function& f : p.functions)
      if (f.real_block_count() > kMaxBlocks)
        throw InstanceTooLargeError("oracle: function '" + f.name + "' has too many blocks");
    check_acyclic();

    result_.before.resize(n_);
    result_.after.resize(n_);
    for (FuncId f = 0; f < n_; ++f) {
      const Function& fn = p.functions[f];
      result_.before[f].resize(fn.blocks.size());
      result_.after[f].resize(fn.blocks.size());
      for (BlockId b = 0; b < fn.blocks.size(); ++b) {
        result_.before[f][b].assign(fn.blocks[b].instrs.size(), FuncSet(n_));
        result_.after[f][b].assign(fn.blocks[b].instrs.size(), FuncSet(n_));
      }
    }
    exit_rel_.assign(n_, FuncSet(n_));
    exit_done_.assign(n_, false);
  }

  OracleVop run() {
    for (FuncId f = 0; f < n_; ++f) exit_relation(f);
    return std::move(result_);
  }

 private:
  // Exit relation of f: union over all complete entry→exit paths of the
  // relation held when the path reaches the pseudo block. Enumerating also
  // accumulates the per-position sets of f.
  const FuncSet& exit_relation(FuncId f) {
    if (!exit_done_[f]) {
      exit_done_[f] = true;  // call graph is acyclic, so no re-entry
      walk(f, p_.functions[f].entry, FuncSet::single(n_, f));
    }
    return exit_rel_[f];
  }

  void walk(FuncId f, BlockId b, FuncSet rel) {
    if (++visits_ > kMaxVisits) throw InstanceTooLargeError("oracle: too many paths");
    const Function& fn = p_.functions[f];
    if (b == fn.pseudo_exit) {
      exit_rel_[f] |= rel;
      return;
    }
    const BasicBlock& blk = fn.blocks[b];
    for (uint32_t i = 0; i < blk.instrs.size(); ++i) {
      const Instruction& ins = blk.instrs[i];
      result_.before[f][b][i] |= rel;
      switch (ins.op) {
        case Opcode::Goto:
        case Opcode::Cgoto:
          rel = FuncSet::single(n_, f);
          break;
        case Opcode::Call:
          rel = exit_relation(ins.operand);
          break;
        default:
          break;  // page-transparent
      }
      result_.after[f][b][i] |= rel;
    }
    for (BlockId s : blk.succs) walk(f, s, rel);
  }

  void check_acyclic() {
    // Per-function CFG cycles.
    for (const Function& fn : p_.functions) {
      enum class Mark { White, Grey, Black };
      std::vector<Mark> mark(fn.blocks.size(), Mark::White);
      auto dfs = [&](auto&& self, BlockId b) -> void {
        mark[b] = Mark::Grey;
        for (BlockId s : fn.blocks[b].succs) {
          if (mark[s] == Mark::Grey)
            throw CyclicProgramError("oracle: cyclic CFG in function '" + fn.name + "'");
          if (mark[s] == Mark::White) self(self, s);
        }
        mark[b] = Mark::Black;
      };
      for (BlockId b = 0; b < fn.blocks.size(); ++b)
        if (mark[b] == Mark::White) dfs(dfs, b);
    }
    // Call graph cycles.
    enum class Mark { White, Grey, Black };
    std::vector<Mark> mark(n_, Mark::White);
    auto dfs = [&](auto&& self, FuncId f) -> void {
      mark[f] = Mark::Grey;
      for (const BasicBlock& b : p_.functions[f].blocks)
        for (const Instruction& i : b.instrs) {
          if (i.op != Opcode::Call) continue;
          if (mark[i.operand] == Mark::Grey)
            throw CyclicProgramError("oracle: recursive call involving '" +
                                     p_.functions[i.operand].name + "'");
          if (mark[i.operand] == Mark::White) self(self, i.operand);
        }
      mark[f] = Mark::Black;
    };
    for (FuncId f = 0; f < n_; ++f)
      if (mark[f] == Mark::White) dfs(dfs, f);
  }

  const Program& p_;
  uint32_t n_;
  uint64_t visits_ = 0;
  OracleVop result_;
  std::vector<FuncSet> exit_rel_;
  std::vector<bool> exit_done_;
};

}  // namespace

OracleVop oracle_vop_paths(const Program& p) { return PathEnumerator(p).run(); }

std::optional<VopMismatch> first_vop_mismatch(const Program& p, const OracleVop& oracle,
                                              const VopTable& vop) {
  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const Function& fn = p.functions[f];
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      for (uint32_t i = 0; i < fn.blocks[b].instrs.size(); ++i) {
        Position pos{f, b, i};
        if (oracle.before[f][b][i] != vop.before(pos)) return VopMismatch{pos, true};
        if (oracle.after[f][b][i] != vop.after(pos)) return VopMismatch{pos, false};
      }
    }
  }
  return std::nullopt;
}

}  // namespace pagesel
