#include "pagesel/analysis.hpp"

#include <algorithm>

namespace pagesel {

namespace {

/// Tarjan over the call graph. Components come out callees-first, which is
/// exactly the order the interprocedural solve wants.
class CallGraphSccs {
 public:
  explicit CallGraphSccs(const Program& p) : p_(p) {
    const uint32_t n = static_cast<uint32_t>(p.functions.size());
    index_.assign(n, kUnvisited);
    low_.assign(n, 0);
    on_stack_.assign(n, false);
    scc_id_.assign(n, 0);
    callees_.resize(n);
    for (FuncId f = 0; f < n; ++f) {
      for (const BasicBlock& b : p.functions[f].blocks)
        for (const Instruction& i : b.instrs)
          if (i.op == Opcode::Call) callees_[f].push_back(i.operand);
      std::sort(callees_[f].begin(), callees_[f].end());
      callees_[f].erase(std::unique(callees_[f].begin(), callees_[f].end()), callees_[f].end());
    }
    for (FuncId f = 0; f < n; ++f)
      if (index_[f] == kUnvisited) strongconnect(f);
  }

  const std::vector<uint32_t>& scc_id() const { return scc_id_; }
  const std::vector<std::vector<FuncId>>& components() const { return components_; }

 private:
  static constexpr uint32_t kUnvisited = ~uint32_t{0};

  void strongconnect(FuncId v) {
    index_[v] = low_[v] = next_index_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (FuncId w : callees_[v]) {
      if (index_[w] == kUnvisited) {
        strongconnect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      std::vector<FuncId> comp;
      FuncId w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        scc_id_[w] = static_cast<uint32_t>(components_.size());
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      components_.push_back(std::move(comp));
    }
  }

  const Program& p_;
  std::vector<std::vector<FuncId>> callees_;
  std::vector<uint32_t> index_, low_, scc_id_;
  std::vector<bool> on_stack_;
  std::vector<FuncId> stack_;
  uint32_t next_index_ = 0;
  std::vector<std::vector<FuncId>> components_;
};

FuncSet ret_vop_impl(const Program& p, const std::vector<std::vector<FuncSet>>& out,
                     const std::vector<uint32_t>& scc_id, FuncId current,
                     const Instruction& i) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  switch (i.op) {
    case Opcode::Goto:
    case Opcode::Cgoto:
      return FuncSet::single(n, current);
    case Opcode::Call: {
      const FuncId callee = i.operand;
      FuncSet r = out[callee][p.functions[callee].pseudo_exit];
      if (scc_id[callee] == scc_id[current]) r.insert(callee);
      return r;
    }
    default:
      throw Error("ret_vop called on a page-transparent instruction");
  }
}

}  // namespace

DataflowResult solve(const Program& p, const SolveOptions& opts) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  CallGraphSccs sccs(p);

  DataflowResult r;
  r.scc_id = sccs.scc_id();
  r.gen.resize(n);
  r.kill.resize(n);
  r.in.resize(n);
  r.out.resize(n);
  for (FuncId f = 0; f < n; ++f) {
    const size_t nb = p.functions[f].blocks.size();
    r.gen[f].assign(nb, FuncSet(n));
    r.kill[f].assign(nb, FuncSet(n));
    r.in[f].assign(nb, FuncSet(n));
    r.out[f].assign(nb, FuncSet(n));
  }

  const FuncSet all = FuncSet::all(n);

  auto run_pass = [&](const std::vector<FuncId>& funcs) {
    bool changed = false;
    for (FuncId f : funcs) {
      const Function& fn = p.functions[f];
      for (BlockId b = 0; b < fn.blocks.size(); ++b) {
        const BasicBlock& blk = fn.blocks[b];

        FuncSet in(n);
        if (b == fn.entry) in.insert(f);
        for (BlockId pred : blk.preds) in |= r.out[f][pred];

        FuncSet gen(n);
        FuncSet kill(n);
        if (auto pnti = blk.last_pnti()) {
          gen = ret_vop_impl(p, r.out, r.scc_id, f, blk.instrs[*pnti]);
          kill = all - gen;
        }

        FuncSet out = gen | (in - kill);

        if (in != r.in[f][b] || out != r.out[f][b] || gen != r.gen[f][b]) changed = true;
        r.in[f][b] = std::move(in);
        r.out[f][b] = std::move(out);
        r.gen[f][b] = std::move(gen);
        r.kill[f][b] = std::move(kill);
      }
    }
    return changed;
  };

  auto snapshot = [&] {
    if (opts.record_history) r.history.push_back({r.in, r.out});
  };

  for (const std::vector<FuncId>& comp : sccs.components()) {
    bool changed;
    do {
      changed = run_pass(comp);
      ++r.iterations;
      snapshot();
    } while (changed);
  }

  return r;
}

FuncSet ret_vop(const Program& p, const DataflowResult& d, FuncId current, const Instruction& i) {
  return ret_vop_impl(p, d.out, d.scc_id, current, i);
}

std::pair<FuncSet, FuncSet> gen_kill(const Program& p, const DataflowResult& d, FuncId current,
                                     const BasicBlock& b) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  if (auto pnti = b.last_pnti()) {
    FuncSet gen = ret_vop(p, d, current, b.instrs[*pnti]);
    return {gen, FuncSet::all(n) - gen};
  }
  return {FuncSet(n), FuncSet(n)};
}

VopTable::VopTable(const Program& p, const DataflowResult& d) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  entry_.resize(n);
  after_.resize(n);
  for (FuncId f = 0; f < n; ++f) {
    const Function& fn = p.functions[f];
    entry_[f].reserve(fn.blocks.size());
    after_[f].resize(fn.blocks.size());
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      const BasicBlock& blk = fn.blocks[b];
      entry_[f].push_back(d.in[f][b]);
      FuncSet cur = d.in[f][b];
      after_[f][b].reserve(blk.instrs.size());
      for (const Instruction& i : blk.instrs) {
        if (is_pnti(i)) cur = ret_vop(p, d, f, i);
        after_[f][b].push_back(cur);
      }
    }
  }
}

}  // namespace pagesel
