#include "pagesel/generate.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "pagesel/partition.hpp"
#include "pagesel/rng.hpp"

namespace pagesel {

namespace {

void validate(const GenSpec& s) {
  auto bad = [](const std::string& what) { throw InfeasibleSpecError("gen: " + what); };
  if (s.funcs.lo < 1 || s.funcs.lo > s.funcs.hi) bad("empty function-count range");
  if (s.blocks.lo < 1 || s.blocks.lo > s.blocks.hi) bad("empty block-count range");
  if (s.pti.lo < 1 || s.pti.lo > s.pti.hi) bad("empty pti range");
  if (s.call_density < 0 || s.call_density > 1) bad("call density outside [0,1]");
  if (s.goto_density < 0 || s.goto_density > 1) bad("goto density outside [0,1]");
  if (s.cluster < 0 || s.cluster > 1) bad("cluster factor outside [0,1]");
  if (s.page_count < 1) bad("page count must be positive");
  if (s.psi_cost < 1) bad("psi cost must be positive");
  if (s.fill <= 0 || s.fill > 1) bad("fill factor outside (0,1]");
}

}  // namespace

std::string generate(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  const uint32_t nof = rng.range(spec.funcs.lo, spec.funcs.hi);
  const uint32_t clusters = std::max<uint32_t>(1, std::min(spec.page_count, nof));

  Program p;
  p.config.page_count = spec.page_count;
  p.config.psi_cost = spec.psi_cost;
  p.config.prevalue = spec.prevalue.empty() ? Rational(spec.psi_cost)
                                            : Rational::from_decimal(spec.prevalue);

  struct PtiRef {
    FuncId func;
    BlockId block;
    uint32_t instr;
  };
  std::vector<PtiRef> pti_refs;

  for (FuncId f = 0; f < nof; ++f) {
    Function fn;
    fn.name = "f" + std::to_string(f);
    const uint32_t nb = rng.range(spec.blocks.lo, spec.blocks.hi);

    auto pick_callee = [&]() -> std::optional<FuncId> {
      const FuncId first = spec.acyclic ? f + 1 : 0;
      if (first >= nof) return std::nullopt;
      // With factor 1.0 calls never leave the cluster; an empty pool means
      // no call rather than a cross-cluster one.
      if (rng.chance(spec.cluster)) {
        std::vector<FuncId> same;
        for (FuncId g = first; g < nof; ++g)
          if (g % clusters == f % clusters && g != f) same.push_back(g);
        if (same.empty()) return std::nullopt;
        return same[rng.below(static_cast<uint32_t>(same.size()))];
      }
      return first + rng.below(nof - first);
    };

    for (BlockId b = 0; b < nb; ++b) {
      BasicBlock blk;
      blk.name = "b" + std::to_string(b);
      auto emit_pti = [&]() {
        pti_refs.push_back({f, b, static_cast<uint32_t>(blk.instrs.size())});
        blk.instrs.push_back({Opcode::Pti, rng.range(spec.pti.lo, spec.pti.hi)});
      };
      emit_pti();
      uint32_t calls = 0;
      while (calls < 3 && rng.chance(spec.call_density)) {
        auto callee = pick_callee();
        if (!callee) break;
        blk.instrs.push_back({Opcode::Call, *callee});
        ++calls;
        if (rng.chance(0.5)) emit_pti();
      }
      const bool last = b + 1 == nb;
      if (last) {
        blk.instrs.push_back({Opcode::Ret, 0});
      } else if (rng.chance(spec.goto_density)) {
        if (rng.chance(0.5)) {
          // Conditional branch; the fallthrough keeps the chain reachable.
          const BlockId target =
              spec.acyclic ? b + 1 + rng.below(nb - b - 1) : rng.below(nb);
          blk.instrs.push_back({Opcode::Cgoto, target});
        } else {
          blk.instrs.push_back({Opcode::Goto, b + 1});
        }
      }
      fn.blocks.push_back(std::move(blk));
    }

    for (const BasicBlock& b : fn.blocks) {
      fn.base_size += b.words(p.config.psi_cost);
      for (const Instruction& i : b.instrs)
        if (is_pnti(i)) ++fn.pnti_count;
    }
    build_cfg(fn);
    p.functions.push_back(std::move(fn));
  }

  if (spec.target_size > 0) {
    // Shrink every transparent chunk to one word, then spread the remaining
    // budget evenly across the chunks.
    uint64_t total = 0;
    for (Function& fn : p.functions) {
      for (BasicBlock& b : fn.blocks)
        for (Instruction& i : b.instrs)
          if (i.op == Opcode::Pti) i.operand = 1;
      fn.base_size = 0;
      for (const BasicBlock& b : fn.blocks) fn.base_size += b.words(p.config.psi_cost);
      total += fn.base_size;
    }
    if (spec.target_size < total)
      throw InfeasibleSpecError("gen: target_size smaller than the minimal program (" +
                                std::to_string(total) + " words)");
    uint64_t extra = spec.target_size - total;
    const uint64_t n = pti_refs.size();
    for (uint64_t i = 0; i < n; ++i) {
      uint64_t add = extra / n + (i < extra % n ? 1 : 0);
      const PtiRef& ref = pti_refs[i];
      Instruction& ins = p.functions[ref.func].blocks[ref.block].instrs[ref.instr];
      ins.operand += static_cast<uint32_t>(add);
      p.functions[ref.func].base_size += add;
    }
  }

  uint64_t total_naive = 0;
  uint64_t max_naive = 0;
  for (const Function& fn : p.functions) {
    const uint64_t sz = estimated_size(fn, p.config);
    total_naive += sz;
    max_naive = std::max(max_naive, sz);
  }

  if (spec.page_size > 0) {
    p.config.page_size = spec.page_size;
    if (max_naive > spec.page_size)
      throw InfeasibleSpecError("gen: a function exceeds the requested page size");
    if (total_naive > spec.page_size * spec.page_count)
      throw InfeasibleSpecError("gen: program exceeds the requested capacity");
  } else {
    const uint64_t by_fill = static_cast<uint64_t>(
        static_cast<double>(total_naive) / (spec.fill * spec.page_count)) + 1;
    p.config.page_size = std::max(by_fill, max_naive + 8);
  }

  return serialize(p);
}

std::vector<GenSpec> canonical_corpus(uint32_t count, uint64_t master_seed) {
  std::vector<GenSpec> specs;
  specs.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    GenSpec s;
    s.seed = mix_seed(master_seed, i);
    s.funcs = {4, 16};
    s.blocks = {1, 6};
    s.page_count = 2 + static_cast<uint32_t>((s.seed >> 32) % 3);
    s.cluster = 0.7;
    specs.push_back(s);
  }
  return specs;
}

}  // namespace pagesel
