#include "pagesel/frg.hpp"

namespace pagesel {

Frg build_frg(const Program& p, const VopTable& vop) {
  const uint32_t n = static_cast<uint32_t>(p.functions.size());
  Frg frg(n);
  for (FuncId f = 0; f < n; ++f) {
    const Function& fn = p.functions[f];
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      const BasicBlock& blk = fn.blocks[b];
      for (uint32_t ii = 0; ii < blk.instrs.size(); ++ii) {
        const Instruction& ins = blk.instrs[ii];
        if (!is_pnti(ins)) continue;
        const FuncId target = ins.op == Opcode::Call ? ins.operand : f;
        const FuncSet& v = vop.before({f, b, ii});
        if (v == FuncSet::single(n, target)) continue;  // register already right
        FuncSet u = v;
        u.insert(target);
        std::vector<uint32_t> members = u.members();
        if (members.size() < 2) continue;  // no pair to relate (e.g. unreachable site)
        const Rational share = p.config.prevalue / Rational(v.count());
        for (size_t a = 0; a < members.size(); ++a)
          for (size_t c = a + 1; c < members.size(); ++c)
            frg.add_weight(members[a], members[c], share);
      }
    }
  }
  return frg;
}

}  // namespace pagesel
