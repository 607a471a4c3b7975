#include "pagesel/vm.hpp"

#include <string>

namespace pagesel {

Image layout(const OptimizedProgram& o) {
  const Program& p = o.program;
  Image img;
  img.config = p.config;
  img.slots.assign(p.config.page_count * p.config.page_size, {});
  img.func_base.assign(p.functions.size(), 0);
  img.block_addr.resize(p.functions.size());

  std::vector<uint64_t> cursor(p.config.page_count);
  for (uint32_t pg = 0; pg < p.config.page_count; ++pg)
    cursor[pg] = static_cast<uint64_t>(pg) * p.config.page_size;

  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const Function& fn = p.functions[f];
    const uint32_t pg = o.assignment.func_page[f];
    uint64_t addr = cursor[pg];
    img.func_base[f] = addr;
    img.block_addr[f].assign(fn.blocks.size(), 0);
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      const BasicBlock& blk = fn.blocks[b];
      if (blk.is_pseudo) continue;
      img.block_addr[f][b] = addr;
      for (const Instruction& ins : blk.instrs) {
        switch (ins.op) {
          case Opcode::Pti:
            for (uint32_t w = 0; w < ins.operand; ++w)
              img.slots[addr + w] = {Opcode::Pti, ins.operand - w, f, b, true};
            addr += ins.operand;
            break;
          case Opcode::Psi:
            img.slots[addr] = {Opcode::Psi, ins.operand, f, b, true};
            addr += p.config.psi_cost;  // trailing words of a wide select stay dark
            break;
          default:
            img.slots[addr] = {ins.op, ins.operand, f, b, true};
            addr += 1;
            break;
        }
      }
    }
    if (addr > (static_cast<uint64_t>(pg) + 1) * p.config.page_size)
      throw CapacityError("layout: function '" + fn.name + "' runs over the end of page " +
                          std::to_string(pg));
    cursor[pg] = addr;
  }
  return img;
}

RunResult run(const Image& img, DecisionSource& decisions, uint64_t max_steps) {
  RunResult r;
  const FuncId entry = 0;
  uint64_t pc = img.func_base[entry];
  uint32_t psr = img.page_of(pc);
  std::vector<uint64_t> stack;

  while (r.trace.steps < max_steps) {
    const Image::Slot& slot = img.slots[pc];
    if (!slot.valid) throw Error("vm: execution reached an unmapped word");

    switch (slot.op) {
      case Opcode::Pti: {
        uint64_t take = slot.operand;
        if (take > max_steps - r.trace.steps) {
          take = max_steps - r.trace.steps;  // budget expires inside the run
          r.trace.steps += take;
          pc += take;
          return r;
        }
        r.trace.steps += take;
        pc += take;
        break;
      }
      case Opcode::Psi:
        psr = slot.operand;
        pc += img.config.psi_cost;
        break;
      case Opcode::Goto: {
        r.trace.steps += 1;
        const uint64_t target = img.block_addr[slot.func][slot.operand];
        const uint32_t expected = img.page_of(target);
        if (psr != expected) {
          r.fault = PageFault{pc, slot.func, slot.block, psr, expected};
          return r;
        }
        pc = target;
        r.trace.events.push_back({TraceEvent::Kind::Goto, slot.func, slot.operand});
        break;
      }
      case Opcode::Cgoto: {
        r.trace.steps += 1;
        const bool taken = decisions.next().value_or(false);
        if (!taken) {
          pc += 1;
          break;
        }
        const uint64_t target = img.block_addr[slot.func][slot.operand];
        const uint32_t expected = img.page_of(target);
        if (psr != expected) {
          r.fault = PageFault{pc, slot.func, slot.block, psr, expected};
          return r;
        }
        pc = target;
        r.trace.events.push_back({TraceEvent::Kind::Goto, slot.func, slot.operand});
        break;
      }
      case Opcode::Call: {
        r.trace.steps += 1;
        const FuncId callee = slot.operand;
        const uint64_t target = img.func_base[callee];
        const uint32_t expected = img.page_of(target);
        if (psr != expected) {
          r.fault = PageFault{pc, slot.func, slot.block, psr, expected};
          return r;
        }
        stack.push_back(pc + 1);  // full return address; returns need no check
        pc = target;
        r.trace.events.push_back({TraceEvent::Kind::Call, callee, 0});
        break;
      }
      case Opcode::Ret: {
        r.trace.steps += 1;
        r.trace.events.push_back({TraceEvent::Kind::Ret, slot.func, 0});
        if (stack.empty()) {
          r.trace.halted = true;  // returned from the entry function
          return r;
        }
        pc = stack.back();
        stack.pop_back();
        break;
      }
    }
  }
  return r;
}

}  // namespace pagesel
