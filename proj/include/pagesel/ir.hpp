#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pagesel/errors.hpp"
#include "pagesel/rational.hpp"

namespace pagesel {

using FuncId = uint32_t;
using BlockId = uint32_t;

/// Target geometry and cost model.
struct Config {
  uint32_t page_count = 0;
  uint64_t page_size = 0;  // words per page
  uint32_t psi_cost = 1;   // words per inserted page-select instruction
  Rational prevalue;       // weight credited per avoidable PSI site; defaults to psi_cost
};

enum class Opcode : uint8_t { Pti, Call, Goto, Cgoto, Ret, Psi };

/// One instruction record. `pti k` aggregates k page-transparent words;
/// everything the algorithms care about is word counts and the positions of
/// the page-nontransparent instructions (call, goto, cgoto).
struct Instruction {
  Opcode op;
  uint32_t operand = 0;  // Pti: word count; Call: callee id; Goto/Cgoto: target block; Psi: page

  bool operator==(const Instruction&) const = default;
};

inline bool is_pnti(const Instruction& i) {
  return i.op == Opcode::Call || i.op == Opcode::Goto || i.op == Opcode::Cgoto;
}

inline bool is_terminator(Opcode op) {
  return op == Opcode::Goto || op == Opcode::Cgoto || op == Opcode::Ret;
}

inline uint64_t instr_words(const Instruction& i, uint32_t psi_cost) {
  switch (i.op) {
    case Opcode::Pti:
      return i.operand;
    case Opcode::Psi:
      return psi_cost;
    default:
      return 1;
  }
}

struct BasicBlock {
  std::string name;
  std::vector<Instruction> instrs;
  std::vector<BlockId> succs;  // cgoto: [target, fallthrough]; ret: [pseudo exit]
  std::vector<BlockId> preds;
  bool is_pseudo = false;
  uint32_t line = 0;  // source line of the label, 0 for the pseudo block

  uint64_t words(uint32_t psi_cost) const {
    uint64_t w = 0;
    for (const auto& i : instrs) w += instr_words(i, psi_cost);
    return w;
  }

  /// Index of the last page-nontransparent instruction, if any.
  std::optional<uint32_t> last_pnti() const {
    for (uint32_t i = static_cast<uint32_t>(instrs.size()); i-- > 0;)
      if (is_pnti(instrs[i])) return i;
    return std::nullopt;
  }
};

struct Function {
  std::string name;
  std::vector<BasicBlock> blocks;  // real blocks in source order, pseudo exit last
  BlockId entry = 0;
  BlockId pseudo_exit = 0;
  uint64_t base_size = 0;   // words before select insertion (psi never counts)
  uint32_t pnti_count = 0;  // number of call/goto/cgoto records

  uint32_t real_block_count() const { return static_cast<uint32_t>(blocks.size()) - 1; }
};

struct Program {
  Config config;
  std::vector<Function> functions;  // entry function is functions[0]

  std::optional<FuncId> find_function(std::string_view name) const {
    for (FuncId f = 0; f < functions.size(); ++f)
      if (functions[f].name == name) return f;
    return std::nullopt;
  }
};

/// A point in the instruction stream: instruction `instr` of block `block`
/// of function `func`, in source order.
struct Position {
  FuncId func;
  BlockId block;
  uint32_t instr;

  auto operator<=>(const Position&) const = default;
};

struct ParseOptions {
  bool allow_psi = false;  // accept `psi <k>` lines (tool output being re-read)
};

Program parse_program(std::string_view text, const ParseOptions& opts = {});

/// Canonical text form. parse(serialize(p)) reproduces the same model.
std::string serialize(const Program& p);

/// Populates successor/predecessor edges and appends the pseudo exit block,
/// which becomes the common successor of every ret block. Called by the
/// parser; exposed for tests building functions by hand.
void build_cfg(Function& f);

/// Structural equality of the parsed model (names, instructions, edges,
/// sizes); diagnostic line numbers are ignored.
bool model_equal(const Program& a, const Program& b);

}  // namespace pagesel
