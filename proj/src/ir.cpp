#include "pagesel/ir.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pagesel {

namespace {

struct Token {
  std::string text;
  uint32_t col;  // 1-based
};

struct Line {
  uint32_t number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  uint32_t lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    ++lineno;
    size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{lineno, {}};
    size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start)
        line.tokens.push_back({std::string(raw.substr(start, i - start)),
                               static_cast<uint32_t>(start + 1)});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return lines;
}

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

uint64_t parse_uint(const Line& line, const Token& tok, uint64_t min_value) {
  uint64_t v = 0;
  if (tok.text.empty()) throw ParseError(line.number, tok.col, "expected integer");
  for (char c : tok.text) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError(line.number, tok.col, "expected integer, got '" + tok.text + "'");
    if (v > (~uint64_t{0} - (c - '0')) / 10)
      throw ParseError(line.number, tok.col, "integer out of range");
    v = v * 10 + (c - '0');
  }
  if (v < min_value)
    throw ParseError(line.number, tok.col,
                     "value must be at least " + std::to_string(min_value));
  return v;
}

struct RawInstr {
  std::string opcode;
  std::string operand;  // empty for ret
  uint32_t line;
  uint32_t col;
};

struct RawBlock {
  std::string name;
  uint32_t line;
  std::vector<RawInstr> instrs;
};

struct RawFunc {
  std::string name;
  uint32_t line;
  std::vector<RawBlock> blocks;
};

}  // namespace

void build_cfg(Function& f) {
  const BlockId psb = static_cast<BlockId>(f.blocks.size());
  for (auto& b : f.blocks) {
    b.succs.clear();
    b.preds.clear();
  }
  BasicBlock pseudo;
  pseudo.name = ".psb";
  pseudo.is_pseudo = true;
  f.blocks.push_back(std::move(pseudo));
  f.pseudo_exit = psb;
  f.entry = 0;

  for (BlockId i = 0; i < psb; ++i) {
    BasicBlock& b = f.blocks[i];
    if (b.instrs.empty()) continue;
    const Instruction& last = b.instrs.back();
    switch (last.op) {
      case Opcode::Goto:
        b.succs = {last.operand};
        break;
      case Opcode::Cgoto:
        b.succs = {last.operand, i + 1};
        break;
      case Opcode::Ret:
        b.succs = {psb};
        break;
      default:
        b.succs = {i + 1};  // fallthrough
        break;
    }
  }
  for (BlockId i = 0; i < f.blocks.size(); ++i)
    for (BlockId s : f.blocks[i].succs) f.blocks[s].preds.push_back(i);
}

Program parse_program(std::string_view text, const ParseOptions& opts) {
  std::vector<Line> lines = tokenize(text);
  size_t li = 0;

  auto expect_header = [&](const char* key, bool required) -> const Line* {
    if (li >= lines.size()) {
      if (required) throw ParseError(lines.empty() ? 1 : lines.back().number, 1,
                                     std::string("missing '") + key + "' header");
      return nullptr;
    }
    const Line& line = lines[li];
    if (line.tokens[0].text != key) {
      if (required)
        throw ParseError(line.number, line.tokens[0].col,
                         std::string("expected '") + key + "' header");
      return nullptr;
    }
    if (line.tokens.size() != 2)
      throw ParseError(line.number, line.tokens[0].col,
                       std::string("'") + key + "' takes exactly one value");
    ++li;
    return &line;
  };

  Program p;
  {
    const Line* l = expect_header("pages", true);
    p.config.page_count = static_cast<uint32_t>(parse_uint(*l, l->tokens[1], 1));
  }
  {
    const Line* l = expect_header("page_size", true);
    p.config.page_size = parse_uint(*l, l->tokens[1], 1);
  }
  if (const Line* l = expect_header("psi_cost", false))
    p.config.psi_cost = static_cast<uint32_t>(parse_uint(*l, l->tokens[1], 1));
  if (const Line* l = expect_header("prevalue", false)) {
    const Token& tok = l->tokens[1];
    Rational v;
    try {
      v = Rational::from_decimal(tok.text);
    } catch (const std::exception&) {
      throw ParseError(l->number, tok.col, "bad prevalue '" + tok.text + "'");
    }
    if (!(Rational(0) < v)) throw ParseError(l->number, tok.col, "prevalue must be positive");
    p.config.prevalue = v;
  } else {
    p.config.prevalue = Rational(p.config.psi_cost);
  }

  // First pass: collect the raw structure so calls can reference functions
  // declared later in the file.
  std::vector<RawFunc> raw;
  std::unordered_set<std::string> func_names;
  while (li < lines.size()) {
    const Line& line = lines[li];
    const Token& head = line.tokens[0];
    if (head.text == "func") {
      if (line.tokens.size() != 2)
        throw ParseError(line.number, head.col, "expected 'func <name>:'");
      std::string name = line.tokens[1].text;
      if (name.empty() || name.back() != ':')
        throw ParseError(line.number, line.tokens[1].col, "function name must end with ':'");
      name.pop_back();
      if (!is_ident(name))
        throw ParseError(line.number, line.tokens[1].col, "bad function name '" + name + "'");
      if (!func_names.insert(name).second)
        throw ParseError(line.number, line.tokens[1].col, "duplicate function id '" + name + "'");
      raw.push_back({name, line.number, {}});
      ++li;
      continue;
    }
    if (raw.empty())
      throw ParseError(line.number, head.col, "expected 'func' before instructions");
    RawFunc& fn = raw.back();
    size_t ti = 0;
    if (head.text.size() > 1 && head.text.back() == ':') {
      std::string label = head.text.substr(0, head.text.size() - 1);
      if (!is_ident(label))
        throw ParseError(line.number, head.col, "bad block label '" + label + "'");
      for (const auto& b : fn.blocks)
        if (b.name == label)
          throw ParseError(line.number, head.col,
                           "duplicate block id '" + label + "' in function '" + fn.name + "'");
      fn.blocks.push_back({label, line.number, {}});
      ti = 1;
      if (ti == line.tokens.size()) {
        ++li;
        continue;
      }
    }
    if (fn.blocks.empty())
      throw ParseError(line.number, head.col, "expected a block label before instructions");
    const Token& op = line.tokens[ti];
    RawInstr ri{op.text, "", line.number, op.col};
    size_t argc = line.tokens.size() - ti - 1;
    if (op.text == "ret") {
      if (argc != 0) throw ParseError(line.number, op.col, "'ret' takes no operand");
    } else if (op.text == "pti" || op.text == "call" || op.text == "goto" ||
               op.text == "cgoto" || op.text == "psi") {
      if (argc != 1)
        throw ParseError(line.number, op.col, "'" + op.text + "' takes exactly one operand");
      ri.operand = line.tokens[ti + 1].text;
    } else {
      throw ParseError(line.number, op.col, "unknown instruction '" + op.text + "'");
    }
    fn.blocks.back().instrs.push_back(std::move(ri));
    ++li;
  }

  if (raw.empty()) throw ParseError(1, 1, "program has no functions");

  std::unordered_map<std::string, FuncId> func_index;
  for (FuncId f = 0; f < raw.size(); ++f) func_index.emplace(raw[f].name, f);

  // Second pass: resolve operands, validate block shape, compute sizes.
  for (const RawFunc& rf : raw) {
    Function fn;
    fn.name = rf.name;
    if (rf.blocks.empty())
      throw ParseError(rf.line, 1, "function '" + rf.name + "' has no blocks");
    std::unordered_map<std::string, BlockId> block_index;
    for (BlockId b = 0; b < rf.blocks.size(); ++b) block_index.emplace(rf.blocks[b].name, b);

    for (BlockId bi = 0; bi < rf.blocks.size(); ++bi) {
      const RawBlock& rb = rf.blocks[bi];
      BasicBlock blk;
      blk.name = rb.name;
      blk.line = rb.line;
      if (rb.instrs.empty())
        throw ParseError(rb.line, 1, "block '" + rb.name + "' has no instructions");
      for (uint32_t ii = 0; ii < rb.instrs.size(); ++ii) {
        const RawInstr& ri = rb.instrs[ii];
        const bool last = ii + 1 == rb.instrs.size();
        Line fake{ri.line, {}};
        Token operand{ri.operand, ri.col};
        Instruction ins{};
        if (ri.opcode == "pti") {
          ins = {Opcode::Pti, static_cast<uint32_t>(parse_uint(fake, operand, 1))};
        } else if (ri.opcode == "call") {
          auto it = func_index.find(ri.operand);
          if (it == func_index.end())
            throw ParseError(ri.line, ri.col, "unresolved callee '" + ri.operand + "'");
          ins = {Opcode::Call, it->second};
        } else if (ri.opcode == "goto" || ri.opcode == "cgoto") {
          auto it = block_index.find(ri.operand);
          if (it == block_index.end())
            throw ParseError(ri.line, ri.col,
                             "unresolved label '" + ri.operand + "' in function '" + rf.name + "'");
          ins = {ri.opcode == "goto" ? Opcode::Goto : Opcode::Cgoto, it->second};
        } else if (ri.opcode == "ret") {
          ins = {Opcode::Ret, 0};
        } else {  // psi
          if (!opts.allow_psi)
            throw ParseError(ri.line, ri.col, "psi in input (only tool output may contain psi)");
          uint64_t page = parse_uint(fake, operand, 0);
          if (page >= p.config.page_count)
            throw ParseError(ri.line, ri.col, "psi page out of range");
          ins = {Opcode::Psi, static_cast<uint32_t>(page)};
        }
        if (is_terminator(ins.op) && !last)
          throw ParseError(ri.line, ri.col, "terminator must be the last instruction of its block");
        blk.instrs.push_back(ins);
      }
      const Instruction& last = blk.instrs.back();
      const bool last_block = bi + 1 == rf.blocks.size();
      if (last_block) {
        if (last.op != Opcode::Goto && last.op != Opcode::Ret)
          throw ParseError(rb.line, 1,
                           "fallthrough off function end: last block of '" + rf.name +
                               "' must end in goto or ret");
      }
      fn.blocks.push_back(std::move(blk));
    }

    for (const BasicBlock& b : fn.blocks) {
      for (const Instruction& i : b.instrs) {
        if (i.op != Opcode::Psi) fn.base_size += instr_words(i, p.config.psi_cost);
        if (is_pnti(i)) ++fn.pnti_count;
      }
    }
    build_cfg(fn);
    p.functions.push_back(std::move(fn));
  }

  return p;
}

std::string serialize(const Program& p) {
  std::ostringstream out;
  out << "pages " << p.config.page_count << "\n";
  out << "page_size " << p.config.page_size << "\n";
  out << "psi_cost " << p.config.psi_cost << "\n";
  out << "prevalue " << p.config.prevalue.to_decimal_string() << "\n";
  for (const Function& f : p.functions) {
    out << "\nfunc " << f.name << ":\n";
    for (const BasicBlock& b : f.blocks) {
      if (b.is_pseudo) continue;
      out << b.name << ":\n";
      for (const Instruction& i : b.instrs) {
        switch (i.op) {
          case Opcode::Pti:
            out << "  pti " << i.operand << "\n";
            break;
          case Opcode::Call:
            out << "  call " << p.functions[i.operand].name << "\n";
            break;
          case Opcode::Goto:
            out << "  goto " << f.blocks[i.operand].name << "\n";
            break;
          case Opcode::Cgoto:
            out << "  cgoto " << f.blocks[i.operand].name << "\n";
            break;
          case Opcode::Ret:
            out << "  ret\n";
            break;
          case Opcode::Psi:
            out << "  psi " << i.operand << "\n";
            break;
        }
      }
    }
  }
  return out.str();
}

bool model_equal(const Program& a, const Program& b) {
  if (a.config.page_count != b.config.page_count || a.config.page_size != b.config.page_size ||
      a.config.psi_cost != b.config.psi_cost || a.config.prevalue != b.config.prevalue)
    return false;
  if (a.functions.size() != b.functions.size()) return false;
  for (size_t f = 0; f < a.functions.size(); ++f) {
    const Function& fa = a.functions[f];
    const Function& fb = b.functions[f];
    if (fa.name != fb.name || fa.entry != fb.entry || fa.pseudo_exit != fb.pseudo_exit ||
        fa.base_size != fb.base_size || fa.pnti_count != fb.pnti_count)
      return false;
    if (fa.blocks.size() != fb.blocks.size()) return false;
    for (size_t b2 = 0; b2 < fa.blocks.size(); ++b2) {
      const BasicBlock& ba = fa.blocks[b2];
      const BasicBlock& bb = fb.blocks[b2];
      if (ba.name != bb.name || ba.is_pseudo != bb.is_pseudo || ba.instrs != bb.instrs ||
          ba.succs != bb.succs)
        return false;
    }
  }
  return true;
}

}  // namespace pagesel
