#include <doctest.h>

#include "pagesel/generate.hpp"
#include "pagesel/ir.hpp"
#include "pagesel/rng.hpp"
#include "test_helpers.hpp"

using namespace pagesel;
using namespace pagesel_test;

namespace {
const char* kTiny =
    "pages 2\npage_size 2048\nfunc main:\n b0: pti 10\n call g\n ret\nfunc g:\n b0: pti 5\n "
    "ret\n";
}

TEST_CASE("parse sums word counts") {
  Program p = parse_program(kTiny);
  CHECK(p.functions.size() == 2);
  CHECK(p.functions[fid(p, "main")].base_size == 12);
  CHECK(p.functions[fid(p, "g")].base_size == 6);
  CHECK(p.functions[fid(p, "main")].pnti_count == 1);
  CHECK(p.config.page_count == 2);
  CHECK(p.config.page_size == 2048);  // the usual 11-address-bit geometry
  CHECK(p.config.psi_cost == 1);
  CHECK(p.config.prevalue == Rational(1));
}

TEST_CASE("psi is rejected in input unless allowed") {
  const char* text = "pages 2\npage_size 64\nfunc main:\nb0:\n  psi 1\n  ret\n";
  CHECK_THROWS_WITH_AS(parse_program(text), doctest::Contains("psi in input"), ParseError);
  Program p = parse_program(text, {.allow_psi = true});
  CHECK(p.functions[0].blocks[0].instrs[0].op == Opcode::Psi);
  // base size never counts selects
  CHECK(p.functions[0].base_size == 1);
}

TEST_CASE("psi page operand must be in range") {
  const char* text = "pages 2\npage_size 64\nfunc main:\nb0:\n  psi 2\n  ret\n";
  CHECK_THROWS_AS(parse_program(text, {.allow_psi = true}), ParseError);
}

TEST_CASE("header and syntax errors carry positions") {
  CHECK_THROWS_AS(parse_program(""), ParseError);
  CHECK_THROWS_AS(parse_program("page_size 10\npages 2\n"), ParseError);  // wrong order
  CHECK_THROWS_AS(parse_program("pages 0\npage_size 10\n"), ParseError);
  CHECK_THROWS_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  pti 0\n  ret\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  frob 1\n  ret\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("pages 2\npage_size 10\n"), ParseError);  // no functions
  try {
    parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  pti x\n  ret\n");
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("resolution errors") {
  CHECK_THROWS_WITH_AS(
      parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  call nosuch\n  ret\n"),
      doctest::Contains("unresolved callee"), ParseError);
  CHECK_THROWS_WITH_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  goto nosuch\n"),
                       doctest::Contains("unresolved label"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_program(
          "pages 2\npage_size 10\nfunc f:\nb0:\n  ret\nfunc f:\nb0:\n  ret\n"),
      doctest::Contains("duplicate function"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  ret\nb0:\n  ret\n"),
      doctest::Contains("duplicate block"), ParseError);
}

TEST_CASE("calls may reference later functions") {
  const char* text = "pages 2\npage_size 32\nfunc a:\nb0:\n  call z\n  ret\nfunc z:\nb0:\n  ret\n";
  Program p = parse_program(text);
  CHECK(p.functions[0].blocks[0].instrs[0].operand == fid(p, "z"));
}

TEST_CASE("block shape rules") {
  // terminator not last
  CHECK_THROWS_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  ret\n  pti 1\n"),
                  ParseError);
  // last block must end in goto or ret
  CHECK_THROWS_WITH_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  pti 1\n"),
                       doctest::Contains("fallthrough off function end"), ParseError);
  // cgoto in the last block falls off the end
  CHECK_THROWS_WITH_AS(
      parse_program("pages 2\npage_size 10\nfunc f:\nb0:\n  cgoto b0\n"),
      doctest::Contains("fallthrough off function end"), ParseError);
  // empty block
  CHECK_THROWS_AS(parse_program("pages 2\npage_size 10\nfunc f:\nb0:\nb1:\n  ret\n"), ParseError);
}

TEST_CASE("cfg successors") {
  SUBCASE("single block: ret feeds the pseudo exit") {
    Program p = parse_program("pages 1\npage_size 64\nfunc main:\nb0:\n  pti 1\n  ret\n");
    const Function& f = p.functions[0];
    CHECK(f.blocks[f.entry].succs == std::vector<BlockId>{f.pseudo_exit});
    CHECK(f.blocks[f.pseudo_exit].succs.empty());
    CHECK(f.blocks[f.pseudo_exit].instrs.empty());
    CHECK(f.blocks[f.pseudo_exit].is_pseudo);
  }
  SUBCASE("cgoto: target then fallthrough; fallthrough chains") {
    Program p = parse_program(
        "pages 1\npage_size 64\nfunc g:\nb0:\n  ret\n"
        "func f:\nb0:\n  cgoto b2\nb1:\n  call g\nb2:\n  ret\n");
    const Function& f = p.functions[fid(p, "f")];
    BlockId b0 = bid(p, "f", "b0"), b1 = bid(p, "f", "b1"), b2 = bid(p, "f", "b2");
    CHECK(f.blocks[b0].succs == std::vector<BlockId>({b2, b1}));
    CHECK(f.blocks[b1].succs == std::vector<BlockId>{b2});
    CHECK(f.blocks[b2].succs == std::vector<BlockId>{f.pseudo_exit});
  }
  SUBCASE("goto loop with no ret leaves the pseudo exit unreachable") {
    Program p = parse_program(
        "pages 1\npage_size 64\nfunc f:\nb0:\n  goto b1\nb1:\n  goto b0\n");
    const Function& f = p.functions[0];
    CHECK(f.blocks[f.pseudo_exit].preds.empty());
  }
}

TEST_CASE("serialize then parse is the identity on the model") {
  for (const char* text : {kTiny}) {
    Program p = parse_program(text);
    Program q = parse_program(serialize(p));
    CHECK(model_equal(p, q));
  }
  for (const char* f : {"fig2.ir", "callchain.ir", "diamond.ir", "recursion.ir", "loop.ir",
                        "unreachable.ir", "bigsplit.ir"}) {
    Program p = parse_program(fixture(f));
    CHECK(model_equal(p, parse_program(serialize(p))));
  }
  // generated programs round-trip too
  for (uint64_t seed = 0; seed < 25; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.funcs = {1, 8};
    std::string text = generate(spec);
    Program p = parse_program(text);
    CHECK(model_equal(p, parse_program(serialize(p))));
    CHECK(serialize(p) == text);  // generator emits canonical form
  }
}

TEST_CASE("size accounting matches a recomputation") {
  for (uint64_t seed = 100; seed < 110; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    Program p = parse_program(generate(spec));
    for (const Function& f : p.functions) {
      uint64_t words = 0;
      uint32_t pntis = 0;
      for (const BasicBlock& b : f.blocks)
        for (const Instruction& i : b.instrs) {
          words += instr_words(i, p.config.psi_cost);
          if (is_pnti(i)) ++pntis;
        }
      CHECK(f.base_size == words);
      CHECK(f.pnti_count == pntis);
    }
  }
}

TEST_CASE("every real block has successors; only the pseudo exit has none") {
  for (uint64_t seed = 200; seed < 210; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    Program p = parse_program(generate(spec));
    for (const Function& f : p.functions)
      for (BlockId b = 0; b < f.blocks.size(); ++b) {
        if (f.blocks[b].is_pseudo)
          CHECK(f.blocks[b].succs.empty());
        else
          CHECK(!f.blocks[b].succs.empty());
      }
  }
}

TEST_CASE("mutated inputs either parse or raise a parse error") {
  // deterministic mutation sweep: the parser must never crash or leak any
  // other exception type
  Rng rng(0xF00D);
  for (uint64_t seed = 0; seed < 12; ++seed) {
    GenSpec spec;
    spec.seed = mix_seed(55, seed);
    spec.funcs = {1, 6};
    std::string base = generate(spec);
    for (int round = 0; round < 60; ++round) {
      std::string text = base;
      switch (rng.below(4)) {
        case 0:  // flip a byte
          text[rng.below(static_cast<uint32_t>(text.size()))] =
              static_cast<char>(32 + rng.below(95));
          break;
        case 1:  // truncate
          text.resize(rng.below(static_cast<uint32_t>(text.size())));
          break;
        case 2: {  // delete a line
          size_t start = rng.below(static_cast<uint32_t>(text.size()));
          size_t from = text.rfind('\n', start);
          size_t to = text.find('\n', start);
          if (from == std::string::npos) from = 0;
          if (to == std::string::npos) to = text.size();
          text.erase(from, to - from);
          break;
        }
        default:  // duplicate a chunk
          text.insert(rng.below(static_cast<uint32_t>(text.size())),
                      text.substr(rng.below(static_cast<uint32_t>(text.size() / 2)), 17));
          break;
      }
      try {
        Program p = parse_program(text);
        // survived: still round-trips
        CHECK(model_equal(p, parse_program(serialize(p))));
      } catch (const ParseError&) {
        // fine: rejected with a position
      }
    }
  }
}

TEST_CASE("prevalue header round-trips as a decimal") {
  const char* text =
      "pages 2\npage_size 64\npsi_cost 2\nprevalue 1.5\nfunc f:\nb0:\n  ret\n";
  Program p = parse_program(text);
  CHECK(p.config.prevalue == Rational(3, 2));
  CHECK(p.config.psi_cost == 2);
  Program q = parse_program(serialize(p));
  CHECK(q.config.prevalue == Rational(3, 2));
  // prevalue defaults to psi_cost when omitted
  Program r = parse_program("pages 2\npage_size 64\npsi_cost 3\nfunc f:\nb0:\n  ret\n");
  CHECK(r.config.prevalue == Rational(3));
}
