#include <doctest.h>

#include "pagesel/generate.hpp"
#include "pagesel/pipeline.hpp"
#include "pagesel/psi.hpp"
#include "pagesel/rng.hpp"
#include "test_helpers.hpp"

using namespace pagesel;
using namespace pagesel_test;

namespace {

const char* kChain =
    "pages 2\npage_size 64\nfunc main:\nb0:\n  call g\n  call h\n  ret\n"
    "func g:\nb0:\n  pti 1\n  ret\nfunc h:\nb0:\n  pti 1\n  ret\n";

PageAssignment assignment(const Program& p, std::vector<uint32_t> pages) {
  return PageAssignment{std::move(pages),
                        std::vector<uint64_t>(p.config.page_count, p.config.page_size)};
}

}  // namespace

TEST_CASE("required page: branches stay, calls follow the callee") {
  Program p = parse_program(
      "pages 4\npage_size 64\nfunc f:\nb0:\n  cgoto b1\nb1:\n  goto b2\nb2:\n  call g\n  ret\n"
      "func g:\nb0:\n  ret\n");
  PageAssignment a = assignment(p, {2, 0});
  const Function& f = p.functions[0];
  CHECK(required_page(f.blocks[0].instrs[0], 0, a) == 2);  // cgoto
  CHECK(required_page(f.blocks[1].instrs[0], 0, a) == 2);  // goto
  CHECK(required_page(f.blocks[2].instrs[0], 0, a) == 0);  // call g
}

TEST_CASE("no selects when everything shares a page") {
  Program p = parse_program(kChain);
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  OptimizedProgram o = insert_psi(p, assignment(p, {0, 0, 0}), vop);
  CHECK(o.sites.empty());
  CHECK(o.total_size() == p.functions[0].base_size + p.functions[1].base_size +
                              p.functions[2].base_size);
}

TEST_CASE("exactly one select when one callee moves away") {
  Program p = parse_program(kChain);
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  OptimizedProgram o = insert_psi(p, assignment(p, {0, 0, 1}), vop);
  REQUIRE(o.sites.size() == 1);
  CHECK(o.sites[0].pnti == Position{0, 0, 1});  // before "call h"
  CHECK(o.sites[0].page == 1);
  // the select lands immediately before its instruction
  const BasicBlock& b0 = o.program.functions[0].blocks[0];
  REQUIRE(b0.instrs.size() == 4);
  CHECK(b0.instrs[1].op == Opcode::Psi);
  CHECK(b0.instrs[1].operand == 1);
  CHECK(b0.instrs[2].op == Opcode::Call);
  CHECK(o.exact_sizes[0] == p.functions[0].base_size + 1);
}

TEST_CASE("selects appear only immediately before nontransparent instructions") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec spec;
    spec.seed = mix_seed(404, seed);
    PipelineResult r = run_pipeline(generate(spec), "t");
    for (const Function& f : r.optimized.program.functions)
      for (const BasicBlock& b : f.blocks)
        for (size_t i = 0; i < b.instrs.size(); ++i)
          if (b.instrs[i].op == Opcode::Psi) {
            REQUIRE(i + 1 < b.instrs.size());
            CHECK(is_pnti(b.instrs[i + 1]));
          }
  }
}

TEST_CASE("naive places a select at every site") {
  Program p = parse_program(kChain);
  OptimizedProgram naive = naive_placement(p);
  CHECK(naive.psi_count() == 2);  // one per nontransparent instruction
  uint32_t pntis = 0;
  for (const Function& f : p.functions) pntis += f.pnti_count;
  CHECK(naive.psi_count() == pntis);
}

TEST_CASE("naive first-fit spills to the next page") {
  Program p = parse_program(
      "pages 2\npage_size 16\nfunc a:\nb0:\n  pti 9\n  ret\nfunc b:\nb0:\n  pti 9\n  ret\n");
  OptimizedProgram naive = naive_placement(p);
  CHECK(naive.assignment.func_page == std::vector<uint32_t>({0, 1}));
}

TEST_CASE("code size arithmetic") {
  Program p = parse_program("pages 1\npage_size 64\nfunc main:\nb0:\n  pti 10\n  call main\n "
                            " ret\n");
  // base 12, one nontransparent instruction
  OptimizedProgram naive = naive_placement(p);
  CHECK(code_size(naive).total_words == 13);
  CHECK(code_size(naive).psi_count == 1);

  DataflowResult d = solve(p);
  VopTable vop(p, d);
  OptimizedProgram opt = insert_psi(p, assignment(p, {0}), vop);
  CHECK(code_size(opt).total_words == 12);
  CHECK(code_size(opt).psi_count == 0);
}

TEST_CASE("zero-site program: naive equals base") {
  Program p = parse_program("pages 1\npage_size 64\nfunc f:\nb0:\n  pti 7\n  ret\n");
  OptimizedProgram naive = naive_placement(p);
  CHECK(naive.total_size() == 8);
  CHECK(naive.psi_count() == 0);
}

TEST_CASE("optimized sites are a subset of all sites; sizes ordered") {
  for (uint64_t seed = 0; seed < 15; ++seed) {
    GenSpec spec;
    spec.seed = mix_seed(7321, seed);
    PipelineResult r = run_pipeline(generate(spec), "t");
    uint32_t pntis = 0;
    for (const Function& f : r.program.functions) pntis += f.pnti_count;
    CHECK(r.optimized.psi_count() <= pntis);
    CHECK(r.naive.psi_count() == pntis);
    CHECK(r.optimized.total_size() <= r.naive.total_size());
    for (const PsiSite& s : r.optimized.sites)
      CHECK(is_pnti(r.program.functions[s.pnti.func].blocks[s.pnti.block].instrs[s.pnti.instr]));
  }
}

TEST_CASE("insertion is idempotent: strip and re-insert reproduces the sites") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    GenSpec spec;
    spec.seed = mix_seed(515, seed);
    PipelineResult r = run_pipeline(generate(spec), "t");

    // strip the selects back out
    Program stripped;
    stripped.config = r.optimized.program.config;
    for (const Function& f : r.optimized.program.functions) {
      Function fn;
      fn.name = f.name;
      for (const BasicBlock& b : f.blocks) {
        if (b.is_pseudo) continue;
        BasicBlock nb;
        nb.name = b.name;
        for (const Instruction& i : b.instrs)
          if (i.op != Opcode::Psi) nb.instrs.push_back(i);
        fn.blocks.push_back(std::move(nb));
      }
      for (const BasicBlock& b : fn.blocks) {
        fn.base_size += b.words(stripped.config.psi_cost);
        for (const Instruction& i : b.instrs)
          if (is_pnti(i)) ++fn.pnti_count;
      }
      build_cfg(fn);
      stripped.functions.push_back(std::move(fn));
    }
    CHECK(model_equal(stripped, r.program));

    DataflowResult d = solve(stripped);
    VopTable vop(stripped, d);
    OptimizedProgram again = insert_psi(stripped, r.optimized.assignment, vop);
    CHECK(again.sites == r.optimized.sites);
    CHECK(again.exact_sizes == r.optimized.exact_sizes);
  }
}

TEST_CASE("unreachable sites keep an unconditional select") {
  Program p = parse_program(fixture("unreachable.ir"));
  PipelineResult r = run_pipeline(fixture("unreachable.ir"), "unreachable.ir");
  const FuncId m = fid(p, "main");
  const BlockId b1 = bid(p, "main", "b1");
  bool found = false;
  for (const PsiSite& s : r.optimized.sites)
    if (s.pnti.func == m && s.pnti.block == b1) found = true;
  CHECK(found);
}

TEST_CASE("optimized output reparses with --allow-psi") {
  PipelineResult r = run_pipeline(fixture("fig2.ir"), "fig2.ir");
  std::string out = serialize(r.optimized.program);
  CHECK_THROWS_AS(parse_program(out), ParseError);  // psi guard still applies
  Program back = parse_program(out, {.allow_psi = true});
  CHECK(model_equal(back, r.optimized.program));
}

TEST_CASE("preexisting selects count toward exact sizes") {
  Program p = parse_program(
      "pages 2\npage_size 32\nfunc main:\nb0:\n  pti 2\n  psi 0\n  call w\n  ret\n"
      "func w:\nb0:\n  pti 3\n  ret\n",
      {.allow_psi = true});
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  OptimizedProgram o = insert_psi(p, assignment(p, {0, 0}), vop);
  // co-located, so nothing new is inserted; the stray select still occupies
  // a word
  CHECK(o.sites.empty());
  CHECK(o.exact_sizes[0] == p.functions[0].base_size + 1);
}
