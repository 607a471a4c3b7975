#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pagesel/generate.hpp"
#include "pagesel/oracle.hpp"
#include "pagesel/pipeline.hpp"
#include "pagesel/vm.hpp"

namespace {

using namespace pagesel;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string render_set(const Program& p, const FuncSet& s) {
  std::string out = "{";
  bool first = true;
  for (uint32_t f : s.members()) {
    if (!first) out += ",";
    out += p.functions[f].name;
    first = false;
  }
  return out + "}";
}

std::string render_instr(const Program& p, const Function& fn, const Instruction& i) {
  switch (i.op) {
    case Opcode::Pti:
      return "pti " + std::to_string(i.operand);
    case Opcode::Call:
      return "call " + p.functions[i.operand].name;
    case Opcode::Goto:
      return "goto " + fn.blocks[i.operand].name;
    case Opcode::Cgoto:
      return "cgoto " + fn.blocks[i.operand].name;
    case Opcode::Ret:
      return "ret";
    case Opcode::Psi:
      return "psi " + std::to_string(i.operand);
  }
  return "?";
}

struct CommonArgs {
  std::string file;
  bool allow_psi = false;
  bool conservative = false;
  PipelineOptions pipeline_opts() const {
    PipelineOptions o;
    o.allow_psi = allow_psi;
    o.conservative_size = conservative;
    o.pages_override = pages;
    o.page_size_override = page_size;
    o.psi_cost_override = psi_cost;
    o.prevalue_override = prevalue;
    return o;
  }
  uint32_t pages = 0;
  uint64_t page_size = 0;
  uint32_t psi_cost = 0;
  std::string prevalue;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_conservative) {
  cmd->add_option("file", args.file, "input program")->required();
  cmd->add_flag("--allow-psi", args.allow_psi, "accept psi instructions in the input");
  cmd->add_option("--pages", args.pages, "override the page count");
  cmd->add_option("--page-size", args.page_size, "override the page size (words)");
  cmd->add_option("--psi-cost", args.psi_cost, "override the select-instruction cost (words)");
  cmd->add_option("--prevalue", args.prevalue, "override the weight unit (decimal)");
  if (with_conservative)
    cmd->add_flag("--conservative-size", args.conservative,
                  "partition with pessimistic sizes (no select refund)");
}

int cmd_analyze(const CommonArgs& args) {
  Program p = parse_with_overrides(read_file(args.file), args.pipeline_opts());
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  std::ostringstream out;
  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const Function& fn = p.functions[f];
    out << "func " << fn.name << "\n";
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      const BasicBlock& blk = fn.blocks[b];
      out << "  block " << blk.name << ": gen=" << render_set(p, d.gen[f][b])
          << " kill=" << render_set(p, d.kill[f][b]) << " in=" << render_set(p, d.in[f][b])
          << " out=" << render_set(p, d.out[f][b]) << "\n";
      for (uint32_t i = 0; i < blk.instrs.size(); ++i) {
        Position pos{f, b, i};
        out << "    " << render_instr(p, fn, blk.instrs[i])
            << " | before=" << render_set(p, vop.before(pos))
            << " after=" << render_set(p, vop.after(pos)) << "\n";
      }
    }
  }
  out << "iterations " << d.iterations << "\n";
  std::cout << out.str();
  return 0;
}

int cmd_frg(const CommonArgs& args) {
  Program p = parse_with_overrides(read_file(args.file), args.pipeline_opts());
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  Frg frg = build_frg(p, vop);
  std::vector<std::string> lines;
  for (const Frg::Edge& e : frg.edges()) {
    std::string a = p.functions[e.g].name;
    std::string b = p.functions[e.h].name;
    if (b < a) std::swap(a, b);
    lines.push_back(a + " " + b + " " + e.weight.to_string());
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream out;
  for (const std::string& l : lines) out << l << "\n";
  out << "total " << frg.total_weight().to_string() << "\n";
  std::cout << out.str();
  return 0;
}

int cmd_partition(const CommonArgs& args, bool exhaustive, const std::string& objective) {
  Program p = parse_with_overrides(read_file(args.file), args.pipeline_opts());
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  Frg frg = build_frg(p, vop);
  PageAssignment a;
  if (exhaustive) {
    Objective obj = objective == "psi" ? Objective::PsiCount : Objective::ResidualWeight;
    a = exhaustive_partition(frg, p, obj, vop);
  } else {
    a = greedy_partition(frg, p, {.conservative_size = args.conservative}).assignment;
  }
  std::ostringstream out;
  for (FuncId f = 0; f < p.functions.size(); ++f)
    out << p.functions[f].name << " " << a.func_page[f] << "\n";
  out << "residual " << residual_cost(frg, a).to_string() << "\n";
  out << "saved " << intra_weight(frg, a).to_string() << "\n";
  out << "total " << frg.total_weight().to_string() << "\n";
  std::cout << out.str();
  return 0;
}

int cmd_optimize(const CommonArgs& args, const std::string& out_path,
                 const std::string& report_path) {
  PipelineResult r = run_pipeline(read_file(args.file), args.file, args.pipeline_opts());
  if (!out_path.empty()) write_file(out_path, serialize(r.optimized.program));
  if (!report_path.empty()) write_file(report_path, report_to_json(r.report));
  std::cout << "s_naive=" << r.report.s_naive << " s_opt=" << r.report.s_opt
            << " psi_naive=" << r.report.psi_naive << " psi_opt=" << r.report.psi_opt
            << " ratio=" << r.report.ratio << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, uint32_t seeds, uint64_t steps, uint64_t base_seed) {
  PipelineResult r = run_pipeline(read_file(args.file), args.file, args.pipeline_opts());
  VerifySummary s = verify_optimization(r, seeds, steps, base_seed);
  std::cout << "streams=" << s.streams << " faults=" << s.faults
            << " divergences=" << s.divergences << "\n";
  return s.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"page-selection instruction optimizer for paged program memory"};
  app.require_subcommand(1);

  CommonArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "dump gen/kill/in/out and relation sets");
  add_common(analyze, analyze_args, false);

  CommonArgs frg_args;
  CLI::App* frg = app.add_subcommand("frg", "emit the weighted function relation graph");
  add_common(frg, frg_args, false);

  CommonArgs part_args;
  bool exhaustive = false;
  std::string objective = "residual";
  CLI::App* partition = app.add_subcommand("partition", "assign functions to pages");
  add_common(partition, part_args, true);
  partition->add_flag("--exhaustive", exhaustive, "brute-force optimal (small instances)");
  partition->add_option("--objective", objective, "exhaustive objective")
      ->check(CLI::IsMember({"residual", "psi"}));

  CommonArgs opt_args;
  std::string out_path, report_path;
  CLI::App* optimize = app.add_subcommand("optimize", "full pipeline: analyze, partition, insert");
  add_common(optimize, opt_args, true);
  optimize->add_option("-o,--output", out_path, "optimized program output path");
  optimize->add_option("--report", report_path, "report document output path");

  CommonArgs verify_args;
  uint32_t seeds = 20;
  uint64_t steps = 100000;
  uint64_t vseed = 0;
  CLI::App* verify = app.add_subcommand("verify", "differential run of naive vs optimized images");
  add_common(verify, verify_args, true);
  verify->add_option("--seeds", seeds, "number of decision streams");
  verify->add_option("--steps", steps, "step budget per run");
  verify->add_option("--seed", vseed, "base seed for the streams");

  GenSpec gen_spec;
  std::string gen_out;
  int64_t corpus_index = -1;
  std::pair<uint32_t, uint32_t> gen_funcs{4, 16}, gen_blocks{1, 6}, gen_pti{1, 12};
  CLI::App* gen = app.add_subcommand("gen", "emit a seeded random program");
  gen->add_option("--seed", gen_spec.seed, "generator seed");
  gen->add_option("--funcs", gen_funcs, "function count range (lo hi)");
  gen->add_option("--blocks", gen_blocks, "blocks-per-function range (lo hi)");
  gen->add_option("--pti", gen_pti, "transparent chunk size range (lo hi)");
  gen->add_option("--pages", gen_spec.page_count, "page count");
  gen->add_option("--page-size", gen_spec.page_size, "page size in words (0 = derive)");
  gen->add_option("--psi-cost", gen_spec.psi_cost, "select-instruction cost in words");
  gen->add_option("--prevalue", gen_spec.prevalue, "weight unit (decimal)");
  gen->add_option("--call-density", gen_spec.call_density, "per-slot call probability");
  gen->add_option("--goto-density", gen_spec.goto_density, "branch probability per block");
  gen->add_option("--cluster", gen_spec.cluster, "same-cluster call probability");
  gen->add_flag("--acyclic", gen_spec.acyclic, "forward-only calls and branches");
  gen->add_option("--target-size", gen_spec.target_size, "pad to this many words total");
  gen->add_option("--fill", gen_spec.fill, "capacity fill target for derived page size");
  gen->add_option("--corpus", corpus_index, "emit program N of the canonical corpus instead");
  gen->add_option("-o,--output", gen_out, "output path (default stdout)");

  std::vector<std::string> report_files;
  std::string merged_out;
  CLI::App* report = app.add_subcommand("report", "merge per-program reports into a summary");
  report->add_option("files", report_files, "report documents")->required();
  report->add_option("-o,--output", merged_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_args);
    if (*frg) return cmd_frg(frg_args);
    if (*partition) return cmd_partition(part_args, exhaustive, objective);
    if (*optimize) return cmd_optimize(opt_args, out_path, report_path);
    if (*verify) return cmd_verify(verify_args, seeds, steps, vseed);
    if (*gen) {
      std::string text;
      if (corpus_index >= 0) {
        auto corpus = canonical_corpus();
        if (corpus_index >= static_cast<int64_t>(corpus.size()))
          throw Error("corpus index out of range (0.." + std::to_string(corpus.size() - 1) + ")");
        text = generate(corpus[static_cast<size_t>(corpus_index)]);
      } else {
        gen_spec.funcs = {gen_funcs.first, gen_funcs.second};
        gen_spec.blocks = {gen_blocks.first, gen_blocks.second};
        gen_spec.pti = {gen_pti.first, gen_pti.second};
        text = generate(gen_spec);
      }
      if (gen_out.empty())
        std::cout << text;
      else
        write_file(gen_out, text);
      return 0;
    }
    if (*report) {
      std::vector<std::string> docs;
      docs.reserve(report_files.size());
      for (const std::string& f : report_files) docs.push_back(read_file(f));
      std::string merged = merge_reports(docs);
      if (merged_out.empty())
        std::cout << merged;
      else
        write_file(merged_out, merged);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
