#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "pagesel/generate.hpp"
#include "pagesel/oracle.hpp"
#include "pagesel/pipeline.hpp"
#include "pagesel/vm.hpp"

namespace py = pybind11;
using namespace pagesel;
using ordered_json = nlohmann::ordered_json;

namespace {

py::object json_to_py(const ordered_json& j) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = json_to_py(v);
      return d;
    }
    case ordered_json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(json_to_py(v));
      return l;
    }
    case ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case ordered_json::value_t::number_integer:
      return py::int_(j.get<int64_t>());
    case ordered_json::value_t::number_unsigned:
      return py::int_(j.get<uint64_t>());
    case ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

py::list set_names(const Program& p, const FuncSet& s) {
  py::list out;
  for (uint32_t f : s.members()) out.append(p.functions[f].name);
  return out;
}

PipelineOptions options(bool allow_psi, bool conservative) {
  PipelineOptions o;
  o.allow_psi = allow_psi;
  o.conservative_size = conservative;
  return o;
}

py::dict analyze(const std::string& text, bool allow_psi) {
  Program p = parse_program(text, {.allow_psi = allow_psi});
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  py::list functions;
  for (FuncId f = 0; f < p.functions.size(); ++f) {
    const Function& fn = p.functions[f];
    py::list blocks;
    for (BlockId b = 0; b < fn.blocks.size(); ++b) {
      const BasicBlock& blk = fn.blocks[b];
      py::list vops;
      for (uint32_t i = 0; i < blk.instrs.size(); ++i) {
        py::dict at;
        at["before"] = set_names(p, vop.before({f, b, i}));
        at["after"] = set_names(p, vop.after({f, b, i}));
        vops.append(at);
      }
      py::dict bd;
      bd["name"] = blk.name;
      bd["pseudo"] = blk.is_pseudo;
      bd["gen"] = set_names(p, d.gen[f][b]);
      bd["kill"] = set_names(p, d.kill[f][b]);
      bd["in"] = set_names(p, d.in[f][b]);
      bd["out"] = set_names(p, d.out[f][b]);
      bd["vop"] = vops;
      blocks.append(bd);
    }
    py::dict fd;
    fd["name"] = fn.name;
    fd["base_size"] = fn.base_size;
    fd["pnti_count"] = fn.pnti_count;
    fd["blocks"] = blocks;
    functions.append(fd);
  }
  py::dict out;
  out["functions"] = functions;
  out["iterations"] = d.iterations;
  return out;
}

py::dict frg_table(const std::string& text) {
  Program p = parse_program(text);
  DataflowResult d = solve(p);
  Frg frg = build_frg(p, VopTable(p, d));
  py::list edges;
  for (const Frg::Edge& e : frg.edges())
    edges.append(py::make_tuple(p.functions[e.g].name, p.functions[e.h].name,
                                e.weight.to_string()));
  py::dict out;
  out["edges"] = edges;
  out["total"] = frg.total_weight().to_string();
  return out;
}

py::dict partition_text(const std::string& text, bool exhaustive, const std::string& objective,
                        bool conservative) {
  Program p = parse_program(text);
  DataflowResult d = solve(p);
  VopTable vop(p, d);
  Frg frg = build_frg(p, vop);
  PageAssignment a;
  if (exhaustive) {
    Objective obj = objective == "psi" ? Objective::PsiCount : Objective::ResidualWeight;
    a = exhaustive_partition(frg, p, obj, vop);
  } else {
    a = greedy_partition(frg, p, {.conservative_size = conservative}).assignment;
  }
  py::dict pages;
  for (FuncId f = 0; f < p.functions.size(); ++f)
    pages[py::str(p.functions[f].name)] = a.func_page[f];
  py::dict out;
  out["func_page"] = pages;
  out["residual"] = residual_cost(frg, a).to_string();
  out["saved"] = intra_weight(frg, a).to_string();
  out["total"] = frg.total_weight().to_string();
  return out;
}

py::dict optimize_text(const std::string& text, bool conservative, const std::string& name) {
  PipelineResult r = run_pipeline(text, name, options(false, conservative));
  py::dict out;
  out["ir"] = serialize(r.optimized.program);
  out["report"] = json_to_py(ordered_json::parse(report_to_json(r.report)));
  return out;
}

py::dict verify_text(const std::string& text, uint32_t seeds, uint64_t steps, uint64_t seed,
                     bool conservative) {
  PipelineResult r = run_pipeline(text, "<memory>", options(false, conservative));
  VerifySummary s = verify_optimization(r, seeds, steps, seed);
  py::dict out;
  out["streams"] = s.streams;
  out["faults"] = s.faults;
  out["divergences"] = s.divergences;
  out["ok"] = s.ok();
  return out;
}

std::string generate_text(uint64_t seed, std::pair<uint32_t, uint32_t> funcs,
                          std::pair<uint32_t, uint32_t> blocks, std::pair<uint32_t, uint32_t> pti,
                          uint32_t pages, uint64_t page_size, uint32_t psi_cost,
                          const std::string& prevalue, double call_density, double goto_density,
                          double cluster, bool acyclic, uint64_t target_size, double fill) {
  GenSpec spec;
  spec.seed = seed;
  spec.funcs = {funcs.first, funcs.second};
  spec.blocks = {blocks.first, blocks.second};
  spec.pti = {pti.first, pti.second};
  spec.page_count = pages;
  spec.page_size = page_size;
  spec.psi_cost = psi_cost;
  spec.prevalue = prevalue;
  spec.call_density = call_density;
  spec.goto_density = goto_density;
  spec.cluster = cluster;
  spec.acyclic = acyclic;
  spec.target_size = target_size;
  spec.fill = fill;
  return generate(spec);
}

std::string corpus_program(uint32_t index) {
  auto corpus = canonical_corpus();
  if (index >= corpus.size()) throw Error("corpus index out of range");
  return generate(corpus[index]);
}

py::object merge(const std::vector<std::string>& docs) {
  return json_to_py(ordered_json::parse(merge_reports(docs)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "page-selection instruction optimizer for paged program memory";
#ifdef PAGESEL_VERSION
  m.attr("__version__") = PAGESEL_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  py::register_exception<Error>(m, "Error");

  m.def("analyze", &analyze, py::arg("text"), py::arg("allow_psi") = false,
        "Gen/Kill/In/Out and relation sets for every block and instruction.");
  m.def("frg", &frg_table, py::arg("text"),
        "Weighted function relation graph: nonzero edges and the total weight.");
  m.def("partition", &partition_text, py::arg("text"), py::arg("exhaustive") = false,
        py::arg("objective") = "residual", py::arg("conservative") = false,
        "Function-to-page assignment with residual/saved/total weights.");
  m.def("optimize", &optimize_text, py::arg("text"), py::arg("conservative") = false,
        py::arg("name") = "<memory>",
        "Full pipeline; returns the optimized program text and its report.");
  m.def("verify", &verify_text, py::arg("text"), py::arg("seeds") = 20,
        py::arg("steps") = 100000, py::arg("seed") = 0, py::arg("conservative") = false,
        "Differential naive-vs-optimized execution over seeded decision streams.");
  m.def("generate", &generate_text, py::arg("seed") = 0,
        py::arg("funcs") = std::pair<uint32_t, uint32_t>{4, 16},
        py::arg("blocks") = std::pair<uint32_t, uint32_t>{1, 6},
        py::arg("pti") = std::pair<uint32_t, uint32_t>{1, 12}, py::arg("pages") = 2,
        py::arg("page_size") = 0, py::arg("psi_cost") = 1, py::arg("prevalue") = "",
        py::arg("call_density") = 0.35, py::arg("goto_density") = 0.3, py::arg("cluster") = 0.7,
        py::arg("acyclic") = false, py::arg("target_size") = 0, py::arg("fill") = 0.6,
        "Seeded random program; identical arguments give identical text.");
  m.def("corpus_program", &corpus_program, py::arg("index"),
        "Program N of the canonical 200-program evaluation corpus.");
  m.def("merge_reports", &merge, py::arg("reports"),
        "Merge per-program report documents into a corpus summary.");
}
