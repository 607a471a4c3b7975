#include "pagesel/report.hpp"

#include <json.hpp>

namespace pagesel {

using ordered_json = nlohmann::ordered_json;

Report make_report(const Program& p, std::string name, const OptimizedProgram& naive,
                   const OptimizedProgram& opt, const Frg& frg, const PhaseTimings& timings) {
  Report r;
  r.program = std::move(name);
  r.nof = static_cast<uint32_t>(p.functions.size());
  r.s_naive = naive.total_size();
  r.s_opt = opt.total_size();
  r.psi_naive = naive.psi_count();
  r.psi_opt = opt.psi_count();
  r.ratio = static_cast<double>(r.s_opt) / static_cast<double>(r.s_naive);
  r.frg_total = frg.total_weight();
  r.residual = residual_cost(frg, opt.assignment);
  r.saved = intra_weight(frg, opt.assignment);

  SizeReport sizes = code_size(opt);
  for (uint64_t used : sizes.page_used) r.pages.emplace_back(used, p.config.page_size);
  for (const Function& f : p.functions) r.func_names.push_back(f.name);
  r.func_page = opt.assignment.func_page;
  r.timings = timings;
  return r;
}

std::string report_to_json(const Report& r) {
  ordered_json j;
  j["schema"] = 1;
  j["program"] = r.program;
  j["nof"] = r.nof;
  j["s_naive"] = r.s_naive;
  j["s_opt"] = r.s_opt;
  j["psi_naive"] = r.psi_naive;
  j["psi_opt"] = r.psi_opt;
  j["ratio"] = r.ratio;
  j["frg_total"] = r.frg_total.to_string();
  j["residual"] = r.residual.to_string();
  j["saved"] = r.saved.to_string();
  ordered_json pages = ordered_json::array();
  for (uint32_t pg = 0; pg < r.pages.size(); ++pg)
    pages.push_back({{"page", pg}, {"used", r.pages[pg].first}, {"capacity", r.pages[pg].second}});
  j["pages"] = pages;
  ordered_json fp = ordered_json::object();
  for (size_t f = 0; f < r.func_names.size(); ++f) fp[r.func_names[f]] = r.func_page[f];
  j["func_page"] = fp;
  j["timings_ms"] = {{"parse", r.timings.parse_ms},   {"analyze", r.timings.analyze_ms},
                     {"frg", r.timings.frg_ms},       {"partition", r.timings.partition_ms},
                     {"insert", r.timings.insert_ms}, {"naive", r.timings.naive_ms}};
  return j.dump(2) + "\n";
}

std::string merge_reports(const std::vector<std::string>& report_docs) {
  ordered_json out;
  out["schema"] = 1;
  out["kind"] = "corpus_summary";
  uint64_t sum_naive = 0;
  uint64_t sum_opt = 0;
  uint64_t psi_naive = 0;
  uint64_t psi_opt = 0;
  double ratio_sum = 0;
  ordered_json per = ordered_json::array();
  for (const std::string& doc : report_docs) {
    ordered_json j = ordered_json::parse(doc);
    if (!j.contains("schema") || j["schema"].get<int>() != 1)
      throw Error("report: unsupported schema");
    sum_naive += j["s_naive"].get<uint64_t>();
    sum_opt += j["s_opt"].get<uint64_t>();
    psi_naive += j["psi_naive"].get<uint64_t>();
    psi_opt += j["psi_opt"].get<uint64_t>();
    ratio_sum += j["ratio"].get<double>();
    per.push_back({{"program", j["program"]}, {"ratio", j["ratio"]}});
  }
  out["programs"] = per.size();
  out["mean_ratio"] = per.empty() ? 1.0 : ratio_sum / static_cast<double>(per.size());
  out["sum_s_naive"] = sum_naive;
  out["sum_s_opt"] = sum_opt;
  out["overall_ratio"] =
      sum_naive == 0 ? 1.0 : static_cast<double>(sum_opt) / static_cast<double>(sum_naive);
  out["psi_naive"] = psi_naive;
  out["psi_opt"] = psi_opt;
  out["per_program"] = per;
  return out.dump(2) + "\n";
}

}  // namespace pagesel
