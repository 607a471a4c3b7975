#include <doctest.h>

#include <json.hpp>

#include "pagesel/pipeline.hpp"
#include "pagesel/report.hpp"
#include "test_helpers.hpp"

using namespace pagesel;
using namespace pagesel_test;
using ordered_json = nlohmann::ordered_json;

TEST_CASE("report fields for a fully co-located program") {
  PipelineResult r = run_pipeline(fixture("callchain.ir"), "callchain.ir");
  CHECK(r.report.program == "callchain.ir");
  CHECK(r.report.nof == 3);
  CHECK(r.report.psi_opt == 0);
  CHECK(r.report.s_naive == 16);
  CHECK(r.report.s_opt == 14);
  CHECK(r.report.ratio == doctest::Approx(14.0 / 16.0));
  CHECK(r.report.residual + r.report.saved == r.report.frg_total);
  CHECK(r.report.s_opt <= r.report.s_naive);
}

TEST_CASE("zero-site program reports ratio 1") {
  std::string text = "pages 1\npage_size 64\nfunc f:\nb0:\n  pti 7\n  ret\n";
  PipelineResult r = run_pipeline(text, "flat");
  CHECK(r.report.psi_naive == 0);
  CHECK(r.report.psi_opt == 0);
  CHECK(r.report.ratio == 1.0);
}

TEST_CASE("serialized report has the documented shape") {
  PipelineResult r = run_pipeline(fixture("fig2.ir"), "fig2.ir");
  ordered_json j = ordered_json::parse(report_to_json(r.report));
  CHECK(j["schema"] == 1);
  CHECK(j["program"] == "fig2.ir");
  CHECK(j["nof"] == 3);
  CHECK(j.contains("s_naive"));
  CHECK(j.contains("pages"));
  CHECK(j.contains("func_page"));
  CHECK(j.contains("timings_ms"));
  CHECK(j["pages"].size() == r.program.config.page_count);
  // key order is pinned
  auto it = j.begin();
  CHECK(it.key() == "schema");
  ++it;
  CHECK(it.key() == "program");
}

TEST_CASE("reports from identical runs differ only in timings") {
  PipelineResult a = run_pipeline(fixture("bigsplit.ir"), "bigsplit.ir");
  PipelineResult b = run_pipeline(fixture("bigsplit.ir"), "bigsplit.ir");
  ordered_json ja = ordered_json::parse(report_to_json(a.report));
  ordered_json jb = ordered_json::parse(report_to_json(b.report));
  ja.erase("timings_ms");
  jb.erase("timings_ms");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("corpus merge takes the unweighted mean of ratios") {
  PipelineResult a = run_pipeline(fixture("callchain.ir"), "callchain.ir");
  PipelineResult b = run_pipeline(fixture("fig2.ir"), "fig2.ir");
  std::string merged =
      merge_reports({report_to_json(a.report), report_to_json(b.report)});
  ordered_json j = ordered_json::parse(merged);
  CHECK(j["schema"] == 1);
  CHECK(j["programs"] == 2);
  CHECK(j["mean_ratio"].get<double>() ==
        doctest::Approx((a.report.ratio + b.report.ratio) / 2.0));
  CHECK(j["sum_s_naive"] == a.report.s_naive + b.report.s_naive);
  CHECK(j["per_program"].size() == 2);
  CHECK(j["per_program"][0]["program"] == "callchain.ir");
}

TEST_CASE("merge rejects unknown schemas") {
  CHECK_THROWS_AS(merge_reports({"{\"schema\": 2}"}), Error);
}
