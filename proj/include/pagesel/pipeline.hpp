#pragma once

#include <string>
#include <string_view>

#include "pagesel/analysis.hpp"
#include "pagesel/frg.hpp"
#include "pagesel/ir.hpp"
#include "pagesel/partition.hpp"
#include "pagesel/psi.hpp"
#include "pagesel/report.hpp"

namespace pagesel {

struct PipelineOptions {
  bool conservative_size = false;
  bool allow_psi = false;
  // Header overrides; zero/empty means "keep the parsed value".
  uint32_t pages_override = 0;
  uint64_t page_size_override = 0;
  uint32_t psi_cost_override = 0;
  std::string prevalue_override;
};

/// Everything the batch pipeline produces for one program: analyze, build
/// the relation graph, partition, insert selects, build the baseline,
/// aggregate the report.
struct PipelineResult {
  Program program;
  DataflowResult dataflow;
  VopTable vop;
  Frg frg;
  GreedyResult greedy;
  OptimizedProgram optimized;
  OptimizedProgram naive;
  Report report;
};

Program parse_with_overrides(std::string_view ir_text, const PipelineOptions& opts);

PipelineResult run_pipeline(std::string_view ir_text, std::string name,
                            const PipelineOptions& opts = {});

struct VerifySummary {
  uint32_t streams = 0;
  uint32_t faults = 0;
  uint32_t divergences = 0;

  bool ok() const { return faults == 0 && divergences == 0; }
};

/// Differential check: lays out the naive and optimized images and drives
/// both over `streams` seeded decision streams, comparing traces.
VerifySummary verify_optimization(const PipelineResult& r, uint32_t streams, uint64_t max_steps,
                                  uint64_t base_seed);

}  // namespace pagesel
