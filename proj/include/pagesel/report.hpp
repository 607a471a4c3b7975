#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagesel/frg.hpp"
#include "pagesel/partition.hpp"
#include "pagesel/psi.hpp"
#include "pagesel/rational.hpp"

namespace pagesel {

struct PhaseTimings {
  double parse_ms = 0;
  double analyze_ms = 0;
  double frg_ms = 0;
  double partition_ms = 0;
  double insert_ms = 0;
  double naive_ms = 0;
};

/// Per-program evaluation record: naive versus optimized size, select
/// counts, weight bookkeeping, page occupancy. Serialization is stable so
/// identical inputs give byte-identical reports (timings carry wall-clock
/// noise and are excluded from that guarantee by consumers).
struct Report {
  std::string program;
  uint32_t nof = 0;
  uint64_t s_naive = 0;
  uint64_t s_opt = 0;
  uint32_t psi_naive = 0;
  uint32_t psi_opt = 0;
  double ratio = 1.0;  // s_opt / s_naive
  Rational frg_total;
  Rational residual;
  Rational saved;
  std::vector<std::pair<uint64_t, uint64_t>> pages;  // used/capacity, optimized layout
  std::vector<std::string> func_names;
  std::vector<uint32_t> func_page;
  PhaseTimings timings;
};

Report make_report(const Program& p, std::string name, const OptimizedProgram& naive,
                   const OptimizedProgram& opt, const Frg& frg, const PhaseTimings& timings);

/// Fixed key order, schema field first; "timings_ms" is the only
/// nondeterministic section.
std::string report_to_json(const Report& r);

/// Merges per-program report documents (as emitted by report_to_json) into a
/// corpus summary with the unweighted arithmetic mean of the per-program
/// ratios. Order follows the input order.
std::string merge_reports(const std::vector<std::string>& report_docs);

}  // namespace pagesel
