#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagesel/ir.hpp"

namespace pagesel {

struct Range {
  uint32_t lo = 1;
  uint32_t hi = 1;
};

/// Seeded random-program spec. The same spec always yields byte-identical
/// text. Call targets are biased toward the caller's cluster so co-location
/// opportunities (and merged relation sets) actually arise.
struct GenSpec {
  uint64_t seed = 0;
  Range funcs{4, 16};
  Range blocks{1, 6};
  Range pti{1, 12};          // words per transparent chunk (ignored when target_size is set)
  double call_density = 0.35;
  double goto_density = 0.3;
  double cluster = 0.7;      // probability a call stays inside the caller's cluster
  uint32_t page_count = 2;
  uint64_t page_size = 0;    // 0 = derive from content and fill factor
  uint32_t psi_cost = 1;
  std::string prevalue;      // decimal literal; empty = default (psi_cost)
  bool acyclic = false;      // forward-only calls and branches
  uint64_t target_size = 0;  // 0 = free; else pad transparent words to this total
  double fill = 0.6;         // capacity fill target when page_size is derived
};

std::string generate(const GenSpec& spec);

/// The fixed 200-program evaluation corpus: master seed 42, 4..16 functions,
/// 2..4 pages, cluster factor 0.7.
std::vector<GenSpec> canonical_corpus(uint32_t count = 200, uint64_t master_seed = 42);

}  // namespace pagesel
