#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pagesel/ir.hpp"
#include "pagesel/psi.hpp"
#include "pagesel/rng.hpp"

namespace pagesel {

/// Word-addressed program memory image. Functions sit contiguously inside
/// their assigned page in declaration order; no function straddles a page
/// boundary.
struct Image {
  struct Slot {
    Opcode op = Opcode::Ret;
    uint32_t operand = 0;  // Pti: words remaining from this address
    FuncId func = 0;
    BlockId block = 0;
    bool valid = false;
  };

  Config config;
  std::vector<Slot> slots;  // page_count * page_size words
  std::vector<uint64_t> func_base;
  std::vector<std::vector<uint64_t>> block_addr;  // [func][real block]

  uint32_t page_of(uint64_t addr) const { return static_cast<uint32_t>(addr / config.page_size); }
};

Image layout(const OptimizedProgram& o);

struct TraceEvent {
  enum class Kind : uint8_t { Call, Goto, Ret } kind;
  FuncId func;
  BlockId block;

  bool operator==(const TraceEvent&) const = default;
};

struct Trace {
  std::vector<TraceEvent> events;
  uint64_t steps = 0;
  bool halted = false;  // returned from the entry function (vs. step budget)
};

struct PageFault {
  uint64_t addr;
  FuncId func;
  BlockId block;
  uint32_t psr;
  uint32_t expected;
};

/// Branch decisions for conditional gotos. An exhausted source means "fall
/// through".
class DecisionSource {
 public:
  virtual ~DecisionSource() = default;
  virtual std::optional<bool> next() = 0;
};

class BitsSource final : public DecisionSource {
 public:
  explicit BitsSource(std::vector<bool> bits) : bits_(std::move(bits)) {}
  std::optional<bool> next() override {
    if (i_ >= bits_.size()) return std::nullopt;
    return bits_[i_++];
  }

 private:
  std::vector<bool> bits_;
  size_t i_ = 0;
};

class SeededSource final : public DecisionSource {
 public:
  explicit SeededSource(uint64_t seed) : rng_(seed) {}
  std::optional<bool> next() override { return rng_.chance(0.5); }

 private:
  Rng rng_;
};

struct RunResult {
  Trace trace;
  std::optional<PageFault> fault;
};

/// Executes with hardware page semantics: the page-select register starts at
/// the entry function's page, `psi k` writes it, and every taken branch or
/// call checks it against the target's page before loading the program
/// counter. Returns pop a full address, so they are never checked. One step
/// per executed word of transparent code and per branch/call/return; select
/// instructions cost no steps, so equally-seeded runs of differently
/// optimized images of one program truncate at the same logical point.
RunResult run(const Image& img, DecisionSource& decisions, uint64_t max_steps);

/// Event-sequence equality; select executions are invisible by construction.
inline bool equivalent(const Trace& a, const Trace& b) { return a.events == b.events; }

}  // namespace pagesel
