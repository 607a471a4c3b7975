#include "pagesel/pipeline.hpp"

#include <chrono>

#include "pagesel/vm.hpp"

namespace pagesel {

namespace {

class PhaseClock {
 public:
  PhaseClock() : start_(std::chrono::steady_clock::now()) {}

  double lap_ms() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Program parse_with_overrides(std::string_view ir_text, const PipelineOptions& opts) {
  Program p = parse_program(ir_text, {.allow_psi = opts.allow_psi});
  if (opts.pages_override) p.config.page_count = opts.pages_override;
  if (opts.page_size_override) p.config.page_size = opts.page_size_override;
  if (opts.psi_cost_override) {
    p.config.psi_cost = opts.psi_cost_override;
    if (opts.prevalue_override.empty()) p.config.prevalue = Rational(p.config.psi_cost);
  }
  if (!opts.prevalue_override.empty())
    p.config.prevalue = Rational::from_decimal(opts.prevalue_override);
  return p;
}

PipelineResult run_pipeline(std::string_view ir_text, std::string name,
                            const PipelineOptions& opts) {
  PipelineResult r;
  PhaseClock clock;
  PhaseTimings t;

  r.program = parse_with_overrides(ir_text, opts);
  t.parse_ms = clock.lap_ms();

  r.dataflow = solve(r.program);
  r.vop = VopTable(r.program, r.dataflow);
  t.analyze_ms = clock.lap_ms();

  r.frg = build_frg(r.program, r.vop);
  t.frg_ms = clock.lap_ms();

  r.greedy = greedy_partition(r.frg, r.program, {.conservative_size = opts.conservative_size});
  t.partition_ms = clock.lap_ms();

  r.optimized = insert_psi(r.program, r.greedy.assignment, r.vop);
  t.insert_ms = clock.lap_ms();

  r.naive = naive_placement(r.program);
  t.naive_ms = clock.lap_ms();

  r.report = make_report(r.program, std::move(name), r.naive, r.optimized, r.frg, t);
  return r;
}

VerifySummary verify_optimization(const PipelineResult& r, uint32_t streams, uint64_t max_steps,
                                  uint64_t base_seed) {
  VerifySummary s;
  s.streams = streams;
  Image opt = layout(r.optimized);
  Image naive = layout(r.naive);
  for (uint32_t i = 0; i < streams; ++i) {
    const uint64_t seed = mix_seed(base_seed, i);
    SeededSource d1(seed);
    SeededSource d2(seed);
    RunResult a = run(opt, d1, max_steps);
    RunResult b = run(naive, d2, max_steps);
    if (a.fault || b.fault) ++s.faults;
    if (!equivalent(a.trace, b.trace)) ++s.divergences;
  }
  return s;
}

}  // namespace pagesel
