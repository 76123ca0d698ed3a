#pragma once

#include "beq/extragradient.hpp"

namespace beq::detail {

template <class Step>
SolveResult run_loop(const Problem& problem, const LoopOptions& loop, Algorithm algorithm, const PrimalVector& x0,
                     InvariantTracker& tracker, Step&& step) {
  require_start(problem, loop, x0);
  const Geometry& g = problem.geometry;
  SolveResult out;
  out.trace.algorithm = algorithm;
  IterationState state{0, x0, x0};
  out.status = Status::MaxIter;
  out.final_point = x0;
  for (int n = 0; n < loop.max_outer; ++n) {
    state.n = n;
    StepOutcome o = step(state);
    tracker.monotone(n, o.record.monitors.phi_x0_xn);
    out.trace.records.push_back(std::move(o.record));
    if (!o.next) {
      out.status = Status::StoppedAtSolution;
      out.final_point = state.x;
      break;
    }
    if (o.cut) check_cut_membership(problem, loop, tracker, n, *o.cut);
    PrimalVector next = loop.quantization ? quantize_toward_zero(*o.next, *loop.quantization) : *o.next;
    const bool small = g.norm(next - state.x) <= loop.stop_tol;
    state.x = std::move(next);
    out.final_point = state.x;
    if (small) {
      out.status = Status::Converged;
      break;
    }
  }
  out.iterations = static_cast<int>(out.trace.records.size());
  out.worst_slack = tracker.worst_slack();
  out.violations = tracker.violations();
  return out;
}

}  // namespace beq::detail
