#pragma once

// Hybrid extragradient scheme with cutting halfspaces: two prox steps, a
// dual-space average with S, and a sunny generalized nonexpansive retraction
// of x_0 onto C ∩ C_n ∩ D_n.

#include "beq/hybrid.hpp"
#include "beq/iterate.hpp"
#include "beq/problems.hpp"
#include "beq/prox.hpp"
#include "beq/schedule.hpp"
#include "beq/sets.hpp"

#include <cstdint>
#include <optional>

namespace beq {

// Options common to both solvers.
struct LoopOptions {
  int max_outer = 500;
  // y_n = x_n and t_n = x_n (stop at a solution), and |x_{n+1} - x_n| (converged).
  double stop_tol = 1e-9;
  // Grid step applied to x_{n+1} by truncation toward zero.
  std::optional<double> quantization;
  InvariantTolerances invariants;
  RetractionOptions retraction;
  ProxPath prox_path = ProxPath::Auto;
  std::optional<double> prox_tol;
  // Enables the monitors that need a point of the solution set.
  std::optional<PrimalVector> reference_solution;
  // Seed for the sampled A1/A4 admission check.
  std::uint64_t seed = 42;
  int admission_samples = 256;
};

struct ExtragradientConfig {
  Schedule alpha = Schedule::harmonic(0.5, 1.0, 3.0);
  Schedule beta = Schedule::harmonic(1.0 / 3.0, 1.0, 4.0);
  Schedule lambda = Schedule::constant(1.0 / 6.0);
  LoopOptions loop;
};

// Throws MissingConstants when f declares no Lipschitz-type constants and
// ConfigError when a schedule leaves its admissible range.
void validate(const ExtragradientConfig& cfg, const Problem& problem);

struct IterationState {
  int n = 0;
  PrimalVector x0;
  PrimalVector x;
};

struct StepOutcome {
  IterateRecord record;
  // nullopt when the stopping test fired at x_n.
  std::optional<PrimalVector> next;
  // Unquantized retraction output, for the membership checks.
  std::optional<CutResult> cut;
};

StepOutcome eg_iterate(const Problem& problem, const ExtragradientConfig& cfg, const IterationState& state);

SolveResult eg_solve(const Problem& problem, const ExtragradientConfig& cfg, const PrimalVector& x0);

namespace detail {
// Shared outer loop. `step` produces one outcome; the loop applies
// quantization, membership and monotonicity checks, and the stopping rules.
template <class Step>
SolveResult run_loop(const Problem& problem, const LoopOptions& loop, Algorithm algorithm, const PrimalVector& x0,
                     InvariantTracker& tracker, Step&& step);
// x0 in C and f passes the sampled A1/A4 checks at 1e-8.
void require_start(const Problem& problem, const LoopOptions& loop, const PrimalVector& x0);
void check_cut_membership(const Problem& problem, const LoopOptions& loop, InvariantTracker& tracker, int n,
                          const CutResult& cut);
}  // namespace detail

}  // namespace beq

#include "beq/detail/run_loop.hpp"
