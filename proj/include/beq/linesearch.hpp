#pragma once

// Hybrid scheme with an Armijo-type linesearch: one prox step, a backtracking
// search along [x_n, y_n], a projected subgradient step for f(z_n, .), a
// dual-space average with S, and the same cut-and-retract update as the
// extragradient scheme.

#include "beq/extragradient.hpp"

namespace beq {

struct LinesearchConfig {
  // Armijo parameter alpha in (0, 1); per-step factor gamma in (0, 1).
  double armijo_alpha = 0.5;
  double gamma = 0.2;
  // 0 < nu < c^2 / 2 for the 2-uniform-convexity constant c.
  double nu = 0.25;
  Schedule lambda = Schedule::constant(0.5);
  Schedule alpha = Schedule::harmonic(0.5, 1.0, 3.0);
  Schedule beta = Schedule::harmonic(1.0 / 3.0, 1.0, 4.0);
  int m_max = 60;
  SigmaVariant sigma_variant = SigmaVariant::SquaredNorm;
  LoopOptions loop;
};

// Throws ConfigError for out-of-range parameters and for geometries without a
// 2-uniform-convexity constant (l_p with p > 2 unless c is supplied).
void validate(const LinesearchConfig& cfg, const Problem& problem);

struct ArmijoResult {
  int m = 0;
  PrimalVector z;
  double rho = 1.0;
};

// Smallest m in [0, m_max] with
//   f(z_m, x) - f(z_m, y) >= alpha / (2 lambda) phi(y, x),  z_m = (1 - gamma^m) x + gamma^m y.
// Requires y != x. Throws LinesearchExhausted when no m <= m_max qualifies.
ArmijoResult armijo_search(const Bifunction& f, const Geometry& g, const PrimalVector& x, const PrimalVector& y,
                           double lambda, double alpha, double gamma, int m_max);

// Armijo inequality at a given m (for minimality checks).
bool armijo_holds(const Bifunction& f, const Geometry& g, const PrimalVector& x, const PrimalVector& y,
                  double lambda, double alpha, double gamma, int m);

struct GradientStep {
  DualVector g;
  double sigma = 0.0;
  PrimalVector w;
};

// w = R_C J^{-1}(J x - sigma g) with g in the subdifferential of f(z, .) at x.
// sigma = nu f(z, x) / |g|_*^2 (squared_norm) or nu f(z, x) / |g|_* (example_norm).
// With `search_ran` false (y = x) sigma = 0 and w = R_C x. Throws
// ZeroSubgradient when the search ran and |g|_* vanishes.
GradientStep gradient_step(const Bifunction& f, const Geometry& g, const ConvexSet& C, const PrimalVector& x,
                           const PrimalVector& z, double nu, SigmaVariant variant, bool search_ran,
                           const RetractionOptions& opts = {});

StepOutcome ls_iterate(const Problem& problem, const LinesearchConfig& cfg, const IterationState& state);

SolveResult ls_solve(const Problem& problem, const LinesearchConfig& cfg, const PrimalVector& x0);

}  // namespace beq
