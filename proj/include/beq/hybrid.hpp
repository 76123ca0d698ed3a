#pragma once

// Machinery shared by both solvers: the dual-space averaging step, the
// C_n ∩ D_n cut with retraction of x_0, iterate quantization, and the
// invariant bookkeeping.

#include "beq/geometry.hpp"
#include "beq/iterate.hpp"
#include "beq/problems.hpp"
#include "beq/sets.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace beq {

// J^{-1}(alpha J x + (1 - alpha)(beta J v + (1 - beta) J S v))
PrimalVector dual_average(const Geometry& g, const Mapping& S, const PrimalVector& x, const PrimalVector& v,
                          double alpha, double beta);

struct CutResult {
  PrimalVector next;
  PrimalHalfspace cn;
  DualLinearHalfspace dn;
  RetractionReport report;
};

// x_{n+1} = R_{C ∩ C_n ∩ D_n} x_0. An empty cut surfaces as InfeasibleCut.
CutResult cut_and_retract(const Geometry& g, const ConvexSet& C, const PrimalVector& x0, const PrimalVector& xn,
                          const PrimalVector& tn, const RetractionOptions& opts);

// Truncates every coordinate toward zero onto the grid step * Z. Values
// within 1e-9 grid units of a grid point snap to it first.
PrimalVector quantize_toward_zero(const PrimalVector& x, double step);

struct InvariantTolerances {
  // Descent inequalities.
  double descent = 1e-7;
  // Cut membership of x_{n+1} and of x*.
  double membership = 1e-8;
  // phi(x0, x_n) nondecreasing.
  double monotone = 1e-9;
};

class InvariantTracker {
 public:
  explicit InvariantTracker(InvariantTolerances tol) : tol_(tol) {}

  void descent(int n, const char* what, std::optional<double> slack) { check(n, what, slack, tol_.descent); }
  void membership(int n, const char* what, std::optional<double> slack) { check(n, what, slack, tol_.membership); }
  void monotone(int n, double phi_x0_xn);
  void check(int n, const char* what, std::optional<double> slack, double tol);
  void fail(int n, const std::string& what, double value) { violations_.push_back({n, what, value}); }

  double worst_slack() const { return worst_; }
  const std::vector<Violation>& violations() const { return violations_; }
  const InvariantTolerances& tolerances() const { return tol_; }

 private:
  InvariantTolerances tol_;
  double worst_ = std::numeric_limits<double>::infinity();
  std::optional<double> last_phi_;
  std::vector<Violation> violations_;
};

// Slack of x* in the two cuts: min(b - <x*, a>, r - <d, J x*>).
double cut_slack(const Geometry& g, const PrimalHalfspace& cn, const DualLinearHalfspace& dn, const PrimalVector& p);

}  // namespace beq
