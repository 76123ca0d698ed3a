#pragma once

#include "beq/vector.hpp"

#include <optional>
#include <string>
#include <vector>

namespace beq {

enum class Algorithm { Extragradient, Linesearch };
enum class Status { StoppedAtSolution, Converged, MaxIter };
enum class SigmaVariant { SquaredNorm, ExampleNorm };

const char* to_string(Algorithm a);
const char* to_string(Status s);
const char* to_string(SigmaVariant v);

// Quantities that need a reference solution x*.
struct Monitors {
  double phi_x0_xn = 0.0;
  std::optional<double> phi_star_xn;
  // phi(x*, x) - (1 - 2 lambda c1) phi(y, x) - (1 - 2 lambda c2) phi(z, y) - phi(x*, z)
  std::optional<double> lem1_slack;
  // phi(x*, x) - phi(x*, t)
  std::optional<double> lem3_slack;
  // min over the two cuts of (rhs - lhs) at x*
  std::optional<double> cut_slack;
  // phi(x*, x) - (2/nu - 4/c^2) sigma^2 |g|^2 - phi(x*, w)   (squared-norm sigma only)
  std::optional<double> prop41_slack;
  // phi(x*, x) - (1 - alpha) (2/nu - 4/c^2) sigma^2 |g|^2 - phi(x*, t)
  std::optional<double> prop41_ii_slack;
};

struct LinesearchFields {
  PrimalVector w;
  DualVector g;
  double sigma = 0.0;
  // -1 when y = x and no search ran.
  int m = -1;
  double rho = 0.0;
  double f_zx = 0.0;
  // Armijo inequality fails at m - 1 (vacuous for m <= 0).
  bool minimal_m = true;
  SigmaVariant sigma_variant = SigmaVariant::SquaredNorm;
};

struct IterateRecord {
  int n = 0;
  PrimalVector x, y, z, t;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  Monitors monitors;
  bool y_eq_x = false;
  bool t_eq_x = false;
  // Retraction of x0 onto C ∩ C_n ∩ D_n; empty on the stopping iterate.
  double retract_residual = 0.0;
  int retract_iters = 0;
  // "closed_form/numeric" for the y and z subproblems.
  std::string prox_path;
  int prox_iters = 0;
  double prox_residual = 0.0;
  std::optional<LinesearchFields> ls;
};

struct Trace {
  Algorithm algorithm = Algorithm::Extragradient;
  std::vector<IterateRecord> records;
};

struct Violation {
  int n = 0;
  std::string what;
  double value = 0.0;
};

struct SolveResult {
  Trace trace;
  Status status = Status::MaxIter;
  PrimalVector final_point;
  int iterations = 0;
  // Smallest slack over every monitored inequality (+inf when nothing was
  // monitored).
  double worst_slack = 0.0;
  std::vector<Violation> violations;
};

}  // namespace beq
