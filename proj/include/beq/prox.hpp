#pragma once

#include "beq/geometry.hpp"
#include "beq/problems.hpp"
#include "beq/sets.hpp"
#include "beq/vector.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace beq {

enum class ProxPath { Auto, ClosedForm, Numeric };

const char* to_string(ProxPath path);

// argmin_{y in set} lambda f(center, y) + phi(y, anchor) / 2.
// Algorithm steps use center = anchor = x_n for y_n and center = y_n,
// anchor = x_n for z_n.
struct ProxRequest {
  const Bifunction& f;
  const ConvexSet& set;
  const Geometry& geometry;
  PrimalVector anchor;
  PrimalVector center;
  double lambda = 1.0;
  // Certificate tolerance; nullopt picks 1e-10 (Euclidean) or 1e-8 (l_p).
  std::optional<double> tol;
  int max_iters = 100000;
  ProxPath path = ProxPath::Auto;
  // Numeric-path starting point (default: the anchor).
  std::optional<PrimalVector> start;
  int probe_points = 64;
  std::uint64_t seed = 7;
  bool record_history = false;
};

struct ProxResult {
  PrimalVector y;
  double objective = 0.0;
  // Worst normalized violation of
  //   lambda (f(c, y') - f(c, y)) - <J anchor - J y, y' - y> >= 0
  // over the probe points y'.
  double vi_residual = 0.0;
  // lambda f(c, y) + phi(y, anchor) / 2 when center == anchor (<= 0 at optimum).
  std::optional<double> descent_gap;
  int iterations = 0;
  ProxPath path = ProxPath::ClosedForm;
  std::vector<double> objective_history;
};

double default_prox_tol(const Geometry& g);

double prox_objective(const ProxRequest& req, const PrimalVector& y);

// Throws InfeasibleStart when the anchor is outside the set and
// NoConvergence when the numeric path cannot certify its answer.
ProxResult prox(const ProxRequest& req);

}  // namespace beq
