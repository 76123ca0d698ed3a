#include "beq/prox.hpp"

#include "beq/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace beq {

namespace {

// Projection used by the numeric path. In Hilbert geometry the retraction is
// the metric projection; otherwise project metrically onto the (primal
// convex) feasible set.
PrimalVector project(const ProxRequest& req, const ConvexSet::Flat& flat, const PrimalVector& v) {
  if (req.geometry.is_hilbert()) return sunny_retract(req.geometry, req.set, v).point;
  return PrimalVector(euclidean_project(flat, v.coords(), false, 1e-13, 10000).point);
}

double certificate(const ProxRequest& req, const PrimalVector& y) {
  const Geometry& g = req.geometry;
  std::mt19937_64 rng(req.seed);
  const double radius = std::max(1.0, 2.0 * g.norm(y - req.anchor));
  std::vector<PrimalVector> probes = sample_feasible(req.set, g, rng, req.probe_points, y, radius);
  const auto flat = req.set.flatten();
  if (flat.box) {
    for (auto& c : box_corners(*flat.box)) probes.push_back(std::move(c));
  }
  probes.push_back(req.anchor);
  const DualVector ja_jy = g.duality_map(req.anchor) - g.duality_map(y);
  const double fy = req.lambda * req.f(req.center, y);
  double worst = 0.0;
  for (const auto& yp : probes) {
    if (!contains(req.set, g, yp, 1e-9)) continue;
    const double fyp = req.lambda * req.f(req.center, yp);
    const double lin = pairing(yp - y, ja_jy);
    const double val = (fyp - fy) - lin;
    const double norm = 1.0 + std::abs(fyp) + std::abs(fy) + std::abs(lin);
    worst = std::max(worst, -val / norm);
  }
  return worst;
}

std::optional<PrimalVector> closed_form(const ProxRequest& req) {
  if (req.f.exact_prox) {
    if (auto y = req.f.exact_prox(ProxQuery{req.center, req.anchor, req.lambda, req.set, req.geometry})) return y;
  }
  if (req.f.quadratic && req.geometry.kind() == Geometry::Kind::Euclidean) {
    const auto& q = *req.f.quadratic;
    const Eigen::Index n = q.A.rows();
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) + req.lambda * (q.A + q.A.transpose());
    const Eigen::VectorXd rhs = req.anchor.coords() - req.lambda * q.B.transpose() * req.center.coords();
    PrimalVector y(lhs.ldlt().solve(rhs));
    // Clamping is not exact beyond 1-D; only accept interior solutions.
    if (y.all_finite() && contains(req.set, req.geometry, y, 0.0)) return y;
  }
  return std::nullopt;
}

PrimalVector numeric_smooth(const ProxRequest& req, const PrimalVector& start, int& iterations,
                            std::vector<double>* history) {
  const Geometry& g = req.geometry;
  const auto flat = req.set.flatten();
  const DualVector ja = g.duality_map(req.anchor);
  auto grad = [&](const PrimalVector& y) {
    return DualVector(req.lambda * req.f.subgrad2(req.center, y) + (g.duality_map(y) - ja));
  };
  PrimalVector y = project(req, flat, start);
  double hy = prox_objective(req, y);
  if (history) history->push_back(hy);
  const double g0 = g.dual_norm(req.f.subgrad2(req.center, req.center));
  double step = 1.0 / (1.0 + req.lambda * g0);
  const double scale = std::max({g.norm(req.anchor), g.norm(req.center), g.norm(y), 1e-300});
  for (iterations = 1; iterations <= req.max_iters; ++iterations) {
    const DualVector gr = grad(y);
    PrimalVector next;
    double hn = 0.0;
    double trial = std::min(2.0 * step, 1e6);
    double diff = 0.0;
    for (int bt = 0; bt < 100; ++bt) {
      next = project(req, flat, PrimalVector(y.coords() - trial * gr.coords()));
      const Eigen::VectorXd dy = next.coords() - y.coords();
      hn = prox_objective(req, next);
      diff = hn - hy;
      // Near the minimizer the two objective values agree to rounding; the
      // trapezoid rule on the gradients resolves their difference.
      if (std::abs(diff) <= 1e-10 * (1.0 + std::abs(hy))) diff = 0.5 * (gr + grad(next)).coords().dot(dy);
      if (diff <= gr.coords().dot(dy) + dy.squaredNorm() / (2.0 * trial)) break;
      trial *= 0.5;
    }
    step = trial;
    const double move = (next.coords() - y.coords()).norm();
    if (diff > 0.0) break;
    y = std::move(next);
    hy = hn;
    if (history) history->push_back(hy);
    if (move <= 1e-15 * scale) break;
  }
  return y;
}

PrimalVector numeric_subgradient(const ProxRequest& req, const PrimalVector& start, int& iterations,
                                 std::vector<double>* history) {
  const Geometry& g = req.geometry;
  const auto flat = req.set.flatten();
  const DualVector ja = g.duality_map(req.anchor);
  const double g0 = g.dual_norm(req.f.subgrad2(req.center, req.center));
  const double s0 = 1.0 / (1.0 + req.lambda * g0);
  PrimalVector y = project(req, flat, start);
  PrimalVector best = y;
  double best_h = prox_objective(req, y);
  if (history) history->push_back(best_h);
  for (iterations = 1; iterations <= req.max_iters; ++iterations) {
    const DualVector gr(req.lambda * req.f.subgrad2(req.center, y) + (g.duality_map(y) - ja));
    const double s = s0 / (1.0 + static_cast<double>(iterations - 1));
    PrimalVector next = project(req, flat, PrimalVector(y.coords() - s * gr.coords()));
    const double move = (next.coords() - y.coords()).norm();
    y = std::move(next);
    const double h = prox_objective(req, y);
    if (h < best_h) {
      best_h = h;
      best = y;
    }
    if (history) history->push_back(best_h);
    if (move <= 1e-12) break;
  }
  return best;
}

}  // namespace

const char* to_string(ProxPath path) {
  switch (path) {
    case ProxPath::Auto: return "auto";
    case ProxPath::ClosedForm: return "closed_form";
    case ProxPath::Numeric: return "numeric";
  }
  return "unknown";
}

double default_prox_tol(const Geometry& g) { return g.kind() == Geometry::Kind::Euclidean ? 1e-10 : 1e-8; }

double prox_objective(const ProxRequest& req, const PrimalVector& y) {
  return req.lambda * req.f(req.center, y) + 0.5 * req.geometry.phi(y, req.anchor);
}

ProxResult prox(const ProxRequest& req) {
  const Geometry& g = req.geometry;
  g.require_dim(req.anchor.dim(), "prox anchor");
  g.require_dim(req.center.dim(), "prox center");
  if (!(req.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox requires lambda > 0");
  const double tol = req.tol.value_or(default_prox_tol(g));
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox requires tol > 0");
  if (!req.anchor.all_finite() || !req.center.all_finite()) {
    throw Error(ErrorCode::InvalidArgument, "prox inputs must be finite");
  }
  const double scale = std::max(1.0, req.anchor.coords().cwiseAbs().maxCoeff());
  if (!contains(req.set, g, req.anchor, 1e-8 * scale)) {
    throw Error(ErrorCode::InfeasibleStart, "prox anchor lies outside the feasible set");
  }
  if (!g.is_hilbert() && !req.set.flatten().dual.empty()) {
    throw Error(ErrorCode::InvalidArgument, "prox feasible set must be convex in primal coordinates");
  }

  ProxResult res;
  std::optional<PrimalVector> y;
  if (req.path != ProxPath::Numeric) {
    y = closed_form(req);
    if (!y && req.path == ProxPath::ClosedForm) {
      throw Error(ErrorCode::InvalidArgument, "no closed form available for this prox request");
    }
    res.path = ProxPath::ClosedForm;
  }
  if (!y) {
    res.path = ProxPath::Numeric;
    std::vector<double>* hist = req.record_history ? &res.objective_history : nullptr;
    const PrimalVector start = req.start.value_or(req.anchor);
    y = req.f.differentiable_in_y ? numeric_smooth(req, start, res.iterations, hist)
                                  : numeric_subgradient(req, start, res.iterations, hist);
  }
  res.y = std::move(*y);
  res.objective = prox_objective(req, res.y);
  res.vi_residual = certificate(req, res.y);
  if (req.center == req.anchor) res.descent_gap = res.objective;
  if (res.vi_residual > tol) {
    throw Error(ErrorCode::NoConvergence, "prox certificate residual " + std::to_string(res.vi_residual) +
                                              " above tolerance " + std::to_string(tol));
  }
  return res;
}

}  // namespace beq
