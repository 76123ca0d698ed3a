#include "beq/extragradient.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace beq {

namespace {

double inverse_twice(double c) { return c > 0.0 ? 1.0 / (2.0 * c) : std::numeric_limits<double>::infinity(); }

ProxResult run_prox(const Problem& p, const LoopOptions& loop, const PrimalVector& anchor, const PrimalVector& center,
                    double lambda) {
  ProxRequest req{p.f, p.C, p.geometry, anchor, center, lambda};
  req.tol = loop.prox_tol;
  req.path = loop.prox_path;
  return prox(req);
}

}  // namespace

void validate(const ExtragradientConfig& cfg, const Problem& problem) {
  if (!problem.f.lipschitz) {
    throw Error(ErrorCode::MissingConstants,
                "bifunction '" + problem.f.name + "' declares no Lipschitz-type constants c1, c2");
  }
  const auto [c1, c2] = *problem.f.lipschitz;
  if (c1 < 0.0 || c2 < 0.0) throw Error(ErrorCode::ConfigError, "Lipschitz-type constants must be >= 0");
  require_range(cfg.alpha, "alpha", 0.0, 1.0, true, true);
  require_range(cfg.beta, "beta", 0.0, 1.0, true, true);
  require_range(cfg.lambda, "lambda", 0.0, 1.0, true, false);
  const double cap = std::min(inverse_twice(c1), inverse_twice(c2));
  if (!(cfg.lambda.supremum() < cap)) {
    throw Error(ErrorCode::ConfigError, "lambda supremum " + std::to_string(cfg.lambda.supremum()) +
                                            " must be < min(1/(2 c1), 1/(2 c2)) = " + std::to_string(cap));
  }
  if (cfg.loop.max_outer < 1) throw Error(ErrorCode::ConfigError, "max_outer must be >= 1");
  if (!(cfg.loop.stop_tol >= 0.0)) throw Error(ErrorCode::ConfigError, "stop_tol must be >= 0");
  if (cfg.loop.quantization && !(*cfg.loop.quantization > 0.0)) {
    throw Error(ErrorCode::ConfigError, "quantization step must be > 0");
  }
}

StepOutcome eg_iterate(const Problem& problem, const ExtragradientConfig& cfg, const IterationState& state) {
  const Geometry& g = problem.geometry;
  const LoopOptions& loop = cfg.loop;
  const int n = state.n;
  const PrimalVector& x = state.x;

  StepOutcome out;
  IterateRecord& rec = out.record;
  rec.n = n;
  rec.x = x;
  rec.alpha = cfg.alpha(n);
  rec.beta = cfg.beta(n);
  rec.lambda = cfg.lambda(n);

  const ProxResult py = run_prox(problem, loop, x, x, rec.lambda);
  const ProxResult pz = run_prox(problem, loop, x, py.y, rec.lambda);
  rec.y = py.y;
  rec.z = pz.y;
  rec.prox_path = std::string(to_string(py.path)) + "/" + to_string(pz.path);
  rec.prox_iters = py.iterations + pz.iterations;
  rec.prox_residual = std::max(py.vi_residual, pz.vi_residual);
  rec.t = dual_average(g, problem.S, x, rec.z, rec.alpha, rec.beta);
  rec.y_eq_x = g.norm(rec.y - x) <= loop.stop_tol;
  rec.t_eq_x = g.norm(rec.t - x) <= loop.stop_tol;

  Monitors& m = rec.monitors;
  m.phi_x0_xn = g.phi(state.x0, x);
  if (loop.reference_solution) {
    const PrimalVector& s = *loop.reference_solution;
    const auto [c1, c2] = problem.f.lipschitz.value_or(LipschitzConstants{});
    const double star_x = g.phi(s, x);
    m.phi_star_xn = star_x;
    m.lem1_slack = star_x - (1.0 - 2.0 * rec.lambda * c1) * g.phi(rec.y, x) -
                   (1.0 - 2.0 * rec.lambda * c2) * g.phi(rec.z, rec.y) - g.phi(s, rec.z);
    m.lem3_slack = star_x - g.phi(s, rec.t);
  }

  if (rec.y_eq_x && rec.t_eq_x) return out;

  CutResult cut = cut_and_retract(g, problem.C, state.x0, x, rec.t, loop.retraction);
  rec.retract_residual = cut.report.variational_residual;
  rec.retract_iters = cut.report.iterations;
  if (loop.reference_solution) m.cut_slack = cut_slack(g, cut.cn, cut.dn, *loop.reference_solution);
  out.next = cut.next;
  out.cut = std::move(cut);
  return out;
}

namespace detail {

void require_start(const Problem& problem, const LoopOptions& loop, const PrimalVector& x0) {
  problem.geometry.require_dim(x0.dim(), "x0");
  if (!x0.all_finite()) throw Error(ErrorCode::InvalidArgument, "x0 has non-finite coordinates");
  if (!contains(problem.C, problem.geometry, x0, 1e-12 * (1.0 + problem.geometry.norm(x0)))) {
    throw Error(ErrorCode::InfeasibleStart, "x0 is outside C");
  }
  std::mt19937_64 rng(loop.seed);
  const AssumptionReport rep = verify_assumptions(problem.f, problem.C, problem.geometry, loop.admission_samples, rng,
                                                  AssumptionOptions{.check_a5 = false});
  if (!rep.passes(1e-8)) {
    throw Error(ErrorCode::ConfigError, "bifunction '" + problem.f.name + "' fails A1/A4: |f(x,x)| up to " +
                                            std::to_string(rep.a1_worst) + ", convexity slack " +
                                            std::to_string(rep.a4_worst_slack));
  }
}

void check_cut_membership(const Problem& problem, const LoopOptions& loop, InvariantTracker& tracker, int n,
                          const CutResult& cut) {
  const Geometry& g = problem.geometry;
  const PrimalVector& p = cut.next;
  const double scale = 1.0 + g.norm(p);
  double slack = cut_slack(g, cut.cn, cut.dn, p) / scale;
  if (!contains(problem.C, g, p, loop.invariants.membership * scale)) slack = std::min(slack, -1.0);
  tracker.membership(n, "x_{n+1} in C ∩ C_n ∩ D_n", slack);
}

}  // namespace detail

SolveResult eg_solve(const Problem& problem, const ExtragradientConfig& cfg, const PrimalVector& x0) {
  validate(cfg, problem);
  InvariantTracker tracker(cfg.loop.invariants);
  return detail::run_loop(problem, cfg.loop, Algorithm::Extragradient, x0, tracker, [&](const IterationState& s) {
    StepOutcome o = eg_iterate(problem, cfg, s);
    const Monitors& m = o.record.monitors;
    tracker.descent(s.n, "phi(x*, z) descent", m.lem1_slack);
    tracker.descent(s.n, "phi(x*, t) <= phi(x*, x)", m.lem3_slack);
    tracker.membership(s.n, "x* in C_n ∩ D_n", m.cut_slack);
    return o;
  });
}

}  // namespace beq
