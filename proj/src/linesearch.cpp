#include "beq/linesearch.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beq {

void validate(const LinesearchConfig& cfg, const Problem& problem) {
  const auto c = problem.geometry.uniform_convexity_constant();
  if (!c) {
    throw Error(ErrorCode::ConfigError,
                "geometry has no 2-uniform-convexity constant (l_p with p > 2); supply one explicitly");
  }
  if (!(cfg.armijo_alpha > 0.0 && cfg.armijo_alpha < 1.0)) throw Error(ErrorCode::ConfigError, "armijo alpha must be in (0, 1)");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw Error(ErrorCode::ConfigError, "gamma must be in (0, 1)");
  if (!(cfg.nu > 0.0 && cfg.nu < (*c) * (*c) / 2.0)) {
    throw Error(ErrorCode::ConfigError, "nu must be in (0, c^2/2) = (0, " + std::to_string((*c) * (*c) / 2.0) + ")");
  }
  require_range(cfg.lambda, "lambda", 0.0, 1.0, true, false);
  require_range(cfg.alpha, "alpha", 0.0, 1.0, true, true);
  require_range(cfg.beta, "beta", 0.0, 1.0, true, true);
  if (cfg.m_max < 0) throw Error(ErrorCode::ConfigError, "m_max must be >= 0");
  if (cfg.loop.max_outer < 1) throw Error(ErrorCode::ConfigError, "max_outer must be >= 1");
  if (cfg.loop.quantization && !(*cfg.loop.quantization > 0.0)) {
    throw Error(ErrorCode::ConfigError, "quantization step must be > 0");
  }
}

bool armijo_holds(const Bifunction& f, const Geometry& g, const PrimalVector& x, const PrimalVector& y,
                  double lambda, double alpha, double gamma, int m) {
  const double rho = std::pow(gamma, m);
  const PrimalVector z = (1.0 - rho) * x + rho * y;
  return f(z, x) - f(z, y) >= alpha / (2.0 * lambda) * g.phi(y, x);
}

ArmijoResult armijo_search(const Bifunction& f, const Geometry& g, const PrimalVector& x, const PrimalVector& y,
                           double lambda, double alpha, double gamma, int m_max) {
  if (x == y) throw Error(ErrorCode::InvalidArgument, "armijo_search needs y != x");
  const double rhs = alpha / (2.0 * lambda) * g.phi(y, x);
  double rho = 1.0;
  for (int m = 0; m <= m_max; ++m, rho *= gamma) {
    PrimalVector z = (1.0 - rho) * x + rho * y;
    if (f(z, x) - f(z, y) >= rhs) return ArmijoResult{m, std::move(z), rho};
  }
  throw Error(ErrorCode::LinesearchExhausted, "no m <= " + std::to_string(m_max) + " satisfies the Armijo inequality");
}

GradientStep gradient_step(const Bifunction& f, const Geometry& g, const ConvexSet& C, const PrimalVector& x,
                           const PrimalVector& z, double nu, SigmaVariant variant, bool search_ran,
                           const RetractionOptions& opts) {
  GradientStep out;
  out.g = f.subgrad2(z, x);
  if (!search_ran) {
    out.sigma = 0.0;
    out.w = sunny_retract(g, C, x, opts).point;
    return out;
  }
  const double gn = g.dual_norm(out.g);
  if (!(gn > 1e-14)) throw Error(ErrorCode::ZeroSubgradient, "subgradient of f(z_n, .) at x_n vanishes");
  const double fzx = f(z, x);
  out.sigma = variant == SigmaVariant::SquaredNorm ? nu * fzx / (gn * gn) : nu * fzx / gn;
  out.w = sunny_retract(g, C, g.inverse_duality_map(g.duality_map(x) - out.sigma * out.g), opts).point;
  return out;
}

StepOutcome ls_iterate(const Problem& problem, const LinesearchConfig& cfg, const IterationState& state) {
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

  ProxRequest req{problem.f, problem.C, g, x, x, rec.lambda};
  req.tol = loop.prox_tol;
  req.path = loop.prox_path;
  const ProxResult py = prox(req);
  rec.y = py.y;
  rec.prox_path = to_string(py.path);
  rec.prox_iters = py.iterations;
  rec.prox_residual = py.vi_residual;
  rec.y_eq_x = g.norm(rec.y - x) <= loop.stop_tol;

  LinesearchFields ls;
  ls.sigma_variant = cfg.sigma_variant;
  if (rec.y_eq_x) {
    rec.z = x;
  } else {
    const ArmijoResult a = armijo_search(problem.f, g, x, rec.y, rec.lambda, cfg.armijo_alpha, cfg.gamma, cfg.m_max);
    rec.z = a.z;
    ls.m = a.m;
    ls.rho = a.rho;
    ls.minimal_m = a.m == 0 || !armijo_holds(problem.f, g, x, rec.y, rec.lambda, cfg.armijo_alpha, cfg.gamma, a.m - 1);
  }
  ls.f_zx = problem.f(rec.z, x);
  const GradientStep gs =
      gradient_step(problem.f, g, problem.C, x, rec.z, cfg.nu, cfg.sigma_variant, !rec.y_eq_x, loop.retraction);
  ls.g = gs.g;
  ls.sigma = gs.sigma;
  ls.w = gs.w;
  rec.t = dual_average(g, problem.S, x, ls.w, rec.alpha, rec.beta);
  rec.t_eq_x = g.norm(rec.t - x) <= loop.stop_tol;

  Monitors& m = rec.monitors;
  m.phi_x0_xn = g.phi(state.x0, x);
  if (loop.reference_solution) {
    const PrimalVector& s = *loop.reference_solution;
    const double star_x = g.phi(s, x);
    m.phi_star_xn = star_x;
    m.lem3_slack = star_x - g.phi(s, rec.t);
    const auto c = g.uniform_convexity_constant();
    if (cfg.sigma_variant == SigmaVariant::SquaredNorm && c) {
      const double gn = g.dual_norm(ls.g);
      const double drop = (2.0 / cfg.nu - 4.0 / ((*c) * (*c))) * ls.sigma * ls.sigma * gn * gn;
      m.prop41_slack = star_x - drop - g.phi(s, ls.w);
      m.prop41_ii_slack = star_x - (1.0 - rec.alpha) * drop - g.phi(s, rec.t);
    }
  }
  rec.ls = std::move(ls);

  if (rec.y_eq_x && rec.t_eq_x) return out;

  CutResult cut = cut_and_retract(g, problem.C, state.x0, x, rec.t, loop.retraction);
  rec.retract_residual = cut.report.variational_residual;
  rec.retract_iters = cut.report.iterations;
  if (loop.reference_solution) m.cut_slack = cut_slack(g, cut.cn, cut.dn, *loop.reference_solution);
  out.next = cut.next;
  out.cut = std::move(cut);
  return out;
}

SolveResult ls_solve(const Problem& problem, const LinesearchConfig& cfg, const PrimalVector& x0) {
  validate(cfg, problem);
  InvariantTracker tracker(cfg.loop.invariants);
  return detail::run_loop(problem, cfg.loop, Algorithm::Linesearch, x0, tracker, [&](const IterationState& s) {
    StepOutcome o = ls_iterate(problem, cfg, s);
    const IterateRecord& r = o.record;
    const Monitors& m = r.monitors;
    if (!r.y_eq_x) {
      tracker.check(s.n, "f(z_n, x_n) > 0", r.ls->f_zx, 1e-10);
      if (!r.ls->minimal_m) tracker.fail(s.n, "Armijo m not minimal", static_cast<double>(r.ls->m));
    }
    tracker.descent(s.n, "phi(x*, t) <= phi(x*, x)", m.lem3_slack);
    tracker.descent(s.n, "phi(x*, w) descent", m.prop41_slack);
    tracker.descent(s.n, "phi(x*, t) descent", m.prop41_ii_slack);
    tracker.membership(s.n, "x* in C_n ∩ D_n", m.cut_slack);
    return o;
  });
}

}  // namespace beq
