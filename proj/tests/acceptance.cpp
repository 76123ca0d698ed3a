// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criteria 1 and 3 compare against printed tables that contain cells
// inconsistent with the recurrence they tabulate. Those criteria report FAIL
// with the offending cells listed; the process exit status is nonzero when
// any criterion fails for a reason other than exactly those known cells, so a
// new mismatch, or a known one going away, is caught either way.

#include "beq/extragradient.hpp"
#include "beq/golden.hpp"
#include "beq/linesearch.hpp"
#include "beq/prox.hpp"
#include "beq/runner.hpp"
#include "oracles.hpp"
#include "samplers.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace beq;
using beq::testing::random_primal;
using beq::testing::uniform;

namespace {

const std::filesystem::path kSource = BEQ_SOURCE_DIR;

// Tolerances pinned by the criteria.
constexpr double kTableTol = 0.01;
constexpr double kTailAbs = 1e-3;
constexpr int kTailBy = 75;
constexpr int kQuantizedBy = 80;
constexpr double kDescentTol = 1e-7;
constexpr double kIdentityTol = 1e-8;
constexpr double kProxTol = 1e-6;
constexpr double kGrid = 1e-3;
constexpr int kProperty7Iters = 200;

using Cell = std::pair<int, std::string>;

struct Verdict {
  bool pass = false;
  std::string detail;
  // Cells of a printed table that disagree with the recurrence; a FAIL that
  // consists of exactly these is the documented outcome.
  std::set<Cell> known_bad;
  std::set<Cell> bad;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cells_text(const std::vector<CellDiff>& cells) {
  std::ostringstream os;
  for (const auto& c : cells) os << " n=" << c.n << " " << c.column << ": table " << c.expected << " vs " << c.actual << ";";
  return os.str();
}

RunConfig quiet_config(const std::string& rel) {
  RunConfig c = load_run_config((kSource / rel).string());
  c.csv_path.reset();
  c.plot_path.reset();
  c.golden_path.reset();
  return c;
}

// Same path as the command-line runner, without its output files.
SolveResult run_config(const RunConfig& c, const RunOverrides& o = {}) {
  RunOutcome out = run(c, o);
  if (!out.result) throw std::runtime_error(out.diagnostic);
  return *out.result;
}

SolveResult run_config(const std::string& rel) { return run_config(quiet_config(rel)); }

Verdict table_rows(const std::string& config, const std::string& table_file, std::set<Cell> known,
                   const std::function<void(const SolveResult&, Verdict&)>& extra = {}) {
  Verdict v;
  v.known_bad = std::move(known);
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult r = run_config(config);
  const double secs = seconds_since(t0);
  GoldenTable table = load_golden((kSource / table_file).string());
  table.tolerance = kTableTol;
  const GoldenReport rep = compare_golden(r.trace, table, std::vector<int>{0, 1, 2, 3});
  for (const auto& c : rep.mismatches()) v.bad.insert({c.n, c.column});
  v.pass = rep.pass() && secs < 1.0;
  std::ostringstream os;
  os << rep.cells.size() - rep.mismatches().size() << "/" << rep.cells.size() << " cells within " << kTableTol
     << ", run " << secs << " s";
  if (!rep.pass()) os << ";" << cells_text(rep.mismatches());
  v.detail = os.str();
  if (!v.detail.empty() && v.detail.back() == ';') v.detail.pop_back();
  if (secs >= 1.0) v.bad.insert({-1, "runtime"});
  if (extra) extra(r, v);
  return v;
}

Verdict criterion1() {
  // z_2 = 39/64 x_2 and y_3 = 3/8 x_3 hold exactly in the scheme; the printed
  // 53.47 and 29.61 do not match the printed x_2 = 87.71 and x_3 = 79.36.
  return table_rows("configs/sec5_extragradient.json", "configs/golden/table1.json", {{2, "z"}, {3, "y"}});
}

Verdict criterion2() {
  Verdict v;
  const RunConfig c = quiet_config("configs/sec5_extragradient.json");
  const SolveResult plain = run_config(c);
  bool tail = false;
  for (const auto& rec : plain.trace.records) {
    if (rec.n <= kTailBy && std::abs(rec.x[0]) <= kTailAbs) tail = true;
  }
  if (plain.trace.records.size() > static_cast<std::size_t>(kTailBy)) {
    tail = tail && std::abs(plain.trace.records[kTailBy].x[0]) <= kTailAbs;
  }
  RunOverrides q;
  q.quantization = 1e-4;
  const SolveResult quant = run_config(c, q);
  int zero_at = -1;
  for (const auto& rec : quant.trace.records) {
    if (rec.x[0] == 0.0) {
      zero_at = rec.n;
      break;
    }
  }
  const double x75 = plain.trace.records.size() > static_cast<std::size_t>(kTailBy)
                         ? plain.trace.records[kTailBy].x[0]
                         : plain.final_point[0];
  v.pass = tail && zero_at >= 0 && zero_at <= kQuantizedBy;
  std::ostringstream os;
  os << "|x_75| = " << std::abs(x75) << " (<= " << kTailAbs << "), quantized x_n = 0 first at n = " << zero_at
     << " (<= " << kQuantizedBy << ")";
  v.detail = os.str();
  return v;
}

Verdict criterion3() {
  // z_1 = 3/4 x_1 exactly; the printed 64.53 does not match x_1 = 86.11.
  return table_rows("configs/sec5_linesearch.json", "configs/golden/table2.json", {{1, "z"}},
                    [](const SolveResult& r, Verdict& v) {
                      bool fixed = true;
                      for (int n = 0; n < 4; ++n) fixed = fixed && std::abs(r.trace.records[n].ls->w[0] + 100.0) <= kTableTol;
                      fixed = fixed && std::abs(r.trace.records[0].t[0] - 72.22) <= kTableTol;
                      if (!fixed) {
                        v.pass = false;
                        v.bad.insert({0, "w/t anchors"});
                      }
                      v.detail += fixed ? "; w_0..w_3 = -100 and t_0 = 72.22 hold" : "; w/t anchors off";
                    });
}

struct Tally {
  int checks = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures;
  void slack(int n, const char* what, std::optional<double> s, double tol) {
    if (!s) {
      failures.push_back(std::string(what) + " missing at n=" + std::to_string(n));
      return;
    }
    ++checks;
    worst = std::min(worst, *s);
    if (*s < -tol) failures.push_back(std::string(what) + " " + std::to_string(*s) + " at n=" + std::to_string(n));
  }
  void truth(int n, const char* what, bool ok) {
    ++checks;
    if (!ok) failures.push_back(std::string(what) + " at n=" + std::to_string(n));
  }
};

Verdict criterion4() {
  Tally t;
  const SolveResult eg = run_config("configs/sec5_extragradient.json");
  for (const auto& r : eg.trace.records) {
    t.slack(r.n, "extragradient descent", r.monitors.lem1_slack, kDescentTol);
    t.slack(r.n, "phi(x*, t) <= phi(x*, x)", r.monitors.lem3_slack, kDescentTol);
  }
  const SolveResult ls = run_config("configs/sec5_linesearch.json");
  for (const auto& r : ls.trace.records) {
    if (r.y_eq_x) continue;
    t.truth(r.n, "f(z_n, x_n) > 0", r.ls->f_zx > 0.0);
    t.truth(r.n, "minimal m", r.ls->minimal_m);
  }
  RunConfig sq = quiet_config("configs/sec5_linesearch.json");
  sq.linesearch.sigma_variant = SigmaVariant::SquaredNorm;
  const SolveResult lsq = run_config(sq);
  for (const auto& r : lsq.trace.records) {
    t.slack(r.n, "phi(x*, w) descent", r.monitors.prop41_slack, kDescentTol);
    t.slack(r.n, "phi(x*, t) descent", r.monitors.prop41_ii_slack, kDescentTol);
    if (!r.y_eq_x) t.truth(r.n, "f(z_n, x_n) > 0 (squared norm)", r.ls->f_zx > 0.0);
  }
  Verdict v;
  v.pass = t.failures.empty() && eg.violations.empty() && ls.violations.empty() && lsq.violations.empty();
  std::ostringstream os;
  os << t.checks << " checks over " << eg.iterations << " + " << ls.iterations << " + " << lsq.iterations
     << " iterations, worst slack " << t.worst;
  for (std::size_t i = 0; i < std::min<std::size_t>(t.failures.size(), 5); ++i) os << "; " << t.failures[i];
  if (t.failures.size() > 5) os << "; " << t.failures.size() - 5 << " more";
  v.detail = os.str();
  return v;
}

Verdict criterion5() {
  std::vector<Geometry> geoms;
  for (Eigen::Index d = 1; d <= 8; ++d) geoms.push_back(Geometry::euclidean(d));
  for (Eigen::Index d = 2; d <= 4; ++d) {
    geoms.push_back(Geometry::lp(d, 1.5));
    geoms.push_back(Geometry::lp(d, 3.0));
  }
  constexpr int kSamples = 10000;
  double worst[5] = {0, 0, 0, 0, 0};
  const char* names[5] = {"sandwich", "three-point", "four-point", "V-inequality", "J round trip"};
  std::mt19937_64 rng(2024);
  for (int family = 0; family < 2; ++family) {
    // Each family (Euclidean, l_p) gets kSamples per identity, spread over its dims.
    std::vector<const Geometry*> fam;
    for (const auto& g : geoms) {
      if ((g.kind() == Geometry::Kind::Euclidean) == (family == 0)) fam.push_back(&g);
    }
    for (int s = 0; s < kSamples; ++s) {
      const Geometry& g = *fam[static_cast<std::size_t>(s) % fam.size()];
      const Eigen::Index d = g.dim();
      const double scale = std::pow(10.0, uniform(rng, -2, 2));
      const PrimalVector x = random_primal(rng, d, scale), y = random_primal(rng, d, scale);
      const PrimalVector z = random_primal(rng, d, scale), w = random_primal(rng, d, scale);
      const double nx = g.norm(x), ny = g.norm(y), nz = g.norm(z), nw = g.norm(w);
      const double mag = 1e-300 + std::pow(nx + ny + nz + nw, 2);
      // Sandwich.
      const double ph = g.phi(x, y);
      const double lo = (nx - ny) * (nx - ny), hi = (nx + ny) * (nx + ny);
      worst[0] = std::max(worst[0], std::max(lo - ph, ph - hi) / mag);
      // Three-point.
      const double three = g.phi(x, z) + g.phi(z, y) + 2 * pairing(x - z, g.duality_map(z) - g.duality_map(y));
      worst[1] = std::max(worst[1], std::abs(ph - three) / mag);
      // Four-point.
      const double lhs4 = 2 * pairing(x - y, g.duality_map(z) - g.duality_map(w));
      const double rhs4 = g.phi(x, w) + g.phi(y, z) - g.phi(x, z) - g.phi(y, w);
      worst[2] = std::max(worst[2], std::abs(lhs4 - rhs4) / mag);
      // V(x, u) + 2 <J^{-1} u - x, v> <= V(x, u + v).
      const DualVector u = g.duality_map(y), dv = g.duality_map(z);
      const double vin = g.lyapunov_v(x, u) + 2 * pairing(g.inverse_duality_map(u) - x, dv) - g.lyapunov_v(x, u + dv);
      worst[3] = std::max(worst[3], vin / mag);
      // J^{-1} J x = x.
      worst[4] = std::max(worst[4], g.norm(g.inverse_duality_map(g.duality_map(x)) - x) / (1e-300 + nx));
    }
  }
  Verdict v;
  v.pass = true;
  std::ostringstream os;
  os << kSamples << " samples per identity per family;";
  for (int i = 0; i < 5; ++i) {
    v.pass = v.pass && worst[i] <= kIdentityTol;
    os << " " << names[i] << " " << worst[i];
  }
  v.detail = os.str();
  return v;
}

Verdict criterion6() {
  std::mt19937_64 rng(606);
  double worst_prox = 0.0;
  int closed = 0, numeric = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = 1 + k % 8;
    Eigen::MatrixXd R(n, n), B(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        R(i, j) = uniform(rng, -1, 1);
        B(i, j) = uniform(rng, -1, 1);
      }
    }
    const Eigen::MatrixXd A = R * R.transpose() / static_cast<double>(n);
    const Bifunction f = quadratic_bifunction(A, B, -A - B);
    // Large box so the stationary point is interior and the closed form applies.
    const ConvexSet C = ConvexSet::box(Eigen::VectorXd::Constant(n, -1e3), Eigen::VectorXd::Constant(n, 1e3));
    const Geometry g = Geometry::euclidean(n);
    ProxRequest rq{f, C, g, random_primal(rng, n, 5.0), random_primal(rng, n, 5.0), uniform(rng, 0.05, 1.0)};
    const ProxResult a = prox(rq);
    if (a.path == ProxPath::ClosedForm) ++closed;
    rq.path = ProxPath::Numeric;
    const ProxResult b = prox(rq);
    if (b.path == ProxPath::Numeric) ++numeric;
    worst_prox = std::max(worst_prox, (a.y - b.y).coords().lpNorm<Eigen::Infinity>());
  }
  double worst_grid = 0.0, worst_phi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    const Geometry g = Geometry::lp(2, k % 5 == 4 ? 3.0 : 1.5);
    const Eigen::Vector2d lo(uniform(rng, -1, 0.5), uniform(rng, -1, 0.5));
    const Box box{lo, lo + Eigen::Vector2d(uniform(rng, 0.1, 0.4), uniform(rng, 0.1, 0.4))};
    const PrimalVector x = random_primal(rng, 2, 1.5);
    const PrimalVector r = sunny_retract(g, ConvexSet(box), x).point;
    const PrimalVector grid = beq::testing::grid_phi_minimizer(g, box, x, kGrid);
    worst_grid = std::max(worst_grid, (r - grid).coords().lpNorm<Eigen::Infinity>());
    worst_phi = std::max(worst_phi, g.phi(r, x) - g.phi(grid, x));
  }
  Verdict v;
  // The grid minimizer sits within one cell of the continuous one per
  // coordinate and can only be worse in phi.
  v.pass = closed == 100 && numeric == 100 && worst_prox <= kProxTol && worst_grid <= kGrid && worst_phi <= 0.0;
  std::ostringstream os;
  os << "prox: " << closed << "/100 closed form, " << numeric << "/100 numeric, worst |closed - numeric| " << worst_prox << "; retraction: worst "
     << "|R x - grid| " << worst_grid << " (step " << kGrid << "), worst phi excess " << worst_phi;
  v.detail = os.str();
  return v;
}

Verdict criterion7() {
  std::mt19937_64 rng(707);
  int violations = 0, instances = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::ostringstream notes;
  for (int k = 0; k < 20; ++k) {
    // f(x, y) = <P x + Q y, y - x> with Q symmetric PSD and P - Q PSD, which
    // is monotone with c1 = c2 = |P - Q| / 2; S x = s x has F(S) = {0} and
    // 0 solves the equilibrium problem, so Omega = {0}.
    Eigen::Matrix2d G, H;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        G(i, j) = uniform(rng, -1, 1);
        H(i, j) = uniform(rng, -1, 1);
      }
    }
    const Eigen::Matrix2d Q = G * G.transpose();
    const Eigen::Matrix2d P = Q + H * H.transpose();
    const Eigen::MatrixXd A = Q, B = P.transpose() - Q, Cm = -P.transpose();
    Bifunction f = quadratic_bifunction(A, B, Cm);
    const double s = uniform(rng, -0.9, 0.9);
    Problem prob{"random_2d", f, scaling_mapping(2, s),
                 ConvexSet::box(Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10)), Geometry::euclidean(2)};
    const PrimalVector x0{uniform(rng, -10, 10), uniform(rng, -10, 10)};
    const double cmax = std::max(f.lipschitz->c1, f.lipschitz->c2);
    ExtragradientConfig eg;
    eg.lambda = Schedule::constant(std::min(0.4 / cmax, 1.0));
    eg.loop.max_outer = kProperty7Iters;
    eg.loop.stop_tol = 0.0;
    eg.loop.reference_solution = PrimalVector::zeros(2);
    LinesearchConfig ls;
    ls.loop = eg.loop;
    for (int alg = 0; alg < 2; ++alg) {
      ++instances;
      const SolveResult r = alg == 0 ? eg_solve(prob, eg, x0) : ls_solve(prob, ls, x0);
      worst = std::min(worst, r.worst_slack);
      if (!r.violations.empty()) {
        violations += static_cast<int>(r.violations.size());
        notes << "; instance " << k << (alg == 0 ? " eg " : " ls ") << r.violations.front().what << " "
              << r.violations.front().value << " at n=" << r.violations.front().n;
      }
    }
  }
  Verdict v;
  v.pass = violations == 0 && worst >= -kDescentTol;
  std::ostringstream os;
  os << instances << " runs of up to " << kProperty7Iters << " iterations, " << violations
     << " violations, worst slack " << worst << notes.str();
  v.detail = os.str();
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, Verdict (*)()> criteria[] = {
      {"1 extragradient table rows 0-3", criterion1},
      {"2 extragradient tail", criterion2},
      {"3 linesearch table rows 0-3", criterion3},
      {"4 per-iteration inequality suite", criterion4},
      {"5 geometry identities", criterion5},
      {"6 oracle equivalence", criterion6},
      {"7 random 2-D invariants", criterion7},
  };
  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("threw: ") + e.what();
    }
    const bool documented = !v.pass && !v.known_bad.empty() && v.bad == v.known_bad;
    if (!v.pass && !documented) ++unexpected;
    if (v.pass && !v.known_bad.empty()) ++unexpected;
    std::printf("%s  criterion %s: %s%s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(),
                documented ? " [known table inconsistency]" : "");
  }
  std::printf("%d unexpected outcome(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
