#include "beq/sets.hpp"

#include "beq/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace beq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Index dim_of(const ConvexSet::Variant& v) {
  struct {
    Eigen::Index operator()(const Box& b) const { return b.lo.size(); }
    Eigen::Index operator()(const PrimalHalfspace& h) const { return h.a.dim(); }
    Eigen::Index operator()(const DualLinearHalfspace& h) const { return h.d.dim(); }
    Eigen::Index operator()(const Intersection& i) const {
      if (i.members.empty()) throw Error(ErrorCode::InvalidArgument, "empty intersection list");
      return i.members.front().dim();
    }
  } visitor;
  return std::visit(visitor, v);
}

void flatten_into(const ConvexSet& s, ConvexSet::Flat& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (!out.box) {
            out.box = v;
          } else {
            out.box->lo = out.box->lo.cwiseMax(v.lo);
            out.box->hi = out.box->hi.cwiseMin(v.hi);
          }
        } else if constexpr (std::is_same_v<T, PrimalHalfspace>) {
          out.primal.push_back(v);
        } else if constexpr (std::is_same_v<T, DualLinearHalfspace>) {
          out.dual.push_back(v);
        } else {
          for (const auto& m : v.members) flatten_into(m, out);
        }
      },
      s.variant());
}

// One linear constraint <a, z> <= b in raw coordinates.
struct Row {
  Eigen::VectorXd a;
  double b;
};

double r_abs_gap(const Row& r, const Eigen::VectorXd& z) { return std::abs(r.a.dot(z) - r.b); }

double scale_of(const Eigen::VectorXd& x, const std::optional<Box>& box, const std::vector<Row>& rows) {
  double s = 1.0;
  if (x.size() > 0) s = std::max(s, x.cwiseAbs().maxCoeff());
  if (box) {
    for (Eigen::Index i = 0; i < box->lo.size(); ++i) {
      if (std::isfinite(box->lo[i])) s = std::max(s, std::abs(box->lo[i]));
      if (std::isfinite(box->hi[i])) s = std::max(s, std::abs(box->hi[i]));
    }
  }
  for (const auto& r : rows) {
    const double an = r.a.norm();
    if (an > 0.0) s = std::max(s, std::abs(r.b) / an);
  }
  return s;
}

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Box& box) { return x.cwiseMax(box.lo).cwiseMin(box.hi); }

// Solve the projection with a fixed active set and check the KKT conditions.
// Box activity is encoded as -1 (lower), +1 (upper), 0 (free).
std::optional<Eigen::VectorXd> kkt_polish(const Eigen::VectorXd& x, const std::optional<Box>& box,
                                          const std::vector<Row>& rows, const std::vector<int>& box_active,
                                          const std::vector<bool>& row_active, double feas_tol) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::VectorXd> m_rows;
  std::vector<double> rhs;
  for (Eigen::Index i = 0; i < n && box; ++i) {
    if (box_active[static_cast<std::size_t>(i)] == 0) continue;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    if (box_active[static_cast<std::size_t>(i)] > 0) {
      e[i] = 1.0;
      m_rows.push_back(e);
      rhs.push_back(box->hi[i]);
    } else {
      e[i] = -1.0;
      m_rows.push_back(e);
      rhs.push_back(-box->lo[i]);
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!row_active[k]) continue;
    m_rows.push_back(rows[k].a);
    rhs.push_back(rows[k].b);
  }
  Eigen::VectorXd z = x;
  if (!m_rows.empty()) {
    const auto k = static_cast<Eigen::Index>(m_rows.size());
    Eigen::MatrixXd m(k, n);
    Eigen::VectorXd c(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      m.row(i) = m_rows[static_cast<std::size_t>(i)].transpose();
      c[i] = rhs[static_cast<std::size_t>(i)];
    }
    const Eigen::MatrixXd gram = m * m.transpose();
    const Eigen::VectorXd mu = gram.completeOrthogonalDecomposition().solve(m * x - c);
    if (!mu.allFinite()) return std::nullopt;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (mu[i] < -feas_tol) return std::nullopt;
    }
    z = x - m.transpose() * mu;
    if ((m * z - c).cwiseAbs().maxCoeff() > feas_tol) return std::nullopt;
  }
  if (box) {
    if ((z - box->hi).maxCoeff() > feas_tol || (box->lo - z).maxCoeff() > feas_tol) return std::nullopt;
    z = clamp(z, *box);
  }
  for (const auto& r : rows) {
    if (r.a.dot(z) - r.b > feas_tol * std::max(1.0, r.a.norm())) return std::nullopt;
  }
  return z;
}

bool feasible(const Eigen::VectorXd& z, const std::optional<Box>& box, const std::vector<Row>& rows, double tol) {
  if (box && ((z - box->hi).maxCoeff() > tol || (box->lo - z).maxCoeff() > tol)) return false;
  for (const auto& r : rows) {
    if (r.a.dot(z) - r.b > tol * std::max(1.0, r.a.norm())) return false;
  }
  return true;
}

void certify_nonempty(const std::optional<Box>& box, const std::vector<Row>& rows, double tol) {
  if (box && (box->lo - box->hi).maxCoeff() > tol) {
    throw Error(ErrorCode::InfeasibleSet, "box bounds cross after intersection");
  }
  for (const auto& r : rows) {
    if (!box) continue;
    double lo = 0.0;
    for (Eigen::Index i = 0; i < r.a.size(); ++i) {
      if (r.a[i] > 0.0) lo += r.a[i] * box->lo[i];
      if (r.a[i] < 0.0) lo += r.a[i] * box->hi[i];
    }
    if (lo > r.b + tol * std::max(1.0, r.a.norm())) {
      throw Error(ErrorCode::InfeasibleSet, "halfspace misses the box");
    }
  }
}

// 1-D sets are intervals; project exactly.
Eigen::VectorXd project_interval(const Eigen::VectorXd& x, const std::optional<Box>& box, const std::vector<Row>& rows,
                                 double tol) {
  double lo = box ? box->lo[0] : -kInf;
  double hi = box ? box->hi[0] : kInf;
  for (const auto& r : rows) {
    const double a = r.a[0];
    if (a > 0.0) hi = std::min(hi, r.b / a);
    if (a < 0.0) lo = std::max(lo, r.b / a);
  }
  if (lo > hi + tol) throw Error(ErrorCode::InfeasibleSet, "interval constraints do not intersect");
  if (lo > hi) lo = hi;
  Eigen::VectorXd z(1);
  z[0] = std::clamp(x[0], lo, hi);
  return z;
}

std::vector<Row> collect_rows(const ConvexSet::Flat& flat, bool dual_as_primal, double tol) {
  std::vector<Row> rows;
  auto push = [&](const Eigen::VectorXd& a, double b) {
    if (a.cwiseAbs().maxCoeff() == 0.0) {
      if (b < -tol) throw Error(ErrorCode::InfeasibleSet, "degenerate halfspace {0 <= b} with b < 0");
      return;
    }
    rows.push_back(Row{a, b});
  };
  for (const auto& h : flat.primal) push(h.a.coords(), h.b);
  if (dual_as_primal) {
    for (const auto& h : flat.dual) push(h.d.coords(), h.r);
  }
  return rows;
}

template <class Set>
double dual_violation(const Geometry& g, const Set& dual, const PrimalVector& z) {
  double worst = 0.0;
  if (dual.empty()) return worst;
  const DualVector jz = g.duality_map(z);
  for (const auto& h : dual) worst = std::max(worst, pairing(h.d, jz) - h.r);
  return worst;
}

}  // namespace

ConvexSet::ConvexSet(Box box) : v_(std::move(box)), dim_(0) {
  const auto& b = std::get<Box>(v_);
  if (b.lo.size() != b.hi.size()) throw Error(ErrorCode::DimensionMismatch, "box lo/hi sizes differ");
  if (b.lo.size() < 1) throw Error(ErrorCode::InvalidArgument, "box must have dimension >= 1");
  if ((b.lo.array() > b.hi.array()).any()) throw Error(ErrorCode::InvalidArgument, "box requires lo <= hi");
  dim_ = dim_of(v_);
}

ConvexSet::ConvexSet(PrimalHalfspace h) : v_(std::move(h)), dim_(dim_of(v_)) {}
ConvexSet::ConvexSet(DualLinearHalfspace h) : v_(std::move(h)), dim_(dim_of(v_)) {}

ConvexSet::ConvexSet(Intersection i) : v_(std::move(i)), dim_(dim_of(v_)) {
  for (const auto& m : std::get<Intersection>(v_).members) {
    if (m.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "intersection members differ in dimension");
  }
}

ConvexSet ConvexSet::box(Eigen::VectorXd lo, Eigen::VectorXd hi) { return ConvexSet(Box{std::move(lo), std::move(hi)}); }

ConvexSet ConvexSet::intersect(std::vector<ConvexSet> members) { return ConvexSet(Intersection{std::move(members)}); }

ConvexSet::Flat ConvexSet::flatten() const {
  Flat out;
  flatten_into(*this, out);
  return out;
}

bool contains(const ConvexSet& set, const Geometry& g, const PrimalVector& x, double tol) {
  g.require_dim(x.dim(), "point");
  if (set.dim() != x.dim()) throw Error(ErrorCode::DimensionMismatch, "set and point dimensions differ");
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return ((x.coords() - v.hi).array() <= tol).all() && ((v.lo - x.coords()).array() <= tol).all();
        } else if constexpr (std::is_same_v<T, PrimalHalfspace>) {
          return pairing(x, v.a) <= v.b + tol;
        } else if constexpr (std::is_same_v<T, DualLinearHalfspace>) {
          return pairing(v.d, g.duality_map(x)) <= v.r + tol;
        } else {
          return std::all_of(v.members.begin(), v.members.end(),
                             [&](const ConvexSet& m) { return contains(m, g, x, tol); });
        }
      },
      set.variant());
}

PrimalHalfspace build_cn(const Geometry& g, const PrimalVector& x_n, const PrimalVector& t_n) {
  const double nx = g.norm(x_n);
  const double nt = g.norm(t_n);
  DualVector a = 2.0 * (g.duality_map(x_n) - g.duality_map(t_n));
  return PrimalHalfspace{std::move(a), nx * nx - nt * nt};
}

DualLinearHalfspace build_dn(const Geometry& g, const PrimalVector& x_0, const PrimalVector& x_n) {
  PrimalVector d = x_0 - x_n;
  const double r = pairing(d, g.duality_map(x_n));
  return DualLinearHalfspace{std::move(d), r};
}

ProjectionResult euclidean_project(const ConvexSet::Flat& flat, const Eigen::VectorXd& x, bool dual_as_primal,
                                   double tol, int max_sweeps) {
  const std::vector<Row> rows = collect_rows(flat, dual_as_primal, tol);
  const auto& box = flat.box;
  const double scale = scale_of(x, box, rows);
  const double feas_tol = tol * scale;
  certify_nonempty(box, rows, feas_tol);

  if (rows.empty()) return {box ? clamp(x, *box) : x, 0};
  if (x.size() == 1) return {project_interval(x, box, rows, feas_tol), 0};
  if (feasible(x, box, rows, 0.0)) return {x, 0};

  // Boyle-Dykstra alternating projections, one increment per piece.
  const std::size_t pieces = rows.size() + (box ? 1 : 0);
  std::vector<Eigen::VectorXd> incr(pieces, Eigen::VectorXd::Zero(x.size()));
  Eigen::VectorXd z = x;
  int next_polish = 1;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const Eigen::VectorXd prev = z;
    // The iterate can sit still for a sweep while the increments are still
    // moving, so both enter the stopping test.
    double incr_change = 0.0;
    std::size_t k = 0;
    if (box) {
      const Eigen::VectorXd y = z + incr[k];
      z = clamp(y, *box);
      incr_change = std::max(incr_change, (y - z - incr[k]).norm());
      incr[k] = y - z;
      ++k;
    }
    for (const auto& r : rows) {
      const Eigen::VectorXd y = z + incr[k];
      const double viol = r.a.dot(y) - r.b;
      z = viol > 0.0 ? Eigen::VectorXd(y - (viol / r.a.squaredNorm()) * r.a) : y;
      incr_change = std::max(incr_change, (y - z - incr[k]).norm());
      incr[k] = y - z;
      ++k;
    }

    const bool converged = (z - prev).norm() <= tol * scale && incr_change <= tol * scale &&
                           feasible(z, box, rows, feas_tol);
    if (sweep == next_polish || converged) {
      next_polish *= 2;
      // Active set guesses: pieces that carry a Dykstra increment, and
      // constraints the iterate sits on.
      for (int guess = 0; guess < 2; ++guess) {
        std::vector<int> box_active(static_cast<std::size_t>(x.size()), 0);
        std::vector<bool> row_active(rows.size(), false);
        const double act_tol = 1e-9 * scale;
        k = 0;
        if (box) {
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            const bool lo_hit = guess == 0 ? incr[0][i] < 0.0 : z[i] - box->lo[i] <= act_tol;
            const bool hi_hit = guess == 0 ? incr[0][i] > 0.0 : box->hi[i] - z[i] <= act_tol;
            box_active[static_cast<std::size_t>(i)] = hi_hit ? 1 : (lo_hit ? -1 : 0);
          }
          ++k;
        }
        for (std::size_t j = 0; j < rows.size(); ++j, ++k) {
          row_active[j] = guess == 0 ? incr[k].squaredNorm() > 0.0
                                     : r_abs_gap(rows[j], z) <= act_tol * std::max(1.0, rows[j].a.norm());
        }
        if (auto polished = kkt_polish(x, box, rows, box_active, row_active, feas_tol)) {
          return {*polished, sweep};
        }
      }
    }
    if (converged) return {z, sweep};
  }
  if (!feasible(z, box, rows, std::sqrt(tol) * scale)) {
    throw Error(ErrorCode::InfeasibleSet, "alternating projections found no feasible point");
  }
  throw Error(ErrorCode::NoConvergence, "alternating projections hit the sweep cap");
}

std::vector<PrimalVector> box_corners(const Box& box) {
  std::vector<PrimalVector> out;
  const Eigen::Index n = box.lo.size();
  if (n > 6 || !box.lo.allFinite() || !box.hi.allFinite()) return out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? box.hi[i] : box.lo[i];
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<PrimalVector> sample_feasible(const ConvexSet& set, const Geometry& g, std::mt19937_64& rng, int count,
                                          const PrimalVector& center, double radius) {
  const ConvexSet::Flat flat = set.flatten();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<PrimalVector> out;
  const Eigen::Index n = set.dim();
  const bool bounded_box = flat.box && flat.box->lo.allFinite() && flat.box->hi.allFinite();
  for (int attempt = 0; attempt < 4 * count && static_cast<int>(out.size()) < count; ++attempt) {
    Eigen::VectorXd y(n);
    if (bounded_box) {
      for (Eigen::Index i = 0; i < n; ++i) y[i] = flat.box->lo[i] + unit(rng) * (flat.box->hi[i] - flat.box->lo[i]);
    } else {
      Eigen::VectorXd dir(n);
      for (Eigen::Index i = 0; i < n; ++i) dir[i] = gauss(rng);
      const double len = dir.norm();
      if (len == 0.0) continue;
      y = center.coords() + (radius * std::pow(unit(rng), 1.0 / static_cast<double>(n)) / len) * dir;
    }
    PrimalVector p(euclidean_project(flat, y, g.is_hilbert(), 1e-12, 10000).point);
    if (dual_violation(g, flat.dual, p) > 0.0) continue;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

struct Residuals {
  double variational = 0.0;
  double optimality = 0.0;
};

Residuals probe_residuals(const Geometry& g, const ConvexSet& set, const PrimalVector& x, const PrimalVector& z,
                          const RetractionOptions& opts) {
  Residuals res;
  const PrimalVector diff = x - z;
  const double diff_norm = g.norm(diff);
  if (diff_norm == 0.0) return res;
  const DualVector jz = g.duality_map(z);
  const DualVector jx = g.duality_map(x);
  std::mt19937_64 rng(opts.seed);
  std::vector<PrimalVector> probes =
      sample_feasible(set, g, rng, opts.probe_points, z, std::max(1.0, 2.0 * diff_norm));
  const auto flat = set.flatten();
  if (flat.box) {
    for (auto& c : box_corners(*flat.box)) {
      if (contains(set, g, c, opts.feasibility_tol)) probes.push_back(std::move(c));
    }
  }
  res.variational = -kInf;
  res.optimality = -kInf;
  for (const auto& y : probes) {
    const DualVector jy_jz = g.duality_map(y) - jz;
    const double v = pairing(diff, jy_jz) / (1.0 + diff_norm * g.dual_norm(jy_jz));
    const PrimalVector yz = y - z;
    const DualVector jx_jz = jx - jz;
    const double o = pairing(yz, jx_jz) / (1.0 + g.norm(yz) * g.dual_norm(jx_jz));
    res.variational = std::max(res.variational, v);
    res.optimality = std::max(res.optimality, o);
  }
  if (probes.empty()) res = Residuals{};
  return res;
}

// Minimize phi(., x) over box + primal halfspaces with dual-linear
// constraints enforced by an augmented Lagrangian. Each inner subproblem is
// solved by projected Newton steps: the model Hessian (duality-map Jacobian
// plus the penalized rows, eigenvalues clamped positive) defines a QP over
// the polyhedral part, solved by a primal active-set method.
PrimalVector retract_iterative(const Geometry& g, const ConvexSet::Flat& flat,
                               const PrimalVector& x, const RetractionOptions& opts, int& iterations) {
  const Eigen::Index n = x.dim();
  std::vector<DualLinearHalfspace> dual;
  for (const auto& h : flat.dual) {
    const double dn = g.norm(h.d);
    if (dn == 0.0) {
      if (h.r < -opts.feasibility_tol) throw Error(ErrorCode::InfeasibleSet, "degenerate dual halfspace with r < 0");
      continue;
    }
    dual.push_back(DualLinearHalfspace{(1.0 / dn) * h.d, h.r / dn});
  }
  // Polyhedral part as rows a^T z <= b (box faces included).
  std::vector<Row> poly;
  if (flat.box) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = 1.0;
      if (std::isfinite(flat.box->hi[i])) poly.push_back(Row{e, flat.box->hi[i]});
      if (std::isfinite(flat.box->lo[i])) poly.push_back(Row{-e, -flat.box->lo[i]});
    }
  }
  for (const auto& h : flat.primal) {
    if (h.a.coords().cwiseAbs().maxCoeff() == 0.0) {
      if (h.b < -opts.feasibility_tol) throw Error(ErrorCode::InfeasibleSet, "degenerate halfspace {0 <= b} with b < 0");
      continue;
    }
    poly.push_back(Row{h.a.coords(), h.b});
  }
  ConvexSet::Flat primal_part = flat;
  primal_part.dual.clear();

  const double s = std::max(1.0, g.norm(x));
  const double s2 = s * s;
  const DualVector jx = g.duality_map(x);

  std::vector<double> mu(dual.size(), 0.0);
  double rho = 10.0;
  auto lagrangian = [&](const PrimalVector& z) {
    const DualVector jz = g.duality_map(z);
    double val = g.phi(z, x) / s2;
    for (std::size_t j = 0; j < dual.size(); ++j) {
      const double c = (pairing(dual[j].d, jz) - dual[j].r) / s;
      const double shifted = std::max(0.0, mu[j] + rho * c);
      val += (shifted * shifted - mu[j] * mu[j]) / (2.0 * rho);
    }
    return val;
  };

  // argmin_y 1/2 (y - y0)^T H (y - y0) over the polyhedron by a primal
  // active-set method started from the feasible point `start`.
  auto qp_project = [&](const Eigen::VectorXd& y0, const Eigen::MatrixXd& H, const Eigen::VectorXd& start) {
    Eigen::VectorXd y = start;
    if (poly.empty()) return Eigen::VectorXd(y0);
    const double ftol = 1e-12 * std::max(1.0, start.cwiseAbs().maxCoeff());
    std::vector<std::size_t> work;
    auto independent = [&](std::size_t i) {
      if (work.size() >= static_cast<std::size_t>(n)) return false;
      Eigen::MatrixXd A(work.size() + 1, n);
      for (std::size_t k = 0; k < work.size(); ++k) A.row(k) = poly[work[k]].a.transpose();
      A.row(work.size()) = poly[i].a.transpose();
      return Eigen::FullPivLU<Eigen::MatrixXd>(A).rank() == static_cast<Eigen::Index>(work.size() + 1);
    };
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (poly[i].a.dot(y) >= poly[i].b - ftol && independent(i)) work.push_back(i);
    }
    const int cap = 10 * static_cast<int>(poly.size() + n) + 50;
    for (int it = 0; it < cap; ++it) {
      const auto m = static_cast<Eigen::Index>(work.size());
      // Null-space solve of the equality subproblem; the full KKT matrix is
      // too badly conditioned once the penalty is large.
      Eigen::MatrixXd At(n, m);
      Eigen::VectorXd bw(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        At.col(k) = poly[work[k]].a;
        bw[k] = poly[work[k]].b;
      }
      Eigen::VectorXd target = y0;
      Eigen::VectorXd lam(m);
      if (m > 0) {
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(At);
        const Eigen::MatrixXd Q = qr.householderQ();
        const Eigen::MatrixXd R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        const Eigen::VectorXd yp = Q.leftCols(m) * R.transpose().triangularView<Eigen::Lower>().solve(bw);
        target = yp;
        if (m < n) {
          const Eigen::MatrixXd Z = Q.rightCols(n - m);
          const Eigen::MatrixXd Hr = Z.transpose() * H * Z;
          target += Z * Hr.ldlt().solve(Z.transpose() * H * (y0 - yp));
        }
        lam = R.triangularView<Eigen::Upper>().solve(Eigen::VectorXd(Q.leftCols(m).transpose() * H * (y0 - target)));
      }
      const Eigen::VectorXd step = target - y;
      if (step.norm() > 1e-15 * std::max(1.0, y.norm())) {
        double t = 1.0;
        std::size_t blocking = poly.size();
        for (std::size_t i = 0; i < poly.size(); ++i) {
          if (std::find(work.begin(), work.end(), i) != work.end()) continue;
          const double ap = poly[i].a.dot(step);
          if (ap <= 1e-13 * poly[i].a.norm() * step.norm()) continue;
          const double ti = std::max(0.0, (poly[i].b - poly[i].a.dot(y)) / ap);
          if (ti < t) {
            t = ti;
            blocking = i;
          }
        }
        y += t * step;
        if (blocking < poly.size()) {
          work.push_back(blocking);
          continue;
        }
      }
      Eigen::Index worst = -1;
      double most = -1e-14 * std::max(1.0, H.norm() * std::max(1.0, y.norm()));
      for (Eigen::Index k = 0; k < m; ++k) {
        if (lam[k] < most) {
          most = lam[k];
          worst = k;
        }
      }
      if (worst < 0) return y;
      work.erase(work.begin() + worst);
    }
    // Degenerate cycling: y is feasible and no worse than the start, which is
    // all the outer line search needs.
    return y;
  };
  // Gradient of <d, J z> is DJ(z) d; its derivative by central differences.
  auto constraint_hessian = [&](const PrimalVector& z, const PrimalVector& d) {
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(z[k]));
      PrimalVector zp = z, zm = z;
      zp[k] += step;
      zm[k] -= step;
      h.col(k) = (g.duality_jacobian(zp) * d.coords() - g.duality_jacobian(zm) * d.coords()) / (2.0 * step);
    }
    return Eigen::MatrixXd(0.5 * (h + h.transpose()));
  };

  PrimalVector z(euclidean_project(primal_part, x.coords(), false, 1e-14, 20000).point);
  double prev_kkt = kInf;
  double prev_violation = kInf;
  iterations = 0;
  for (int outer = 0; outer < 100; ++outer) {
    for (int inner = 0; inner < 200; ++inner) {
      if (++iterations > opts.max_iters) throw Error(ErrorCode::NoConvergence, "retraction hit the iteration cap");
      const DualVector jz = g.duality_map(z);
      const Eigen::MatrixXd dj = g.duality_jacobian(z);
      Eigen::VectorXd grad = (2.0 / s2) * (jz - jx).coords();
      Eigen::MatrixXd H = (2.0 / s2) * dj;
      for (std::size_t j = 0; j < dual.size(); ++j) {
        const double c = (pairing(dual[j].d, jz) - dual[j].r) / s;
        const double shifted = std::max(0.0, mu[j] + rho * c);
        if (shifted > 0.0) {
          const Eigen::VectorXd v = dj * dual[j].d.coords() / s;
          grad += shifted * v;
          H += rho * v * v.transpose() + (shifted / s) * constraint_hessian(z, dual[j].d);
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
      if (eig.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "retraction model eigensolve failed");
      const double top = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(1e-10 * top);
      const Eigen::MatrixXd& V = eig.eigenvectors();
      const Eigen::MatrixXd Hpd = V * lam.asDiagonal() * V.transpose();
      const Eigen::VectorXd newton = V * (V.transpose() * grad).cwiseQuotient(lam);
      const Eigen::VectorXd y = qp_project(z.coords() - newton, Hpd, z.coords());
      const Eigen::VectorXd dir = y - z.coords();
      const double slope = grad.dot(dir);
      if (dir.norm() <= 1e-15 * s || slope >= 0.0) break;
      const double val = lagrangian(z);
      double t = 1.0;
      PrimalVector next;
      for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
        next = PrimalVector(Eigen::VectorXd(z.coords() + t * dir));
        if (lagrangian(next) <= val + 1e-4 * t * slope) break;
      }
      const double move = (next.coords() - z.coords()).norm();
      z = std::move(next);
      if (move <= 1e-14 * s) break;
    }
    if (dual.empty()) return z;
    const DualVector jz = g.duality_map(z);
    double violation = 0.0;
    // max over rows of |max(c, -mu / rho)|: zero exactly at a KKT point of
    // the constrained problem (feasible and complementary).
    double kkt = 0.0;
    for (std::size_t j = 0; j < dual.size(); ++j) {
      const double c = (pairing(dual[j].d, jz) - dual[j].r) / s;
      violation = std::max(violation, c);
      kkt = std::max(kkt, std::abs(std::max(c, -mu[j] / rho)));
      mu[j] = std::max(0.0, mu[j] + rho * c);
    }
    if (violation <= opts.feasibility_tol && kkt <= 1e-2 * opts.feasibility_tol) return z;
    if (kkt > 0.25 * prev_kkt) {
      if (rho >= 1e8 && violation > 0.99 * prev_violation && violation > std::sqrt(opts.feasibility_tol)) {
        throw Error(ErrorCode::InfeasibleSet, "augmented Lagrangian stalled at constraint violation " +
                                                  std::to_string(violation));
      }
      rho = std::min(rho * 10.0, 1e8);
    }
    prev_kkt = std::max(kkt, 1e-300);
    prev_violation = std::max(violation, 1e-300);
  }
  const double left = dual_violation(g, dual, z);
  if (left > std::sqrt(opts.feasibility_tol) * s) {
    throw Error(ErrorCode::InfeasibleSet, "constraint violation " + std::to_string(left) +
                                              " persists at the maximal penalty");
  }
  if (left > opts.feasibility_tol * s) {
    throw Error(ErrorCode::NoConvergence, "augmented Lagrangian did not reach feasibility");
  }
  return z;
}

}  // namespace

RetractionReport sunny_retract(const Geometry& g, const ConvexSet& set, const PrimalVector& x,
                               const RetractionOptions& opts) {
  g.require_dim(x.dim(), "point");
  if (set.dim() != x.dim()) throw Error(ErrorCode::DimensionMismatch, "set and point dimensions differ");
  RetractionReport rep;
  if (contains(set, g, x, 0.0)) {
    rep.point = x;
    return rep;
  }
  const ConvexSet::Flat flat = set.flatten();
  if (g.is_hilbert()) {
    ProjectionResult pr = euclidean_project(flat, x.coords(), true, opts.tol, opts.max_sweeps);
    rep.point = PrimalVector(std::move(pr.point));
    rep.iterations = pr.sweeps;
  } else {
    int iters = 0;
    rep.point = retract_iterative(g, flat, x, opts, iters);
    rep.iterations = iters;
  }
  rep.phi_value = g.phi(rep.point, x);
  const Residuals r = probe_residuals(g, set, x, rep.point, opts);
  rep.variational_residual = r.variational;
  rep.optimality_residual = r.optimality;
  return rep;
}

}  // namespace beq
