#include "beq/problems.hpp"

#include "beq/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace beq {

namespace {

double matrix_scale(const Eigen::MatrixXd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

std::vector<PrimalVector> draw(const ConvexSet& set, const Geometry& g, std::mt19937_64& rng, int count) {
  return sample_feasible(set, g, rng, count, PrimalVector::zeros(set.dim()), 10.0);
}

}  // namespace

Bifunction quadratic_bifunction(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                                std::optional<LipschitzConstants> lipschitz) {
  const Eigen::Index n = A.rows();
  if (n < 1 || A.cols() != n || B.rows() != n || B.cols() != n || C.rows() != n || C.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "quadratic bifunction needs three square matrices of equal size");
  }
  const double scale = std::max({matrix_scale(A), matrix_scale(B), matrix_scale(C)});
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument, "quadratic bifunction: A must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument, "quadratic bifunction: A must be positive semidefinite");
  }
  const Eigen::MatrixXd total = A + B + C;
  if ((total + total.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument, "quadratic bifunction: f(x, x) = 0 requires A + B + C to vanish as a form");
  }
  if (!lipschitz) {
    const double bnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues()(0);
    lipschitz = LipschitzConstants{bnorm / 2.0, bnorm / 2.0};
  }

  Bifunction f;
  f.name = "quadratic";
  f.dim = n;
  f.lipschitz = lipschitz;
  f.quadratic = Bifunction::Quadratic{A, B, C};
  f.eval = [A, B, C](const PrimalVector& x, const PrimalVector& y) {
    const auto& xv = x.coords();
    const auto& yv = y.coords();
    return yv.dot(A * yv) + xv.dot(B * yv) + xv.dot(C * xv);
  };
  f.subgrad2 = [A, B](const PrimalVector& x, const PrimalVector& y) {
    return DualVector(2.0 * A * y.coords() + B.transpose() * x.coords());
  };
  if (n == 1) {
    const double a = A(0, 0);
    const double b = B(0, 0);
    // 1-D: unconstrained stationary point clamped to the interval.
    f.exact_prox = [a, b](const ProxQuery& q) -> std::optional<PrimalVector> {
      if (q.geometry.kind() != Geometry::Kind::Euclidean) return std::nullopt;
      const auto* box = std::get_if<Box>(&q.set.variant());
      if (!box) return std::nullopt;
      const double y = (q.anchor[0] - q.lambda * b * q.center[0]) / (1.0 + 2.0 * q.lambda * a);
      return PrimalVector{std::clamp(y, box->lo[0], box->hi[0])};
    };
  }
  return f;
}

Bifunction vi_bifunction(Eigen::Index dim, std::function<DualVector(const PrimalVector&)> field,
                         std::optional<LipschitzConstants> lipschitz) {
  Bifunction f;
  f.name = "variational_inequality";
  f.dim = dim;
  f.lipschitz = lipschitz;
  f.eval = [field](const PrimalVector& x, const PrimalVector& y) { return pairing(y - x, field(x)); };
  f.subgrad2 = [field](const PrimalVector& x, const PrimalVector&) { return field(x); };
  return f;
}

Bifunction zero_bifunction(Eigen::Index dim) {
  Bifunction f;
  f.name = "zero";
  f.dim = dim;
  f.lipschitz = LipschitzConstants{0.0, 0.0};
  f.eval = [](const PrimalVector&, const PrimalVector&) { return 0.0; };
  f.subgrad2 = [dim](const PrimalVector&, const PrimalVector&) { return DualVector::zeros(dim); };
  return f;
}

Mapping scaling_mapping(Eigen::Index dim, double scale) {
  Mapping s;
  s.name = "scale";
  s.apply = [scale](const PrimalVector& x) { return scale * x; };
  if (std::abs(scale) < 1.0) s.fixed_points.push_back(PrimalVector::zeros(dim));
  return s;
}

Problem paper_example() { return paper_example_product(1); }

Problem paper_example_product(Eigen::Index dim) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  Bifunction f = quadratic_bifunction(I, 3.0 * I, -4.0 * I, LipschitzConstants{1.5, 1.5});
  f.name = dim == 1 ? "paper_example_sec5" : "paper_example_sec5_product";
  return Problem{f.name, std::move(f), scaling_mapping(dim, 0.2),
                 ConvexSet::box(Eigen::VectorXd::Constant(dim, -100.0), Eigen::VectorXd::Constant(dim, 100.0)),
                 Geometry::euclidean(dim)};
}

bool AssumptionReport::passes(double tol) const {
  if (a1_worst > tol) return false;
  if (a4_worst_slack < -tol) return false;
  if (a5_worst_slack && *a5_worst_slack < -tol) return false;
  return true;
}

AssumptionReport verify_assumptions(const Bifunction& f, const ConvexSet& set, const Geometry& g, int samples,
                                    std::mt19937_64& rng, const AssumptionOptions& opts) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "verify_assumptions needs samples >= 1");
  if (opts.check_a5 && !f.lipschitz) {
    throw Error(ErrorCode::MissingConstants, "A5 check requested but no (c1, c2) declared for " + f.name);
  }
  AssumptionReport rep;
  rep.a4_worst_slack = std::numeric_limits<double>::infinity();
  if (opts.check_a5) rep.a5_worst_slack = std::numeric_limits<double>::infinity();
  int done = 0;
  while (done < samples) {
    const auto pts = draw(set, g, rng, std::min(4 * (samples - done), 4096));
    if (pts.size() < 4) throw Error(ErrorCode::InvalidArgument, "could not sample the feasible set");
    for (std::size_t i = 0; i + 3 < pts.size() && done < samples; i += 4, ++done) {
      const auto& x = pts[i];
      const auto& y = pts[i + 1];
      const auto& yp = pts[i + 2];
      const auto& z = pts[i + 3];
      rep.a1_worst = std::max(rep.a1_worst, std::abs(f(x, x)));
      if (f(x, y) >= 0.0) {
        ++rep.a2_pairs;
        rep.a2_worst = std::max(rep.a2_worst, f(y, x));
      }
      const double a4 = f(x, yp) - f(x, y) - pairing(yp - y, f.subgrad2(x, y));
      rep.a4_worst_slack = std::min(rep.a4_worst_slack, a4);
      if (opts.check_a5) {
        const double a5 = f(x, y) + f(y, z) - f(x, z) + f.lipschitz->c1 * g.phi(y, x) + f.lipschitz->c2 * g.phi(z, y);
        rep.a5_worst_slack = std::min(*rep.a5_worst_slack, a5);
      }
    }
  }
  rep.samples = done;
  return rep;
}

double check_relative_nonexpansive(const Mapping& S, const ConvexSet& set, const Geometry& g, int samples,
                                   std::mt19937_64& rng) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto pts = draw(set, g, rng, samples);
  for (const auto& p : S.fixed_points) {
    for (const auto& x : pts) worst = std::max(worst, g.phi(p, S(x)) - g.phi(p, x));
  }
  return worst;
}

}  // namespace beq
