#include "beq/geometry.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace beq {

namespace {

// Duality map of l_r applied to raw coordinates: n * (|v_i| / n)^(r-1) * sign(v_i).
Eigen::VectorXd lr_duality(const Eigen::VectorXd& v, double r) {
  const double n = lr_norm(v, r);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  if (n == 0.0) return out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a == 0.0) continue;
    out[i] = std::copysign(n * std::pow(a / n, r - 1.0), v[i]);
  }
  return out;
}

}  // namespace

double lr_norm(const Eigen::VectorXd& v, double r) {
  if (v.size() == 0) return 0.0;
  if (r == 2.0) return v.stableNorm();
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, r);
  return m * std::pow(s, 1.0 / r);
}

Geometry::Geometry(Kind kind, Eigen::Index dim, double p, std::optional<double> c)
    : kind_(kind), dim_(dim), p_(p), q_(p / (p - 1.0)), c_(c) {}

Geometry Geometry::euclidean(Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "geometry dimension must be >= 1");
  return Geometry(Kind::Euclidean, dim, 2.0, 1.0);
}

Geometry Geometry::lp(Eigen::Index dim, double p, std::optional<double> c) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "geometry dimension must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidArgument, "l_p exponent must lie in (1, inf), got " + std::to_string(p));
  }
  if (c) {
    if (!(*c > 0.0 && *c <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "2-uniform-convexity constant must lie in (0, 1]");
    }
  } else if (p <= 2.0) {
    c = std::sqrt(p - 1.0);
  }
  return Geometry(Kind::Lp, dim, p, c);
}

Geometry Geometry::with_identity_tol(double tol) const {
  Geometry g = *this;
  g.identity_tol_ = tol;
  return g;
}

void Geometry::require_dim(Eigen::Index n, const char* what) const {
  if (n != dim_) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has dimension " + std::to_string(n) +
                                                  ", geometry has " + std::to_string(dim_));
  }
}

double Geometry::norm(const PrimalVector& x) const {
  require_dim(x.dim(), "vector");
  return lr_norm(x.coords(), p_);
}

double Geometry::dual_norm(const DualVector& u) const {
  require_dim(u.dim(), "functional");
  return lr_norm(u.coords(), q_);
}

DualVector Geometry::duality_map(const PrimalVector& x) const {
  require_dim(x.dim(), "vector");
  if (kind_ == Kind::Euclidean || p_ == 2.0) return DualVector(x.coords());
  return DualVector(lr_duality(x.coords(), p_));
}

PrimalVector Geometry::inverse_duality_map(const DualVector& u) const {
  require_dim(u.dim(), "functional");
  if (kind_ == Kind::Euclidean || p_ == 2.0) return PrimalVector(u.coords());
  return PrimalVector(lr_duality(u.coords(), q_));
}

double Geometry::phi(const PrimalVector& x, const PrimalVector& y) const {
  require_dim(x.dim(), "vector");
  require_dim(y.dim(), "vector");
  if (kind_ == Kind::Euclidean) return (x.coords() - y.coords()).squaredNorm();
  const double nx = norm(x);
  const double ny = norm(y);
  const double v = nx * nx - 2.0 * pairing(x, duality_map(y)) + ny * ny;
  return std::max(v, 0.0);
}

double Geometry::lyapunov_v(const PrimalVector& x, const DualVector& u) const {
  return phi(x, inverse_duality_map(u));
}

Eigen::MatrixXd Geometry::duality_jacobian(const PrimalVector& x, double floor) const {
  require_dim(x.dim(), "vector");
  const Eigen::Index n = x.dim();
  if (is_hilbert()) return Eigen::MatrixXd::Identity(n, n);
  const double nx = norm(x);
  if (nx == 0.0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v(n);
  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = std::max(std::abs(x[i]) / nx, floor);
    v[i] = std::copysign(std::pow(t, p_ - 1.0), x[i]);
    diag[i] = (p_ - 1.0) * std::pow(t, p_ - 2.0);
  }
  Eigen::MatrixXd jac = (2.0 - p_) * v * v.transpose();
  jac.diagonal() += diag;
  return jac;
}

}  // namespace beq
