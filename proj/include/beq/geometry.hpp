#pragma once

#include "beq/vector.hpp"

#include <Eigen/Core>

#include <optional>

namespace beq {

// Finite-dimensional smooth Banach space: R^n with the Euclidean norm or an
// l_p norm, p in (1, inf). All l_p spaces here are smooth and strictly convex,
// so the normalized duality map is single valued and invertible.
class Geometry {
 public:
  enum class Kind { Euclidean, Lp };

  static constexpr double kDefaultIdentityTol = 1e-9;

  static Geometry euclidean(Eigen::Index dim);

  // `c` overrides the 2-uniform-convexity constant. Without an override,
  // c = sqrt(p - 1) for p <= 2 and no constant for p > 2.
  static Geometry lp(Eigen::Index dim, double p, std::optional<double> c = std::nullopt);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  double p() const { return p_; }
  // Conjugate exponent q = p / (p - 1); the dual space is l_q.
  double q() const { return q_; }
  bool is_hilbert() const { return kind_ == Kind::Euclidean || p_ == 2.0; }

  std::optional<double> uniform_convexity_constant() const { return c_; }

  double identity_tol() const { return identity_tol_; }
  Geometry with_identity_tol(double tol) const;

  double norm(const PrimalVector& x) const;
  double dual_norm(const DualVector& u) const;

  // J x, with J(0) = 0.
  DualVector duality_map(const PrimalVector& x) const;
  // J^{-1} u, the duality map of the dual space.
  PrimalVector inverse_duality_map(const DualVector& u) const;

  // phi(x, y) = |x|^2 - 2 <x, J y> + |y|^2, clamped at 0.
  double phi(const PrimalVector& x, const PrimalVector& y) const;
  // V(x, u) = phi(x, J^{-1} u).
  double lyapunov_v(const PrimalVector& x, const DualVector& u) const;

  // Derivative of J at x (the Hessian of |x|^2 / 2). Coordinates with
  // |x_i| < floor are evaluated at |x_i| = floor, since for p < 2 the exact
  // derivative blows up on the coordinate hyperplanes.
  Eigen::MatrixXd duality_jacobian(const PrimalVector& x, double floor = 1e-12) const;

  void require_dim(Eigen::Index n, const char* what) const;

 private:
  Geometry(Kind kind, Eigen::Index dim, double p, std::optional<double> c);

  Kind kind_;
  Eigen::Index dim_;
  double p_;
  double q_;
  std::optional<double> c_;
  double identity_tol_ = kDefaultIdentityTol;
};

// l_r norm of raw coordinates, overflow safe.
double lr_norm(const Eigen::VectorXd& v, double r);

}  // namespace beq
