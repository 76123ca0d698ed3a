#pragma once

// Independent reference solvers used only by the tests.

#include "beq/geometry.hpp"
#include "beq/sets.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace beq::testing {

// Euclidean projection onto {z : lo <= z <= hi, A z <= b} by enumerating
// active sets: every subset of at most dim constraints is made active, the
// equality-constrained projection is solved, and the closest feasible
// candidate wins. Exponential, so only for small instances.
inline Eigen::VectorXd projection_by_enumeration(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                                 const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                 const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  // Stack all constraints as rows g^T z <= h.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    rows.push_back(e);
    rhs.push_back(hi[i]);
    rows.push_back(-e);
    rhs.push_back(-lo[i]);
  }
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    rows.push_back(A.row(k).transpose());
    rhs.push_back(b[k]);
  }
  const int m = static_cast<int>(rows.size());
  auto feasible = [&](const Eigen::VectorXd& z) {
    for (int k = 0; k < m; ++k) {
      if (rows[k].dot(z) > rhs[k] + 1e-9) return false;
    }
    return true;
  };
  Eigen::VectorXd best;
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    const auto k = static_cast<Eigen::Index>(pick.size());
    Eigen::VectorXd z = x;
    if (k > 0) {
      Eigen::MatrixXd G(k, n);
      Eigen::VectorXd h(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        G.row(r) = rows[pick[r]].transpose();
        h[r] = rhs[pick[r]];
      }
      // z = x - G^T mu with G G^T mu = G x - h.
      const Eigen::MatrixXd GG = G * G.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(GG);
      if (lu.rank() == k) z = x - G.transpose() * lu.solve(G * x - h);
    }
    if (feasible(z)) {
      const double d = (z - x).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = z;
      }
    }
    if (k == n) return;
    for (int j = start; j < m; ++j) {
      pick.push_back(j);
      rec(j + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

// Brute-force minimizer of phi(., x) over a box sampled on a grid with the
// given step (dims 1 to 3); the upper face is always on the grid.
inline PrimalVector grid_phi_minimizer(const Geometry& g, const Box& box, const PrimalVector& x, double step) {
  const Eigen::Index n = x.dim();
  std::vector<int> counts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil((box.hi[i] - box.lo[i]) / step - 1e-9)) + 1;
  }
  PrimalVector best = PrimalVector::zeros(n), z = PrimalVector::zeros(n);
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) {
      z[i] = std::min(box.hi[i], box.lo[i] + idx[static_cast<std::size_t>(i)] * step);
    }
    const double v = g.phi(z, x);
    if (v < best_v) {
      best_v = v;
      best = z;
    }
    Eigen::Index i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == counts[static_cast<std::size_t>(i)]) {
      idx[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
  }
  return best;
}

}  // namespace beq::testing
