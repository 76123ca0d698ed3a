#pragma once

#include "beq/geometry.hpp"
#include "beq/sets.hpp"
#include "beq/vector.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace beq {

struct LipschitzConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Ingredients of the strongly convex subproblem
//   argmin_{y in C} lambda f(center, y) + phi(y, anchor) / 2.
struct ProxQuery {
  const PrimalVector& center;
  const PrimalVector& anchor;
  double lambda;
  const ConvexSet& set;
  const Geometry& geometry;
};

// Equilibrium bifunction f(x, y) with a partial subgradient oracle in y.
struct Bifunction {
  std::string name;
  Eigen::Index dim = 1;
  std::function<double(const PrimalVector&, const PrimalVector&)> eval;
  // Some element of the subdifferential of f(x, .) at y.
  std::function<DualVector(const PrimalVector&, const PrimalVector&)> subgrad2;
  std::optional<LipschitzConstants> lipschitz;
  // Exact subproblem solution when available; returns nullopt when the query
  // falls outside what the closed form covers.
  std::function<std::optional<PrimalVector>(const ProxQuery&)> exact_prox;
  // Quadratic-in-y data for the linear-stationarity closed form:
  // f(x, y) = <y, A y> + <x, B y> + <x, C x>.
  struct Quadratic {
    Eigen::MatrixXd A, B, C;
  };
  std::optional<Quadratic> quadratic;
  // f(x, .) differentiable; enables the smooth numeric path.
  bool differentiable_in_y = true;
  // Relative inflation of the feasible box on which f may be evaluated.
  double evaluation_margin = 0.01;

  double operator()(const PrimalVector& x, const PrimalVector& y) const { return eval(x, y); }
};

// f(x, y) = <y, A y> + <x, B y> + <x, C x>, subgradient 2 A y + B^T x.
// A must be symmetric PSD and A + B + C must vanish as a quadratic form
// (f(x, x) = 0); both are checked. When `lipschitz` is absent the Euclidean
// constants c1 = c2 = |B|_2 / 2 are attached.
Bifunction quadratic_bifunction(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                                std::optional<LipschitzConstants> lipschitz = std::nullopt);

// f(x, y) = <F(x), y - x>, subgradient F(x).
Bifunction vi_bifunction(Eigen::Index dim, std::function<DualVector(const PrimalVector&)> field,
                         std::optional<LipschitzConstants> lipschitz = std::nullopt);

// f == 0.
Bifunction zero_bifunction(Eigen::Index dim);

struct Mapping {
  std::string name;
  std::function<PrimalVector(const PrimalVector&)> apply;
  double fixed_point_tol = 1e-12;
  std::vector<PrimalVector> fixed_points;

  PrimalVector operator()(const PrimalVector& x) const { return apply(x); }
};

// S x = scale * x; F(S) = {0} for |scale| < 1.
Mapping scaling_mapping(Eigen::Index dim, double scale);

struct Problem {
  std::string name;
  Bifunction f;
  Mapping S;
  ConvexSet C;
  Geometry geometry;
};

// E = R, C = [-100, 100], f(x, y) = y^2 - 4 x^2 + 3 x y with c1 = c2 = 3/2,
// S x = x / 5.
Problem paper_example();

// n-fold product of the scalar example on [-100, 100]^n.
Problem paper_example_product(Eigen::Index dim);

struct AssumptionReport {
  int samples = 0;
  // max |f(x, x)|
  double a1_worst = 0.0;
  // max f(y, x) over sampled pairs with f(x, y) >= 0 (pseudomonotonicity wants <= 0)
  double a2_worst = 0.0;
  int a2_pairs = 0;
  // min of f(x, y') - f(x, y) - <g, y' - y> (wants >= 0)
  double a4_worst_slack = 0.0;
  // min of f(x,y) + f(y,z) - f(x,z) + c1 phi(y,x) + c2 phi(z,y) (wants >= 0)
  std::optional<double> a5_worst_slack;

  bool passes(double tol) const;
};

struct AssumptionOptions {
  bool check_a5 = true;
};

// Sampled diagnostics for A1, A2, A4 and (with declared constants) A5. Throws
// MissingConstants when A5 is requested and the bifunction declares none.
AssumptionReport verify_assumptions(const Bifunction& f, const ConvexSet& set, const Geometry& g, int samples,
                                    std::mt19937_64& rng, const AssumptionOptions& opts = {});

// max over sampled x in the set and declared fixed points p of
// phi(p, S x) - phi(p, x) (wants <= 0).
double check_relative_nonexpansive(const Mapping& S, const ConvexSet& set, const Geometry& g, int samples,
                                   std::mt19937_64& rng);

}  // namespace beq
