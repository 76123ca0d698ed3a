#pragma once

#include "beq/geometry.hpp"
#include "beq/vector.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace beq {

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// {z : <z, a> <= b}
struct PrimalHalfspace {
  DualVector a;
  double b = 0.0;
};

// {z : <d, J z> <= r}. Linear in dual coordinates; not convex in z unless
// the geometry is Hilbert.
struct DualLinearHalfspace {
  PrimalVector d;
  double r = 0.0;
};

class ConvexSet;

struct Intersection {
  std::vector<ConvexSet> members;
};

class ConvexSet {
 public:
  using Variant = std::variant<Box, PrimalHalfspace, DualLinearHalfspace, Intersection>;

  ConvexSet(Box box);
  ConvexSet(PrimalHalfspace h);
  ConvexSet(DualLinearHalfspace h);
  ConvexSet(Intersection i);

  static ConvexSet box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static ConvexSet intersect(std::vector<ConvexSet> members);

  const Variant& variant() const { return v_; }
  Eigen::Index dim() const { return dim_; }

  // Flattened view: at most one box (the componentwise intersection of all
  // boxes), every primal halfspace, every dual-linear halfspace.
  struct Flat {
    std::optional<Box> box;
    std::vector<PrimalHalfspace> primal;
    std::vector<DualLinearHalfspace> dual;
  };
  Flat flatten() const;

 private:
  Variant v_;
  Eigen::Index dim_;
};

bool contains(const ConvexSet& set, const Geometry& g, const PrimalVector& x, double tol);

// C_n = {z : phi(z, t) <= phi(z, x)} written as {z : 2 <z, Jx - Jt> <= |x|^2 - |t|^2}.
PrimalHalfspace build_cn(const Geometry& g, const PrimalVector& x_n, const PrimalVector& t_n);

// D_n = {z : <Jx_n - Jz, x_0 - x_n> >= 0} written as {z : <x_0 - x_n, Jz> <= <x_0 - x_n, Jx_n>}.
DualLinearHalfspace build_dn(const Geometry& g, const PrimalVector& x_0, const PrimalVector& x_n);

struct RetractionOptions {
  // Dykstra sweep tolerance and cap (Euclidean path).
  double tol = 1e-12;
  int max_sweeps = 10000;
  // Feasibility tolerance and iteration cap for the iterative (non-Hilbert) path.
  double feasibility_tol = 1e-9;
  int max_iters = 50000;
  // Random feasible probes for the a-posteriori residuals.
  int probe_points = 32;
  std::uint64_t seed = 42;
};

struct RetractionReport {
  PrimalVector point;
  // phi(point, x).
  double phi_value = 0.0;
  // max over probes y of <x - Rx, Jy - J Rx>, normalized by 1 + |x - Rx| |Jy - J Rx|_*.
  double variational_residual = 0.0;
  // max over probes y of <y - Rx, Jx - J Rx> with the same normalization;
  // the first-order condition of minimizing phi(., x) over a convex set.
  // Identical to variational_residual in Hilbert geometry.
  double optimality_residual = 0.0;
  int iterations = 0;
};

// Minimizer of phi(., x) over the set. Returns x itself when x is in the set.
// Throws InfeasibleSet when the set is certified empty and NoConvergence when
// the iteration cap is hit.
RetractionReport sunny_retract(const Geometry& g, const ConvexSet& set, const PrimalVector& x,
                               const RetractionOptions& opts = {});

// Euclidean metric projection onto the primal-convex part of the set (box and
// primal halfspaces, plus dual-linear halfspaces treated as primal ones).
// Exact up to `tol`; used by the Hilbert retraction and by projected-gradient
// inner solvers.
struct ProjectionResult {
  Eigen::VectorXd point;
  int sweeps = 0;
};
ProjectionResult euclidean_project(const ConvexSet::Flat& flat, const Eigen::VectorXd& x,
                                   bool dual_as_primal, double tol, int max_sweeps);

// Sampling helpers for diagnostics. Points are drawn uniformly from the set's
// box (or a ball of `radius` around `center` when the set has no box) and
// pushed into the primal-convex part by metric projection; samples that miss
// a dual-linear constraint are dropped.
std::vector<PrimalVector> sample_feasible(const ConvexSet& set, const Geometry& g, std::mt19937_64& rng,
                                          int count, const PrimalVector& center, double radius);

// Box corners (all of them for dim <= 6, else none).
std::vector<PrimalVector> box_corners(const Box& box);

}  // namespace beq
