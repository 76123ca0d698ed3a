#include "beq/hybrid.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <cmath>

namespace beq {

const char* to_string(Algorithm a) {
  return a == Algorithm::Extragradient ? "extragradient" : "linesearch";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::StoppedAtSolution: return "StoppedAtSolution";
    case Status::Converged: return "Converged";
    case Status::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

const char* to_string(SigmaVariant v) { return v == SigmaVariant::SquaredNorm ? "squared_norm" : "example_norm"; }

PrimalVector dual_average(const Geometry& g, const Mapping& S, const PrimalVector& x, const PrimalVector& v,
                          double alpha, double beta) {
  const DualVector inner = beta * g.duality_map(v) + (1.0 - beta) * g.duality_map(S(v));
  return g.inverse_duality_map(alpha * g.duality_map(x) + (1.0 - alpha) * inner);
}

CutResult cut_and_retract(const Geometry& g, const ConvexSet& C, const PrimalVector& x0, const PrimalVector& xn,
                          const PrimalVector& tn, const RetractionOptions& opts) {
  PrimalHalfspace cn = build_cn(g, xn, tn);
  DualLinearHalfspace dn = build_dn(g, x0, xn);
  const ConvexSet cut = ConvexSet::intersect({C, ConvexSet(cn), ConvexSet(dn)});
  try {
    RetractionReport rep = sunny_retract(g, cut, x0, opts);
    PrimalVector next = rep.point;
    return CutResult{std::move(next), std::move(cn), std::move(dn), std::move(rep)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfeasibleSet) {
      throw Error(ErrorCode::InfeasibleCut, std::string("C ∩ C_n ∩ D_n is empty: ") + e.what());
    }
    throw;
  }
}

PrimalVector quantize_toward_zero(const PrimalVector& x, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "quantization step must be > 0");
  PrimalVector out = x;
  for (Eigen::Index i = 0; i < x.dim(); ++i) {
    const double units = x[i] / step;
    const double nearest = std::round(units);
    const double k = std::abs(units - nearest) <= 1e-9 ? nearest : std::trunc(units);
    out[i] = k * step;
  }
  return out;
}

void InvariantTracker::check(int n, const char* what, std::optional<double> slack, double tol) {
  if (!slack) return;
  worst_ = std::min(worst_, *slack);
  if (*slack < -tol) violations_.push_back({n, what, *slack});
}

void InvariantTracker::monotone(int n, double phi_x0_xn) {
  if (last_phi_) {
    const double inc = phi_x0_xn - *last_phi_;
    if (inc < -tol_.monotone) violations_.push_back({n, "phi(x0, x_n) nondecreasing", inc});
  }
  last_phi_ = phi_x0_xn;
}

double cut_slack(const Geometry& g, const PrimalHalfspace& cn, const DualLinearHalfspace& dn, const PrimalVector& p) {
  return std::min(cn.b - pairing(p, cn.a), dn.r - pairing(dn.d, g.duality_map(p)));
}

}  // namespace beq
