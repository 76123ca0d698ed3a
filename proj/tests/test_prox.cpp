#include "beq/errors.hpp"
#include "beq/prox.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cfloat>
#include <cmath>

using namespace beq;
using beq::testing::code_of;
using beq::testing::random_primal;
using beq::testing::uniform;

namespace {

ProxRequest request(const Problem& p, PrimalVector anchor, PrimalVector center, double lambda) {
  return ProxRequest{p.f, p.C, p.geometry, std::move(anchor), std::move(center), lambda};
}

// Random PSD A and B with A + B + C = 0.
Problem random_quadratic(std::mt19937_64& rng, Eigen::Index n, double box) {
  Eigen::MatrixXd R(n, n), B(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      R(i, j) = uniform(rng, -1, 1);
      B(i, j) = uniform(rng, -1, 1);
    }
  }
  const Eigen::MatrixXd A = R * R.transpose() / static_cast<double>(n);
  Bifunction f = quadratic_bifunction(A, B, -A - B);
  return Problem{"random", std::move(f), scaling_mapping(n, 0.5),
                 ConvexSet::box(Eigen::VectorXd::Constant(n, -box), Eigen::VectorXd::Constant(n, box)),
                 Geometry::euclidean(n)};
}

}  // namespace

TEST_CASE("first two example steps") {
  const Problem p = paper_example();
  const ProxResult y = prox(request(p, PrimalVector{100.0}, PrimalVector{100.0}, 1.0 / 6.0));
  CHECK(y.path == ProxPath::ClosedForm);
  CHECK(y.y[0] == doctest::Approx(37.5).epsilon(1e-14));
  const ProxResult z = prox(request(p, PrimalVector{100.0}, y.y, 1.0 / 6.0));
  CHECK(z.y[0] == doctest::Approx(60.9375).epsilon(1e-14));
  // Same values from the numeric path.
  ProxRequest rq = request(p, PrimalVector{100.0}, PrimalVector{100.0}, 1.0 / 6.0);
  rq.path = ProxPath::Numeric;
  CHECK(prox(rq).y[0] == doctest::Approx(37.5).epsilon(1e-8));
}

TEST_CASE("zero bifunction returns the anchor") {
  const Problem base = paper_example_product(3);
  const Bifunction zero = zero_bifunction(3);
  for (const Geometry& g : {Geometry::euclidean(3), Geometry::lp(3, 1.5), Geometry::lp(3, 3.0)}) {
    const PrimalVector a{1.0, -2.0, 3.0};
    ProxRequest rq{zero, base.C, g, a, a, 0.7};
    for (ProxPath path : {ProxPath::Auto, ProxPath::Numeric}) {
      rq.path = path;
      const ProxResult r = prox(rq);
      CHECK((r.y - a).coords().norm() <= 1e-12);
    }
  }
}

TEST_CASE("closed form agrees with the numeric path") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int k = 0; k < 80; ++k) {
    const Eigen::Index n = 1 + k % 8;
    const Problem p = random_quadratic(rng, n, 50.0);
    const PrimalVector x = random_primal(rng, n, 3.0);
    const PrimalVector c = random_primal(rng, n, 3.0);
    const double lambda = uniform(rng, 0.05, 1.0);
    ProxRequest rq = request(p, x, c, lambda);
    const ProxResult exact = prox(rq);
    if (exact.path != ProxPath::ClosedForm) continue;
    rq.path = ProxPath::Numeric;
    const ProxResult num = prox(rq);
    CHECK((exact.y - num.y).coords().lpNorm<Eigen::Infinity>() <= 1e-6);
    ++compared;
  }
  CHECK(compared >= 60);
}

TEST_CASE("clamped closed form in one dimension matches the numeric path") {
  const Problem p = paper_example();
  // Unconstrained stationary point -150 / (4/3) lies below the box.
  ProxRequest rq = request(p, PrimalVector{-100.0}, PrimalVector{100.0}, 1.0 / 6.0);
  CHECK(prox(rq).y[0] == -100.0);
  rq.path = ProxPath::Numeric;
  CHECK(prox(rq).y[0] == doctest::Approx(-100.0).epsilon(1e-10));
}

TEST_CASE("l_p prox against a grid search") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const Bifunction f = quadratic_bifunction(I, 3 * I, -4 * I);
  for (int k = 0; k < 8; ++k) {
    const double p = k % 2 ? 3.0 : 1.5;
    const Geometry g = Geometry::lp(2, p);
    const Box box{Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1)};
    const ConvexSet C(box);
    const PrimalVector a{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const PrimalVector c{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double lambda = uniform(rng, 0.1, 0.5);
    const ProxRequest rq{f, C, g, a, c, lambda};
    const ProxResult r = prox(rq);
    CHECK(r.path == ProxPath::Numeric);
    double best = std::numeric_limits<double>::infinity();
    PrimalVector arg = a;
    for (double u = -1.0; u <= 1.0 + 1e-12; u += 2e-3) {
      for (double v = -1.0; v <= 1.0 + 1e-12; v += 2e-3) {
        const PrimalVector y{u, v};
        const double h = prox_objective(rq, y);
        if (h < best) {
          best = h;
          arg = y;
        }
      }
    }
    CHECK(r.objective <= best + 1e-12);
    CHECK((r.y - arg).coords().lpNorm<Eigen::Infinity>() <= 4e-3);
  }
}

TEST_CASE("numeric minimizer does not depend on the start") {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  const Bifunction f = quadratic_bifunction(I, 3 * I, -4 * I);
  const ConvexSet C = ConvexSet::box(Eigen::Vector3d(-2, -2, -2), Eigen::Vector3d(2, 2, 2));
  for (const Geometry& g : {Geometry::lp(3, 1.5), Geometry::lp(3, 3.0)}) {
    for (int k = 0; k < 5; ++k) {
      ProxRequest rq{f, C, g, random_primal(rng, 3, 0.7), random_primal(rng, 3, 0.7), 0.3};
      rq.start = PrimalVector{2.0, 2.0, 2.0};
      const PrimalVector y1 = prox(rq).y;
      rq.start = PrimalVector{-2.0, 1.0, -2.0};
      const PrimalVector y2 = prox(rq).y;
      CHECK((y1 - y2).coords().norm() <= 1e-8);
    }
  }
}

TEST_CASE("y-step objective is nonpositive and the history decreases") {
  std::mt19937_64 rng(14);
  const Problem ex = paper_example_product(2);
  for (const Geometry& g : {Geometry::euclidean(2), Geometry::lp(2, 1.5), Geometry::lp(2, 3.0)}) {
    for (int k = 0; k < 10; ++k) {
      const PrimalVector x = random_primal(rng, 2, 20.0);
      ProxRequest rq{ex.f, ex.C, g, x, x, uniform(rng, 0.05, 0.3)};
      rq.path = ProxPath::Numeric;
      rq.record_history = true;
      const ProxResult r = prox(rq);
      REQUIRE(r.descent_gap);
      CHECK(*r.descent_gap <= 1e-8);
      REQUIRE(!r.objective_history.empty());
      for (std::size_t i = 1; i < r.objective_history.size(); ++i) {
        // Rounding in the |y|^2 and |a|^2 terms is all that may show.
        const double ulps = 8 * DBL_EPSILON * (1.0 + x.coords().squaredNorm());
        CHECK(r.objective_history[i] <= r.objective_history[i - 1] + ulps);
      }
    }
  }
}

TEST_CASE("nonsmooth path recovers soft thresholding") {
  // f(x, y) = |y| - |x| gives argmin lambda |y| + (y - a)^2 / 2.
  Bifunction f;
  f.name = "abs";
  f.dim = 1;
  f.eval = [](const PrimalVector& x, const PrimalVector& y) { return std::abs(y[0]) - std::abs(x[0]); };
  f.subgrad2 = [](const PrimalVector&, const PrimalVector& y) {
    return DualVector{y[0] > 0 ? 1.0 : y[0] < 0 ? -1.0 : 0.0};
  };
  f.differentiable_in_y = false;
  const ConvexSet C = ConvexSet::box(Eigen::VectorXd::Constant(1, -10), Eigen::VectorXd::Constant(1, 10));
  const Geometry g = Geometry::euclidean(1);
  for (double a : {3.0, -2.5, 0.2, -0.4}) {
    const double lambda = 0.5;
    ProxRequest rq{f, C, g, PrimalVector{a}, PrimalVector{a}, lambda};
    rq.tol = 1e-4;
    const double expect = a > 0 ? std::max(a - lambda, 0.0) : -std::max(-a - lambda, 0.0);
    CHECK(prox(rq).y[0] == doctest::Approx(expect).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("anchor outside the set") {
  const Problem p = paper_example();
  CHECK(code_of([&] { (void)prox(request(p, PrimalVector{150.0}, PrimalVector{0.0}, 0.1)); }) ==
        ErrorCode::InfeasibleStart);
  CHECK(code_of([&] { (void)prox(request(p, PrimalVector{1.0}, PrimalVector{0.0}, 0.0)); }) ==
        ErrorCode::InvalidArgument);
}
