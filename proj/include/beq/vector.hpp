#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <utility>

namespace beq {

struct PrimalTag {};
struct DualTag {};

// Coordinate array tagged by the space it lives in. Primal points and dual
// functionals never mix without going through a duality map.
template <class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(Eigen::VectorXd v) : v_(std::move(v)) {}
  Coords(std::initializer_list<double> init) : v_(static_cast<Eigen::Index>(init.size())) {
    Eigen::Index i = 0;
    for (double c : init) v_[i++] = c;
  }

  static Coords zeros(Eigen::Index n) { return Coords(Eigen::VectorXd::Zero(n)); }
  static Coords constant(Eigen::Index n, double value) {
    return Coords(Eigen::VectorXd::Constant(n, value));
  }

  Eigen::Index dim() const { return v_.size(); }
  const Eigen::VectorXd& coords() const { return v_; }
  Eigen::VectorXd& coords() { return v_; }

  double operator[](Eigen::Index i) const { return v_[i]; }
  double& operator[](Eigen::Index i) { return v_[i]; }

  bool all_finite() const { return v_.allFinite(); }
  bool is_zero() const { return (v_.array() == 0.0).all(); }

  Coords& operator+=(const Coords& o) {
    v_ += o.v_;
    return *this;
  }
  Coords& operator-=(const Coords& o) {
    v_ -= o.v_;
    return *this;
  }
  Coords& operator*=(double s) {
    v_ *= s;
    return *this;
  }

  friend Coords operator+(Coords a, const Coords& b) { return a += b; }
  friend Coords operator-(Coords a, const Coords& b) { return a -= b; }
  friend Coords operator-(Coords a) {
    a.v_ = -a.v_;
    return a;
  }
  friend Coords operator*(double s, Coords a) { return a *= s; }
  friend Coords operator*(Coords a, double s) { return a *= s; }

  friend bool operator==(const Coords& a, const Coords& b) {
    return a.v_.size() == b.v_.size() && (a.v_.array() == b.v_.array()).all();
  }

 private:
  Eigen::VectorXd v_;
};

using PrimalVector = Coords<PrimalTag>;
using DualVector = Coords<DualTag>;

// Canonical pairing <x, u> between E and E*.
inline double pairing(const PrimalVector& x, const DualVector& u) {
  return x.coords().dot(u.coords());
}

}  // namespace beq
