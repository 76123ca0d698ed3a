#pragma once

#include <string>

namespace beq {

// Parameter sequence n -> base + numer / (shift + n), n >= 0. A constant
// sequence has numer = 0.
class Schedule {
 public:
  static Schedule constant(double value) { return Schedule(value, 0.0, 1.0); }
  static Schedule harmonic(double base, double numer, double shift);

  double operator()(int n) const { return numer_ == 0.0 ? base_ : base_ + numer_ / (shift_ + n); }

  // Bounds of the range over n >= 0 (the infimum of a decreasing sequence is
  // its limit).
  double infimum() const;
  double supremum() const;

  double base() const { return base_; }
  double numer() const { return numer_; }
  double shift() const { return shift_; }

  std::string describe() const;

 private:
  Schedule(double base, double numer, double shift) : base_(base), numer_(numer), shift_(shift) {}

  double base_;
  double numer_;
  double shift_;
};

// Throws ConfigError unless [infimum, supremum] sits inside the interval
// (lo, hi) with the requested open/closed ends.
void require_range(const Schedule& s, const char* name, double lo, double hi, bool lo_open, bool hi_open);

}  // namespace beq
