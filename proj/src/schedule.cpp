#include "beq/schedule.hpp"

#include "beq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace beq {

Schedule Schedule::harmonic(double base, double numer, double shift) {
  if (!(shift > 0.0)) throw Error(ErrorCode::ConfigError, "schedule shift must be > 0");
  if (!std::isfinite(base) || !std::isfinite(numer)) throw Error(ErrorCode::ConfigError, "schedule must be finite");
  return Schedule(base, numer, shift);
}

double Schedule::infimum() const { return numer_ >= 0.0 ? base_ : base_ + numer_ / shift_; }

double Schedule::supremum() const { return numer_ >= 0.0 ? base_ + numer_ / shift_ : base_; }

std::string Schedule::describe() const {
  std::ostringstream os;
  if (numer_ == 0.0) {
    os << base_;
  } else {
    os << base_ << " + " << numer_ << "/(" << shift_ << " + n)";
  }
  return os.str();
}

void require_range(const Schedule& s, const char* name, double lo, double hi, bool lo_open, bool hi_open) {
  const double inf = s.infimum();
  const double sup = s.supremum();
  const bool lo_ok = lo_open ? inf > lo : inf >= lo;
  const bool hi_ok = hi_open ? sup < hi : sup <= hi;
  if (!lo_ok || !hi_ok) {
    std::ostringstream os;
    os << name << " schedule " << s.describe() << " has range [" << inf << ", " << sup << "], required "
       << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    throw Error(ErrorCode::ConfigError, os.str());
  }
}

}  // namespace beq
