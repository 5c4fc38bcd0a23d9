#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ricq {

// Outward-rounded interval scalar.
//
// Directed rounding is emulated portably: every elementary operation and
// every exp/log/sqrt call widens its result by INFLATE_ULPS ulps on each
// side.  That margin covers the at-most-1-ulp error of round-to-nearest
// arithmetic and the few-ulp error of a faithful libm.  Point constants
// are exact; unary negation is exact in IEEE-754 and is not widened.
class IntervalScalar {
 public:
  static constexpr int kInflateUlps = 4;

  IntervalScalar() : lo_(0.0), hi_(0.0) {}
  IntervalScalar(double point) : lo_(point), hi_(point) {}  // NOLINT: implicit lift
  IntervalScalar(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("IntervalScalar: lo > hi");
  }

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double midpoint() const { return 0.5 * (lo_ + hi_); }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }

  static double nudge_down(double x) {
    for (int i = 0; i < kInflateUlps; ++i)
      x = std::nextafter(x, -std::numeric_limits<double>::infinity());
    return x;
  }
  static double nudge_up(double x) {
    for (int i = 0; i < kInflateUlps; ++i)
      x = std::nextafter(x, std::numeric_limits<double>::infinity());
    return x;
  }
  static IntervalScalar outward(double lo, double hi) {
    return IntervalScalar(nudge_down(lo), nudge_up(hi));
  }

  IntervalScalar operator-() const { return IntervalScalar(-hi_, -lo_); }

  friend IntervalScalar operator+(const IntervalScalar& a, const IntervalScalar& b) {
    return outward(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend IntervalScalar operator-(const IntervalScalar& a, const IntervalScalar& b) {
    return outward(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend IntervalScalar operator*(const IntervalScalar& a, const IntervalScalar& b) {
    const double p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_;
    const double p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    const double lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
    const double hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
    return outward(lo, hi);
  }
  friend IntervalScalar operator/(const IntervalScalar& a, const IntervalScalar& b) {
    if (b.lo_ <= 0.0 && b.hi_ >= 0.0)
      throw std::domain_error("IntervalScalar: division by interval containing zero");
    const double p1 = a.lo_ / b.lo_, p2 = a.lo_ / b.hi_;
    const double p3 = a.hi_ / b.lo_, p4 = a.hi_ / b.hi_;
    const double lo = std::fmin(std::fmin(p1, p2), std::fmin(p3, p4));
    const double hi = std::fmax(std::fmax(p1, p2), std::fmax(p3, p4));
    return outward(lo, hi);
  }

 private:
  double lo_;
  double hi_;
};

// exp is increasing; the enclosure never dips below zero.
inline IntervalScalar exp(const IntervalScalar& x) {
  const double lo = IntervalScalar::nudge_down(std::exp(x.lower()));
  const double hi = IntervalScalar::nudge_up(std::exp(x.upper()));
  return IntervalScalar(lo < 0.0 ? 0.0 : lo, hi);
}

inline IntervalScalar log(const IntervalScalar& x) {
  if (!(x.lower() > 0.0))
    throw std::domain_error("IntervalScalar: log of interval not strictly positive");
  return IntervalScalar::outward(std::log(x.lower()), std::log(x.upper()));
}

inline IntervalScalar sqrt(const IntervalScalar& x) {
  if (!(x.lower() >= 0.0))
    throw std::domain_error("IntervalScalar: sqrt of interval with negative part");
  const double lo = IntervalScalar::nudge_down(std::sqrt(x.lower()));
  const double hi = IntervalScalar::nudge_up(std::sqrt(x.upper()));
  return IntervalScalar(lo < 0.0 ? 0.0 : lo, hi);
}

}  // namespace ricq
