#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Core>

#include "ricq/interval.hpp"

// Closed-form scalar functions of the recovery sufficient condition.
//
// Everything is evaluated through exp/log so that the same code path serves
// plain doubles and outward-rounded intervals; the scalar type is a template
// parameter resolved by ADL.

namespace ricq {

// Largest exponent for which the small-q upper bound on p_q is valid
// (slightly inside 1 - sqrt(2)/e = 0.47973...).
inline constexpr double kPqUpperBoundQMax = 0.4797;

namespace detail {

template <class S>
S pq_eval(const S& q, bool q_is_one) {
  using std::exp;
  using std::log;
  if (q_is_one) return S(0.25);  // both exponents integral; exact value
  const S l = log(q / S(2));
  return exp(q / (S(2) - q) * l) - exp(S(2) / (S(2) - q) * l);
}

template <class S>
struct RParts {
  S r1, r2, r3;
};

// Canonical decomposition used everywhere, including the mesh engine.
// u = t^(1/q) is the single transcendental; t^(2/q) = u^2 and
// t^((2-q)/q) = u^2/t follow by exact algebra.
template <class S>
RParts<S> r_components_eval(const S& t, const S& log_t, bool t_is_zero, const S& q,
                            const S& delta, const S& p) {
  using std::exp;
  if (t_is_zero) return {S(2) * delta, S(0), S(0)};
  const S u = exp(log_t / q);
  const S w = S(1) - (S(1) - p) * u;
  const S u2 = u * u;
  return {delta + delta * w * w, u2 / t, -(S(2) - delta) * u2};
}

// Single-expression form; algebraically identical to the sum of the
// components, kept as an independent floating-point route.
template <class S>
S r_eval(const S& t, const S& log_t, bool t_is_zero, const S& q, const S& delta,
         const S& p) {
  using std::exp;
  if (t_is_zero) return S(2) * delta;
  const S u = exp(log_t / q);
  const S a = (p - S(1)) * u;
  const S u2 = u * u;
  return S(2) * delta + a * (S(2) + a) * delta + u2 / t - (S(2) - delta) * u2;
}

template <class S>
S boundary_B_eval(const S& q, const S& p) {
  using std::exp;
  using std::log;
  return exp(q / (S(1) - q) * log((S(1) - p) / (S(2) - q)));
}

}  // namespace detail

// ---- domain checks ------------------------------------------------------

inline void require_q_half_open(double q, const char* who) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::domain_error(std::string(who) + ": q must lie in (0, 1], got " +
                            std::to_string(q));
}

inline void require_q_open(double q, const char* who) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error(std::string(who) + ": q must lie in (0, 1) strictly, got " +
                            std::to_string(q));
}

inline void require_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error(std::string(who) + ": delta must lie in (0, 1), got " +
                            std::to_string(delta));
}

inline void require_t_closed(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error(std::string(who) + ": t must lie in [0, 1], got " +
                            std::to_string(t));
}

// ---- p_q family ---------------------------------------------------------

// p_q = (q/2)^(q/(2-q)) - (q/2)^(2/(2-q)), the constant of the converse
// quasi-norm Cauchy-Schwarz inequality.  Decreasing and convex on (0,1),
// with limits 1 at q -> 0+ and exactly 1/4 at q = 1.
inline double pq(double q) {
  require_q_half_open(q, "pq");
  return detail::pq_eval(q, q == 1.0);
}

inline IntervalScalar pq_interval(double q) {
  require_q_half_open(q, "pq");
  return detail::pq_eval(IntervalScalar(q), q == 1.0);
}

// dp_q/dq = 2 ln(q/2) p_q / (2-q)^2, strictly negative on (0,1).
inline double pq_derivative(double q) {
  require_q_open(q, "pq_derivative");
  return 2.0 * std::log(q / 2.0) * pq(q) / ((2.0 - q) * (2.0 - q));
}

// d2p_q/dq2 = [(2 ln(q/2) + 2 - q)^2 + (2-q)^3/q] p_q / (2-q)^4, positive.
inline double pq_second_derivative(double q) {
  require_q_open(q, "pq_second_derivative");
  const double l2 = 2.0 * std::log(q / 2.0) + 2.0 - q;
  const double c = 2.0 - q;
  return (l2 * l2 + c * c * c / q) * pq(q) / (c * c * c * c);
}

// Upper estimate p_q < 1 + q ln(q/2) / (2-q), valid for q in (0, 0.4797].
inline double pq_upper_bound(double q) {
  if (!(q > 0.0 && q <= kPqUpperBoundQMax))
    throw std::domain_error("pq_upper_bound: valid only for q in (0, " +
                            std::to_string(kPqUpperBoundQMax) + "], got " +
                            std::to_string(q));
  return 1.0 + q * std::log(q / 2.0) / (2.0 - q);
}

// ---- sufficient-condition function r ------------------------------------

struct RComponents {
  double r1;  // delta + delta (1 - (1-p_q) t^(1/q))^2, nonincreasing in t and q
  double r2;  // t^((2-q)/q), nondecreasing in t
  double r3;  // -(2-delta) t^(2/q), nonincreasing in t
  double sum() const { return r1 + r2 + r3; }
};

// t = 0 is admitted as the limit (2*delta, 0, 0).
inline RComponents r_components(double t, double q, double delta) {
  require_t_closed(t, "r_components");
  require_q_half_open(q, "r_components");
  require_delta(delta, "r_components");
  const bool z = (t == 0.0);
  const auto parts = detail::r_components_eval(t, z ? 0.0 : std::log(t), z, q, delta,
                                               detail::pq_eval(q, q == 1.0));
  return {parts.r1, parts.r2, parts.r3};
}

// r(t,q,delta) = 2d + (p_q-1)t^(1/q)(2+(p_q-1)t^(1/q))d + t^((2-q)/q) - (2-d)t^(2/q).
// Recovery of the sparse solution by l_q minimization is guaranteed at
// (q, delta) when r < 1 for every t in (0, 1].
inline double r(double t, double q, double delta) {
  require_t_closed(t, "r");
  require_q_half_open(q, "r");
  require_delta(delta, "r");
  const bool z = (t == 0.0);
  return detail::r_eval(t, z ? 0.0 : std::log(t), z, q, delta,
                        detail::pq_eval(q, q == 1.0));
}

// q = 1 specialization: a concave parabola 2d + (1 - 3d/2) t - (2 - 25d/16) t^2.
inline double r_q1(double t, double delta) {
  require_t_closed(t, "r_q1");
  require_delta(delta, "r_q1");
  return 2.0 * delta + (1.0 - 1.5 * delta) * t - (2.0 - 25.0 * delta / 16.0) * t * t;
}

// Discriminant of r(t,1,delta) = 1; the parabola stays below one iff this
// is negative.
inline double q1_discriminant(double delta) {
  const double b = 1.0 - 1.5 * delta;
  return b * b + 4.0 * (2.0 - 25.0 * delta / 16.0) * (2.0 * delta - 1.0);
}

// Exact root (77 - sqrt(1337)) / 82 = 0.49310962...: the largest delta for
// which the q = 1 parabola stays below one on (0, 1].
inline double q1_threshold() { return (77.0 - std::sqrt(1337.0)) / 82.0; }

// ---- boundary of the certified small-t region ----------------------------

// B(q) = ((1 - p_q) / (2 - q))^(q/(1-q)); r(t,q,1/2) < 1 for 0 < t < B(q).
// Diverging exponent excludes q = 1.
inline double boundary_B(double q) {
  require_q_open(q, "boundary_B");
  return detail::boundary_B_eval(q, detail::pq_eval(q, false));
}

inline IntervalScalar boundary_B_interval(double q) {
  require_q_open(q, "boundary_B");
  const IntervalScalar qi(q);
  return detail::boundary_B_eval(qi, detail::pq_eval(qi, false));
}

// Corner-point upper bound, over [q_lo, q_hi], for the bracketed factor of
// dB/dq.  Each of the three terms is bounded by its monotone-worst corner:
//
//   ln((1-p)/(2-q))/(1-q)^2   <=  ln((1-p_hi)/(2-q_hi)) / (1-q_lo)^2
//   q/((1-q)(2-q))            <=  q_hi / ((1-q_hi)(2-q_hi))
//   -2q ln(q/2) p /((1-q)(1-p)(2-q)^2)
//                             <=  -2 q_hi ln(q_lo/2) p_lo /
//                                   ((1-q_hi)(1-p_lo)(2-q_hi)^2)
//
// A negative result certifies B strictly decreasing on the cell.  The
// monotonicity facts backing the corner choices hold on [0.3, 0.99].
inline double boundary_B_derivative_bound(double q_lo, double q_hi) {
  if (!(q_lo >= 0.3 && q_hi <= 0.99 && q_lo < q_hi))
    throw std::domain_error(
        "boundary_B_derivative_bound: requires 0.3 <= q_lo < q_hi <= 0.99");
  const double p_lo = pq(q_lo);
  const double p_hi = pq(q_hi);
  const double term1 = std::log((1.0 - p_hi) / (2.0 - q_hi)) / ((1.0 - q_lo) * (1.0 - q_lo));
  const double term2 = q_hi / ((1.0 - q_hi) * (2.0 - q_hi));
  const double term3 = (-2.0 * q_hi * std::log(q_lo / 2.0) * p_lo) /
                       ((1.0 - q_hi) * (1.0 - p_lo) * (2.0 - q_hi) * (2.0 - q_hi));
  return term1 + term2 + term3;
}

// ---- quasi-norm and the key inequality -----------------------------------

// ||x||_q^q = sum |x_i|^q.  Empty vectors give 0 by convention.
template <class Derived>
double quasi_norm_pow(const Eigen::MatrixBase<Derived>& x, double q) {
  require_q_half_open(q, "quasi_norm");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = std::abs(static_cast<double>(x(i)));
    if (std::isnan(v)) throw std::domain_error("quasi_norm: NaN entry");
    s += std::pow(v, q);
  }
  return s;
}

// ||x||_q = (sum |x_i|^q)^(1/q); equals the l1 norm at q = 1 and is
// positively homogeneous of degree one.
template <class Derived>
double quasi_norm(const Eigen::MatrixBase<Derived>& x, double q) {
  const double s = quasi_norm_pow(x, q);
  return s == 0.0 ? 0.0 : std::pow(s, 1.0 / q);
}

struct KeyInequalityResult {
  double lhs;   // ||x||_2
  double rhs;   // ||x||_q / n^(1/q - 1/2) + p_q sqrt(n) (max|x_i| - min|x_i|)
  bool holds;   // lhs <= rhs up to 1e-12 * max(1, rhs)
};

// The sharpened converse Cauchy-Schwarz inequality for quasi-norms, the
// engine behind every block estimate downstream.  Non-strict at vectors of
// equal magnitudes, hence the tolerance.
template <class Derived>
KeyInequalityResult key_inequality_check(const Eigen::MatrixBase<Derived>& x, double q) {
  require_q_open(q, "key_inequality_check");
  const Eigen::Index n = x.size();
  if (n < 1) throw std::domain_error("key_inequality_check: empty vector");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sumsq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::abs(static_cast<double>(x(i)));
    if (std::isnan(v)) throw std::domain_error("key_inequality_check: NaN entry");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sumsq += v * v;
  }
  const double lhs = std::sqrt(sumsq);
  const double nd = static_cast<double>(n);
  const double scale = std::exp((1.0 / q - 0.5) * std::log(nd));
  const double rhs = quasi_norm(x, q) / scale + pq(q) * std::sqrt(nd) * (hi - lo);
  return {lhs, rhs, lhs <= rhs + 1e-12 * std::max(1.0, rhs)};
}

struct MaxGapResult {
  double r_star;  // maximizer of sqrt(r) - r^(1/q)/n^(1/q-1/2) clamped to [1, n]
  double value;   // the maximum; equals p_q sqrt(n) when unclamped
};

// Concave in r, so the clamped stationary point n (q/2)^(2q/(2-q)) is
// optimal; ties against the endpoints resolve toward it.
inline MaxGapResult max_gap(long n, double q) {
  if (n < 1) throw std::domain_error("max_gap: n must be >= 1");
  require_q_open(q, "max_gap");
  const double nd = static_cast<double>(n);
  const double r_unc = nd * std::exp((2.0 * q / (2.0 - q)) * std::log(q / 2.0));
  const double r_star = std::clamp(r_unc, 1.0, nd);
  const double scale = std::exp((1.0 / q - 0.5) * std::log(nd));
  const auto objective = [&](double rr) {
    return std::sqrt(rr) - std::exp(std::log(rr) / q) / scale;
  };
  double best_r = r_star, best_v = objective(r_star);
  for (double endpoint : {1.0, nd}) {
    const double v = objective(endpoint);
    if (v > best_v) {
      best_v = v;
      best_r = endpoint;
    }
  }
  return {best_r, best_v};
}

}  // namespace ricq
