// Closed forms for the strip's vertical diffusion (drift cot y, unit noise):
// scale function, speed density, hitting probabilities, expected exit-time
// legs, boundary exit-law constants and the mean cycle displacement 1/kappa.
// Every constant is also exposed through the limit / integral expression it
// comes from, so the algebra can be cross-checked without Monte Carlo.

#ifndef ORBM_ANALYTICS_HPP_
#define ORBM_ANALYTICS_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "orbm/params.hpp"

namespace orbm {

struct StripInterval {
  double a = 0.0;  // pi/2 - theta1
  double b = 0.0;  // pi/2 + theta2

  StripInterval(double a_, double b_) : a(a_), b(b_) {
    if (!(0.0 < a && a < b && b < std::numbers::pi))
      throw std::invalid_argument("StripInterval: need 0 < a < b < pi");
  }
  static StripInterval for_angles(const WedgeAngles& w) {
    return StripInterval(kHalfPi - w.theta1, kHalfPi + w.theta2);
  }
  double width() const { return b - a; }
  double midpoint() const { return 0.5 * (a + b); }
};

namespace detail {
inline void require_strip_angles(double theta1, double theta2) {
  if (!(theta1 > -kHalfPi && theta1 < kHalfPi && theta2 > -kHalfPi && theta2 < kHalfPi))
    throw std::domain_error("analytics: angles outside (-pi/2, pi/2)");
  if (!(theta1 + theta2 > 0.0))
    throw std::domain_error("analytics: requires theta1 + theta2 > 0");
}
}  // namespace detail

// Scale function S(x) = -cot(x) (additive constant 0); S'(x) = 1/sin^2 x.
inline double scale_function(double x) {
  if (!(x > 0.0 && x < std::numbers::pi))
    throw std::domain_error("scale_function: x outside (0, pi)");
  return -1.0 / std::tan(x);
}

inline double scale_derivative(double x) {
  if (!(x > 0.0 && x < std::numbers::pi))
    throw std::domain_error("scale_derivative: x outside (0, pi)");
  const double s = std::sin(x);
  return 1.0 / (s * s);
}

// Speed density m(x) = 1 / (sigma^2 S'(x)) = sin^2 x.
inline double speed_density(double x) {
  if (!(x > 0.0 && x < std::numbers::pi))
    throw std::domain_error("speed_density: x outside (0, pi)");
  const double s = std::sin(x);
  return s * s;
}

// P_x(hit b before a) = (S(x) - S(a)) / (S(b) - S(a)).
inline double hit_prob(double x, const StripInterval& iv) {
  if (!(x >= iv.a && x <= iv.b)) throw std::domain_error("hit_prob: x outside [a, b]");
  if (x == iv.a) return 0.0;
  if (x == iv.b) return 1.0;
  return (scale_function(x) - scale_function(iv.a)) /
         (scale_function(iv.b) - scale_function(iv.a));
}

// Exit-law constants: mass of excursions from one face reaching the other.
inline double exit_law_up(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const double c = std::cos(theta1);
  return 1.0 / (c * c * (std::tan(theta1) + std::tan(theta2)));
}

inline double exit_law_down(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const double c = std::cos(theta2);
  return 1.0 / (c * c * (std::tan(theta1) + std::tan(theta2)));
}

// The same constant written in strip coordinates, 1/(sin^2 a (cot a - cot b)),
// i.e. the limit lim_{d->0} p(a+d)/d before the trig identification.
inline double exit_law_up_strip_form(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const StripInterval iv = StripInterval::for_angles({theta1, theta2});
  const double sa = std::sin(iv.a);
  return 1.0 / (sa * sa * (1.0 / std::tan(iv.a) - 1.0 / std::tan(iv.b)));
}

inline double exit_law_down_strip_form(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const StripInterval iv = StripInterval::for_angles({theta1, theta2});
  const double sb = std::sin(iv.b);
  return 1.0 / (sb * sb * (1.0 / std::tan(iv.a) - 1.0 / std::tan(iv.b)));
}

// Finite-difference quotient p(a+delta)/delta, which converges to
// exit_law_up at first order in delta.
inline double exit_law_up_delta_quotient(double theta1, double theta2, double delta) {
  detail::require_strip_angles(theta1, theta2);
  const StripInterval iv = StripInterval::for_angles({theta1, theta2});
  if (!(delta > 0.0 && iv.a + delta < iv.b))
    throw std::domain_error("exit_law_up_delta_quotient: bad delta");
  return hit_prob(iv.a + delta, iv) / delta;
}

struct ExitTimeLegs {
  double down_to_up = 0.0;  // lower face -> upper face
  double up_to_down = 0.0;
  double cycle = 0.0;
};

// Closed forms of the reflected legs' expected durations.
inline ExitTimeLegs expected_exit_time_legs(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const double s1 = std::sin(theta1), c1 = std::cos(theta1);
  const double s2 = std::sin(theta2), c2 = std::cos(theta2);
  const double sum = theta1 + theta2;
  ExitTimeLegs legs;
  legs.down_to_up = sum * std::tan(theta2) + s1 * s1 + s1 * c1 * std::tan(theta2);
  legs.up_to_down = sum * std::tan(theta1) + s2 * s2 + std::tan(theta1) * s2 * c2;
  legs.cycle = legs.down_to_up + legs.up_to_down;
  return legs;
}

// The same legs through the exit-time integrals 2*Int (S(end)-S(y)) m(y) dy,
// evaluated by adaptive Gauss-Kronrod quadrature.
inline ExitTimeLegs expected_exit_time_legs_quadrature(double theta1, double theta2,
                                                       double tol = 1e-12) {
  detail::require_strip_angles(theta1, theta2);
  const StripInterval iv = StripInterval::for_angles({theta1, theta2});
  using boost::math::quadrature::gauss_kronrod;
  const auto up_integrand = [&](double y) {
    return (scale_function(iv.b) - scale_function(y)) * speed_density(y);
  };
  const auto down_integrand = [&](double y) {
    return (scale_function(y) - scale_function(iv.a)) * speed_density(y);
  };
  ExitTimeLegs legs;
  legs.down_to_up =
      2.0 * gauss_kronrod<double, 15>::integrate(up_integrand, iv.a, iv.b, 10, tol);
  legs.up_to_down =
      2.0 * gauss_kronrod<double, 15>::integrate(down_integrand, iv.a, iv.b, 10, tol);
  legs.cycle = legs.down_to_up + legs.up_to_down;
  return legs;
}

// Mean horizontal displacement per down-to-down cycle of the conditioned
// strip process: 1/kappa = (theta1 + theta2)(tan theta1 + tan theta2).
inline double mean_cycle_displacement(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  return (theta1 + theta2) * (std::tan(theta1) + std::tan(theta2));
}

// The decomposition behind it: horizontal local-time push per cycle plus the
// drift contribution E_cycle; the two must add up to 1/kappa.
inline double cycle_local_time_term(double theta1, double theta2) {
  detail::require_strip_angles(theta1, theta2);
  const double c1 = std::cos(theta1), c2 = std::cos(theta2);
  const double t1 = std::tan(theta1), t2 = std::tan(theta2);
  return -(t1 * c1 * c1 + t2 * c2 * c2) * (t1 + t2);
}

// Expected lower-face local time per down-to-up leg (exponential mean).
inline double mean_lower_leg_local_time(double theta1, double theta2) {
  return 1.0 / exit_law_up(theta1, theta2);
}

}  // namespace orbm

#endif  // ORBM_ANALYTICS_HPP_
