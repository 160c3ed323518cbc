// Conformal transport between the quadrant, the wedge and the strip.
//
// The quadrant maps to a wedge through w = e^{i(pi/2 - theta1)} z^alpha, whose
// edges sit at angles pi/2 - theta1 (image of the lower face) and
// pi/2 + theta2 (image of the left face); log then maps the wedge to the
// horizontal strip (pi/2 - theta1, pi/2 + theta2).  The harmonic function
// h = Im(w) = r^alpha cos(alpha*theta - theta1) drives the level sets and the
// conditioning drift grad(h)/h.  Clock changes accumulate |F'|^2 (quadrant ->
// wedge) and |1/w|^2 (wedge -> strip) by the trapezoid rule on the grid.

#ifndef ORBM_CONFORMAL_HPP_
#define ORBM_CONFORMAL_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include "orbm/params.hpp"
#include "orbm/vec2.hpp"

namespace orbm {

struct MapSpec {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double alpha = 0.0;

  static MapSpec from_angles(const WedgeAngles& w) {
    MapSpec m;
    m.theta1 = w.theta1;
    m.theta2 = w.theta2;
    m.alpha = (w.theta1 + w.theta2) / kHalfPi;
    return m;
  }
  static MapSpec from_params(const DerivedParams& p) {
    MapSpec m;
    m.theta1 = p.theta1;
    m.theta2 = p.theta2;
    m.alpha = p.alpha;
    return m;
  }

  double lower_edge_angle() const { return kHalfPi - theta1; }  // image of {y=0}
  double upper_edge_angle() const { return kHalfPi + theta2; }  // image of {x=0}
};

namespace detail {

// arg for closed-quadrant points, clamped to [0, pi/2].
inline double quadrant_arg(const Vec2& z) {
  if (z.x < 0.0 || z.y < 0.0) {
    constexpr double slack = 1e-12;
    if (z.x < -slack || z.y < -slack)
      throw std::domain_error("conformal: point outside the closed quadrant");
  }
  const double th = std::atan2(std::max(z.y, 0.0), std::max(z.x, 0.0));
  return std::min(std::max(th, 0.0), kHalfPi);
}

}  // namespace detail

// Quadrant -> wedge.  The origin is a fixed point.
inline Vec2 to_wedge(const Vec2& z, const MapSpec& m) {
  if (z.x == 0.0 && z.y == 0.0) return {0.0, 0.0};
  const double r = z.norm();
  const double phi = m.lower_edge_angle() + m.alpha * detail::quadrant_arg(z);
  const double ra = std::pow(r, m.alpha);
  return {ra * std::cos(phi), ra * std::sin(phi)};
}

inline Vec2 from_wedge(const Vec2& w, const MapSpec& m) {
  if (w.x == 0.0 && w.y == 0.0) return {0.0, 0.0};
  const double rw = w.norm();
  const double phi = std::atan2(w.y, w.x);
  const double th = (phi - m.lower_edge_angle()) / m.alpha;
  const double r = std::pow(rw, 1.0 / m.alpha);
  const double thc = std::min(std::max(th, 0.0), kHalfPi);
  return {r * std::cos(thc), r * std::sin(thc)};
}

inline double h_value(const Vec2& z, const MapSpec& m) {
  if (z.x == 0.0 && z.y == 0.0) return 0.0;
  const double r = z.norm();
  const double th = detail::quadrant_arg(z);
  return std::pow(r, m.alpha) * std::cos(m.alpha * th - m.theta1);
}

// grad h = (Im F', Re F') with F' = alpha e^{i(pi/2-theta1)} z^{alpha-1}.
inline Vec2 h_gradient(const Vec2& z, const MapSpec& m) {
  if (z.x == 0.0 && z.y == 0.0)
    throw std::domain_error("h_gradient: undefined at the origin");
  const double r = z.norm();
  const double th = detail::quadrant_arg(z);
  const double mag = m.alpha * std::pow(r, m.alpha - 1.0);
  const double ang = m.lower_edge_angle() + (m.alpha - 1.0) * th;
  return {mag * std::sin(ang), mag * std::cos(ang)};
}

// |F'(z)|^2, the quadrant -> wedge clock rate.
inline double wedge_clock_rate(const Vec2& z, const MapSpec& m) {
  const double r2 = z.norm2();
  if (r2 == 0.0) throw std::domain_error("wedge_clock_rate: origin");
  return m.alpha * m.alpha * std::pow(r2, m.alpha - 1.0);
}

enum class TransportTarget { Wedge, Strip };

struct TransportedTrajectory {
  std::vector<double> t_original;
  std::vector<double> t_new;  // accumulated new clock A_t
  std::vector<Vec2> state;
};

// Map a quadrant path to the wedge or the strip, accumulating the
// time-change clock by the trapezoid rule on the original grid.  Aborts if
// the path enters the origin guard disc.
inline TransportedTrajectory transport(const std::vector<double>& t, const std::vector<Vec2>& x,
                                       const MapSpec& m, TransportTarget target,
                                       double origin_guard = 0.0) {
  if (t.size() != x.size()) throw std::invalid_argument("transport: grid size mismatch");
  TransportedTrajectory out;
  out.t_original = t;
  out.t_new.resize(t.size());
  out.state.resize(t.size());
  double clock = 0.0;
  double prev_rate = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (x[k].norm() <= origin_guard || (x[k].x == 0.0 && x[k].y == 0.0))
      throw std::domain_error("transport: path entered the origin guard at index " +
                              std::to_string(k));
    const Vec2 w = to_wedge(x[k], m);
    double rate;
    if (target == TransportTarget::Wedge) {
      out.state[k] = w;
      rate = wedge_clock_rate(x[k], m);
    } else {
      out.state[k] = {std::log(w.norm()), std::atan2(w.y, w.x)};
      // Composed clock: d(strip time) = |1/w|^2 |F'|^2 d(original time).
      rate = wedge_clock_rate(x[k], m) / w.norm2();
    }
    if (k > 0) clock += 0.5 * (rate + prev_rate) * (t[k] - t[k - 1]);
    out.t_new[k] = clock;
    prev_rate = rate;
  }
  return out;
}

// Resample states on a uniform grid in the new clock by linear interpolation
// (between-grid states are interpolants, not points of the underlying path).
inline TransportedTrajectory resample_uniform(const TransportedTrajectory& tr, std::size_t n) {
  if (tr.t_new.size() < 2 || n < 2) throw std::invalid_argument("resample_uniform: too short");
  TransportedTrajectory out;
  out.t_new.resize(n);
  out.t_original.resize(n);
  out.state.resize(n);
  const double lo = tr.t_new.front(), hi = tr.t_new.back();
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    while (j + 2 < tr.t_new.size() && tr.t_new[j + 1] <= s) ++j;
    const double span = tr.t_new[j + 1] - tr.t_new[j];
    const double w = span > 0.0 ? (s - tr.t_new[j]) / span : 0.0;
    out.t_new[i] = s;
    out.t_original[i] = tr.t_original[j] + w * (tr.t_original[j + 1] - tr.t_original[j]);
    out.state[i] = tr.state[j] + (tr.state[j + 1] - tr.state[j]) * w;
  }
  return out;
}

}  // namespace orbm

#endif  // ORBM_CONFORMAL_HPP_
