// Driving paths: seeded Brownian grids and the deterministic piecewise-linear
// cycle driver that realizes the gap-amplification mechanism.
//
// Drivers store values (not increments) on a uniform grid with f(0) = (0,0),
// so a grid can be refined by linear interpolation for refinement studies.

#ifndef ORBM_DRIVERS_HPP_
#define ORBM_DRIVERS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "orbm/params.hpp"
#include "orbm/rng.hpp"
#include "orbm/vec2.hpp"

namespace orbm {

struct DrivingPath {
  std::vector<double> t;
  std::vector<Vec2> f;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return t.size(); }
  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

inline constexpr std::size_t kDefaultStepCap = 20'000'000;

// Brownian values on the grid t_k = k*dt, increments N(0, dt I), two normal
// draws per step from the counter stream of `seed`.
inline DrivingPath brownian_driver(std::uint64_t seed, double horizon, double dt,
                                   std::size_t step_cap = kDefaultStepCap) {
  if (!(horizon > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("brownian_driver: need horizon > 0 and dt > 0");
  const std::size_t steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  if (steps > step_cap) throw std::invalid_argument("brownian_driver: step cap exceeded");
  DrivingPath d;
  d.seed = seed;
  d.t.resize(steps + 1);
  d.f.resize(steps + 1);
  d.t[0] = 0.0;
  d.f[0] = {0.0, 0.0};
  CounterRng rng(seed);
  const double s = std::sqrt(dt);
  for (std::size_t k = 1; k <= steps; ++k) {
    d.t[k] = static_cast<double>(k) * dt;
    d.f[k] = d.f[k - 1] + Vec2{s * rng.normal(2 * (k - 1)), s * rng.normal(2 * (k - 1) + 1)};
  }
  return d;
}

// Every stride-th sample of a finer driver; the coarse view of the same path.
inline DrivingPath subsample_driver(const DrivingPath& d, std::size_t stride) {
  if (stride == 0 || (d.size() - 1) % stride != 0)
    throw std::invalid_argument("subsample_driver: stride must divide the step count");
  DrivingPath out;
  out.seed = d.seed;
  for (std::size_t k = 0; k < d.size(); k += stride) {
    out.t.push_back(d.t[k]);
    out.f.push_back(d.f[k]);
  }
  return out;
}

// Halve the step by linear interpolation; original samples are kept bitwise.
// Interpolation adds no oscillation, so the discrete reflection of the
// refined driver coincides with the coarse one at the shared grid points;
// convergence studies should subsample a finer Brownian driver instead.
inline DrivingPath refine_driver(const DrivingPath& d) {
  if (d.size() < 2) throw std::invalid_argument("refine_driver: driver too short");
  DrivingPath out;
  out.seed = d.seed;
  out.t.resize(2 * d.size() - 1);
  out.f.resize(2 * d.size() - 1);
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    out.t[2 * k] = d.t[k];
    out.f[2 * k] = d.f[k];
    out.t[2 * k + 1] = 0.5 * (d.t[k] + d.t[k + 1]);
    out.f[2 * k + 1] = (d.f[k] + d.f[k + 1]) * 0.5;
  }
  out.t.back() = d.t.back();
  out.f.back() = d.f.back();
  return out;
}

// One leg of the deterministic cycle driver: unit-speed axis move.
struct CycleLeg {
  Vec2 dir;              // unit axis direction
  double length = 0.0;   // analytic length
  double rounded = 0.0;  // executed length, snapped up to whole grid steps
};

// Expected coupled-gap milestones of the cycle construction, from the hand
// geometry: starting gap eta, per-stage conversions |a2| then |a1|.
struct CycleOracle {
  double eta = 0.0;
  std::vector<double> gap_at_upper_aligned;  // |a2| * beta^c * eta, cycle c
  std::vector<double> gap_at_lower_aligned;  // beta^{c+1} * eta
};

struct CycleDriver {
  DrivingPath driver;
  std::vector<CycleLeg> legs;
  CycleOracle oracle;
  Vec2 x0;  // canonical start of the pinned path (on the left face)
  Vec2 y0;  // canonical start of the offset path
};

// Piecewise-linear driver forcing gap-amplification cycles for a pair started
// at (0, start_height) and (eta, start_height).  Requires a1 > 0 > a2 (the
// convention of the amplification construction; mirrored regimes correspond
// to swapping the angles).  Per cycle, legs: lift off the lower face (cycles
// after the first), leftward leg pinning both on the left face, rightward
// repositioning so the lower-face slide stays inside the quadrant, downward
// leg landing both on the lower face.  The gap milestones are exact up to
// rounding, independent of dt; margins only make each leg complete.
inline CycleDriver cycle_driver(const DerivedParams& params, double eta, double margin,
                                int n_cycles = 1, double start_height = 1.0, double dt = 1e-3) {
  if (!(eta >= 0.0)) throw std::invalid_argument("cycle_driver: eta must be >= 0");
  if (!(params.a1 > 0.0 && params.a2 < 0.0))
    throw std::invalid_argument("cycle_driver: construction requires a1 > 0 > a2");
  if (!(margin > 0.0)) margin = 0.1 * (eta > 0.0 ? eta : 1.0);
  if (!(dt > 0.0)) throw std::invalid_argument("cycle_driver: dt must be > 0");
  const double a1 = params.a1;
  const double A = -params.a2;  // |a2|

  CycleDriver out;
  out.x0 = {0.0, start_height};
  out.y0 = {eta, start_height};
  out.oracle.eta = eta;

  // Positions of the two paths tracked through the executed (grid-snapped)
  // leg lengths, so later legs are sized from where the paths really are.
  Vec2 left = out.x0;   // path started on the left face
  Vec2 right = out.y0;
  double gap = eta;

  std::vector<CycleLeg>& legs = out.legs;
  auto add_leg = [&](Vec2 dir, double length) -> double {
    const double rounded = std::ceil(length / dt) * dt;
    legs.push_back({dir, length, rounded});
    return rounded;
  };
  for (int c = 0; c < n_cycles; ++c) {
    if (c > 0) {
      // Both sit on the lower face; lift before heading left.
      const double lift = add_leg({0.0, 1.0}, start_height);
      left.y += lift;
      right.y += lift;
    }
    // Leftward: the farther path's distance plus margin pins both.
    const double lead = std::max(left.x, right.x);
    const double lleg = add_leg({-1.0, 0.0}, lead + margin);
    left = {0.0, left.y + A * (lleg - left.x)};
    right = {0.0, right.y + A * (lleg - right.x)};
    gap *= A;
    out.oracle.gap_at_upper_aligned.push_back(gap);
    // Rightward repositioning: room for the coming lower-face slide plus the
    // margins and one step of rounding slack.
    const double room = add_leg({1.0, 0.0}, a1 * (gap + margin + dt) + margin);
    left.x += room;
    right.x += room;
    // Downward: clear the higher path, then seat both by one margin.
    const double drop = add_leg({0.0, -1.0}, std::max(left.y, right.y) + margin);
    left = {left.x - a1 * (drop - left.y), 0.0};
    right = {right.x - a1 * (drop - right.y), 0.0};
    gap *= a1;
    out.oracle.gap_at_lower_aligned.push_back(gap);
  }

  // Materialize the legs on the uniform grid.
  DrivingPath& d = out.driver;
  d.t.push_back(0.0);
  d.f.push_back({0.0, 0.0});
  Vec2 value{0.0, 0.0};
  std::size_t k = 0;
  for (const CycleLeg& leg : legs) {
    const std::size_t steps = static_cast<std::size_t>(std::llround(leg.rounded / dt));
    for (std::size_t i = 0; i < steps; ++i) {
      value += leg.dir * dt;
      ++k;
      d.t.push_back(static_cast<double>(k) * dt);
      d.f.push_back(value);
    }
  }
  return out;
}

}  // namespace orbm

#endif  // ORBM_DRIVERS_HPP_
