// Stochastic simulation on top of the discretized Skorokhod map: state
// drifts (the grad(h)/h conditioning in the quadrant, (1, cot y) in the
// strip), stop rules, excursion statistics, streaming cycle collectors and a
// seeded Monte Carlo harness with order-independent aggregation.
//
// Discretization conventions: per step, displacement = driver increment +
// drift(state)*dt, then one LCP step.  Face hits are read off the grid; level
// crossings of h are refined by linear interpolation between the straddling
// grid points.  Drift components are clipped at 0.1/sqrt(dt) and clipped
// steps are counted.  Killed one-dimensional diffusions used as oracles apply
// the Brownian-bridge crossing probability exp(-2 d1 d2 / dt) per step, which
// removes the O(sqrt(dt)) barrier bias of grid-only detection.

#ifndef ORBM_SIM_HPP_
#define ORBM_SIM_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "orbm/conformal.hpp"
#include "orbm/drivers.hpp"
#include "orbm/params.hpp"
#include "orbm/reflect.hpp"
#include "orbm/rng.hpp"
#include "orbm/vec2.hpp"

namespace orbm {

enum class DriftKind { None, HTransform, StripConditioned };

struct DriftSpec {
  DriftKind kind = DriftKind::None;
  MapSpec map;  // used by HTransform

  static DriftSpec none() { return {}; }
  static DriftSpec h_transform(const MapSpec& m) { return {DriftKind::HTransform, m}; }
  static DriftSpec strip_conditioned() { return {DriftKind::StripConditioned, {}}; }

  Vec2 value(const Vec2& state) const {
    switch (kind) {
      case DriftKind::None:
        return {0.0, 0.0};
      case DriftKind::HTransform: {
        const double h = h_value(state, map);
        if (h <= 0.0) return {0.0, 0.0};
        return h_gradient(state, map) / h;
      }
      case DriftKind::StripConditioned:
        return {1.0, 1.0 / std::tan(state.y)};
    }
    return {0.0, 0.0};
  }
};

inline double drift_cap(double dt) { return 0.1 / std::sqrt(dt); }

// Clip each coordinate at +-cap; reports whether clipping fired.
inline Vec2 clip_drift(const Vec2& v, double cap, bool* clipped) {
  Vec2 out = v;
  if (out.x > cap) { out.x = cap; *clipped = true; }
  if (out.x < -cap) { out.x = -cap; *clipped = true; }
  if (out.y > cap) { out.y = cap; *clipped = true; }
  if (out.y < -cap) { out.y = -cap; *clipped = true; }
  return out;
}

enum class StopReason { Horizon, LevelHit, OriginNeighborhood };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Horizon: return "horizon";
    case StopReason::LevelHit: return "level_hit";
    case StopReason::OriginNeighborhood: return "origin_neighborhood";
  }
  return "?";
}

struct StopRules {
  std::optional<double> h_low;   // stop when h(X) reaches the level from above
  std::optional<double> h_high;  // stop when h(X) reaches the level from below
  MapSpec map;                   // defines h for the level rules
  bool stop_at_origin_guard = false;
  double origin_guard_radius = 0.0;  // 0 => 10*sqrt(dt)
};

struct Trajectory {
  ReflectedPath path;
  DriftKind drift = DriftKind::None;
  StopReason stop_reason = StopReason::Horizon;
  std::size_t stop_index = 0;
  double stop_time = 0.0;
  double stop_h = std::numeric_limits<double>::quiet_NaN();
  std::size_t clipped_steps = 0;
  std::size_t origin_entries = 0;
};

// Euler walk of the reflected SDE along a driver, recording the whole path.
inline Trajectory simulate(const Vec2& x0, const ReflectionSpec& spec, const DriftSpec& drift,
                           const DrivingPath& driver, const StopRules& rules = {}) {
  if (!spec.contains(x0)) throw std::invalid_argument("simulate: x0 outside the domain");
  if (drift.kind == DriftKind::HTransform && x0.x == 0.0 && x0.y == 0.0)
    throw std::invalid_argument("simulate: h-transform start must not be the origin");
  const double dt = driver.dt();
  const double cap = drift_cap(dt);
  const double guard =
      rules.origin_guard_radius > 0.0 ? rules.origin_guard_radius : 10.0 * std::sqrt(dt);
  const bool need_h = rules.h_low.has_value() || rules.h_high.has_value();

  Trajectory traj;
  traj.drift = drift.kind;
  ReflectedPath& path = traj.path;
  path.t.push_back(driver.t[0]);
  path.state.push_back(x0);
  path.l_lower.push_back(0.0);
  path.l_upper.push_back(0.0);

  double h_prev = need_h ? h_value(x0, rules.map) : 0.0;
  bool inside_guard = x0.norm() < guard;
  if (inside_guard) ++traj.origin_entries;

  for (std::size_t k = 1; k < driver.size(); ++k) {
    const Vec2 prev = path.state.back();
    Vec2 w = driver.f[k] - driver.f[k - 1];
    if (drift.kind != DriftKind::None) {
      bool clipped = false;
      w += clip_drift(drift.value(prev), cap, &clipped) * (driver.t[k] - driver.t[k - 1]);
      if (clipped) ++traj.clipped_steps;
    }
    const LcpStep step = one_step_reflect(prev, w, spec);
    path.t.push_back(driver.t[k]);
    path.state.push_back(step.post_state);
    path.l_lower.push_back(path.l_lower.back() + step.dm_lower);
    path.l_upper.push_back(path.l_upper.back() + step.dm_upper);
    if (step.dm_lower > 0.0) path.events_lower.push_back(k);
    if (step.dm_upper > 0.0) path.events_upper.push_back(k);
    traj.stop_index = path.size() - 1;
    traj.stop_time = path.t.back();

    const bool now_inside = step.post_state.norm() < guard;
    if (now_inside && !inside_guard) ++traj.origin_entries;
    inside_guard = now_inside;
    if (rules.stop_at_origin_guard && now_inside) {
      traj.stop_reason = StopReason::OriginNeighborhood;
      return traj;
    }

    if (need_h) {
      const double h_now = h_value(step.post_state, rules.map);
      const bool low = rules.h_low && h_now <= *rules.h_low;
      const bool high = rules.h_high && h_now >= *rules.h_high;
      if (low || high) {
        const double level = low ? *rules.h_low : *rules.h_high;
        const double span = h_now - h_prev;
        const double frac = span != 0.0 ? (level - h_prev) / span : 1.0;
        traj.stop_reason = StopReason::LevelHit;
        traj.stop_h = level;
        traj.stop_time = path.t[k - 1] + std::clamp(frac, 0.0, 1.0) * (path.t[k] - path.t[k - 1]);
        return traj;
      }
      h_prev = h_now;
    }
  }
  traj.stop_reason = StopReason::Horizon;
  return traj;
}

inline Trajectory simulate(const Vec2& x0, const ReflectionSpec& spec, const DriftSpec& drift,
                           std::uint64_t seed, double horizon, double dt,
                           const StopRules& rules = {}) {
  return simulate(x0, spec, drift, brownian_driver(seed, horizon, dt), rules);
}

// ---------------------------------------------------------------------------
// Excursion statistics.

struct WindowSpec {
  double origin = 0.0;  // first window opens at the crossing of this level
  double width = 1.0;
  int count = 0;
};

struct ExcursionStats {
  std::vector<std::size_t> s_down;      // alternating lower-face hit indices
  std::vector<std::size_t> s_up;        // alternating upper-face hit indices
  std::vector<std::size_t> s_up_minus;  // start of the excursion ending at s_up
  std::vector<double> cycle_dx;         // x displacement per down-to-down cycle
  std::vector<int> n_d;                 // per-window counts, start-constrained
  std::vector<int> n_D;                 // per-window counts, unconstrained
};

namespace detail {

// Online alternation tracker shared by the offline op and the streaming
// collectors.  Feed one (on_lower, on_upper, x, index) tuple per grid point.
class ExcursionTracker {
 public:
  void feed(bool on_lower, bool on_upper, double x, std::size_t idx) {
    if (on_lower) {
      last_lower_ = idx;
      if (state_ != 1) {
        state_ = 1;
        stats_.s_down.push_back(idx);
        down_x_.push_back(x);
      }
    } else if (on_upper && state_ == 1) {
      state_ = 2;
      stats_.s_up.push_back(idx);
      stats_.s_up_minus.push_back(last_lower_);
    }
  }
  void finalize() {
    for (std::size_t k = 0; k + 1 < down_x_.size(); ++k)
      stats_.cycle_dx.push_back(down_x_[k + 1] - down_x_[k]);
  }
  ExcursionStats& stats() { return stats_; }
  const std::vector<double>& down_x() const { return down_x_; }

 private:
  int state_ = 0;  // 0 unset, 1 last face lower, 2 last face upper
  std::size_t last_lower_ = 0;
  std::vector<double> down_x_;
  ExcursionStats stats_;
};

inline void fill_window_counts(ExcursionStats& st, const std::vector<std::size_t>& level_cross,
                               int count) {
  // level_cross[j]: first index at or beyond level j (monotone levels).
  for (int w = 0; w + 1 <= count && w + 1 < static_cast<int>(level_cross.size()); ++w) {
    const std::size_t lo = level_cross[w], hi = level_cross[w + 1];
    int nd = 0, nD = 0;
    for (std::size_t j = 0; j < st.s_up.size(); ++j) {
      if (st.s_up[j] >= lo && st.s_up[j] < hi) {
        ++nD;
        if (st.s_up_minus[j] >= lo) ++nd;
      }
    }
    st.n_d.push_back(nd);
    st.n_D.push_back(nD);
  }
}

}  // namespace detail

// Hit sequences, per-cycle displacements and windowed excursion counts of a
// recorded path.  Windows are measured on the first state coordinate (the
// log-scale progress coordinate of the strip).
inline ExcursionStats excursion_stats(const ReflectedPath& path, const ReflectionSpec& spec,
                                      double face_tol = kFaceTol,
                                      const std::optional<WindowSpec>& windows = std::nullopt) {
  auto on_lower = [&](const Vec2& p) {
    return spec.domain == DomainKind::Quadrant ? std::fabs(p.y) <= face_tol
                                               : std::fabs(p.y - spec.y_lo) <= face_tol;
  };
  auto on_upper = [&](const Vec2& p) {
    return spec.domain == DomainKind::Quadrant ? std::fabs(p.x) <= face_tol
                                               : std::fabs(p.y - spec.y_hi) <= face_tol;
  };
  detail::ExcursionTracker tracker;
  std::vector<std::size_t> level_cross;
  int next_level = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Vec2& p = path.state[k];
    if (windows) {
      while (next_level <= windows->count &&
             p.x >= windows->origin + windows->width * next_level) {
        level_cross.push_back(k);
        ++next_level;
      }
    }
    tracker.feed(on_lower(p), on_upper(p), p.x, k);
  }
  tracker.finalize();
  ExcursionStats st = std::move(tracker.stats());
  if (windows) detail::fill_window_counts(st, level_cross, windows->count);
  return st;
}

// ---------------------------------------------------------------------------
// Monte Carlo harness.

struct McConfig {
  std::size_t n_replicas = 0;
  std::uint64_t seed_base = 0;
  unsigned threads = 1;
  double max_failure_rate = 0.5;
};

struct McReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;  // replicas included in the estimate
  std::uint64_t seed_base = 0;
  std::map<std::string, double> flags;
};

inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline McReport summarize(const std::vector<double>& values, std::uint64_t seed_base) {
  McReport rep;
  rep.seed_base = seed_base;
  rep.n = values.size();
  if (values.empty()) return rep;
  rep.estimate = pairwise_sum(values.data(), values.size()) / static_cast<double>(values.size());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - rep.estimate;
      sq[i] = d * d;
    }
    const double var =
        pairwise_sum(sq.data(), sq.size()) / static_cast<double>(values.size() - 1);
    rep.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return rep;
}

// Replica k runs with seed replica_seed(seed_base, k); a replica may opt out
// by returning nullopt (counted, excluded).  Aggregation collects results in
// replica order and sums pairwise, so the report does not depend on the
// thread count.
template <class F>
inline McReport monte_carlo(const McConfig& cfg, F&& replica) {
  if (cfg.n_replicas < 2) throw std::invalid_argument("monte_carlo: need n >= 2 replicas");
  std::vector<std::optional<double>> results(cfg.n_replicas);
  std::atomic<std::size_t> failures{0};
  std::atomic<std::size_t> cursor{0};
  const unsigned nthreads = std::max(1u, cfg.threads);
  auto worker = [&]() {
    while (true) {
      const std::size_t k = cursor.fetch_add(64);
      if (k >= cfg.n_replicas) break;
      const std::size_t end = std::min(cfg.n_replicas, k + 64);
      for (std::size_t i = k; i < end; ++i) {
        try {
          results[i] = replica(replica_seed(cfg.seed_base, i), i);
        } catch (const std::exception&) {
          results[i] = std::nullopt;
          failures.fetch_add(1);
        }
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  const double fail_rate =
      static_cast<double>(failures.load()) / static_cast<double>(cfg.n_replicas);
  if (fail_rate > cfg.max_failure_rate)
    throw std::runtime_error("monte_carlo: replica failure rate " + std::to_string(fail_rate) +
                             " exceeds threshold");
  std::vector<double> values;
  values.reserve(cfg.n_replicas);
  for (const auto& r : results)
    if (r) values.push_back(*r);
  McReport rep = summarize(values, cfg.seed_base);
  rep.flags["excluded"] = static_cast<double>(cfg.n_replicas - values.size());
  rep.flags["failures"] = static_cast<double>(failures.load());
  return rep;
}

// ---------------------------------------------------------------------------
// Killed one-dimensional diffusion dY = mu(Y) dt + dW, absorbed at a and b.

struct Exit1DResult {
  bool exited = false;
  bool hit_upper = false;
  double time = 0.0;
};

template <class Mu>
inline Exit1DResult exit_1d(double y0, double a, double b, Mu&& mu, double dt, CounterRng& rng,
                            std::size_t max_steps = 50'000'000, bool bridge = true) {
  if (!(a < y0 && y0 < b)) throw std::invalid_argument("exit_1d: y0 outside (a, b)");
  double y = y0;
  double t = 0.0;
  Exit1DResult res;
  for (std::size_t k = 0; k < max_steps; ++k) {
    const double ynew = y + mu(y) * dt + std::sqrt(dt) * rng.next_normal();
    if (ynew <= a) {
      res.exited = true;
      res.hit_upper = false;
      res.time = t + dt * ((y - a) / (y - ynew));
      return res;
    }
    if (ynew >= b) {
      res.exited = true;
      res.hit_upper = true;
      res.time = t + dt * ((b - y) / (ynew - y));
      return res;
    }
    if (bridge) {
      // Brownian-bridge crossing of the nearer barrier first.
      const double pa = std::exp(-2.0 * (y - a) * (ynew - a) / dt);
      const double pb = std::exp(-2.0 * (b - y) * (b - ynew) / dt);
      const bool a_nearer = (y - a) < (b - y);
      const double p1 = a_nearer ? pa : pb;
      const double p2 = a_nearer ? pb : pa;
      if (p1 > 1e-18 && rng.next_uniform() < p1) {
        res.exited = true;
        res.hit_upper = !a_nearer;
        res.time = t + 0.5 * dt;
        return res;
      }
      if (p2 > 1e-18 && rng.next_uniform() < p2) {
        res.exited = true;
        res.hit_upper = a_nearer;
        res.time = t + 0.5 * dt;
        return res;
      }
    }
    y = ynew;
    t += dt;
  }
  return res;  // not exited
}

// Drift of the unfolded diffusion used for the leg exit times: cot y on the
// original half, antisymmetric reflection through `fold` on the other half.
inline double unfolded_cot_drift(double y, double fold, bool fold_is_lower) {
  if (fold_is_lower) return y >= fold ? 1.0 / std::tan(y) : -1.0 / std::tan(2.0 * fold - y);
  return y <= fold ? 1.0 / std::tan(y) : -1.0 / std::tan(2.0 * fold - y);
}

// ---------------------------------------------------------------------------
// Streaming strip-cycle collector (no path storage).

struct StripCycleOptions {
  WedgeAngles angles;
  double dt = 1e-4;
  std::uint64_t seed = 0;
  int target_cycles = 1000;
  int burnin_cycles = 5;
  std::size_t max_steps = 200'000'000;
  std::optional<WindowSpec> windows;  // progress windows for excursion rates
};

struct StripCycleStats {
  std::vector<double> cycle_dx;       // after burn-in
  std::vector<double> d2u_times;      // S^u_k - S^d_k, after burn-in
  std::vector<double> u2d_times;      // S^d_{k+1} - S^u_k
  std::vector<double> d2u_lower_lt;   // lower local time accumulated on the leg
  std::vector<int> n_d, n_D;          // per window, if windows were requested
  double total_progress = 0.0;        // x displacement between first/last S^d
  std::size_t steps = 0;
  bool completed = false;
};

// Conditioned strip process from the midline; cycles are down-to-down.
inline StripCycleStats run_strip_cycles(const StripCycleOptions& opt) {
  const ReflectionSpec spec = ReflectionSpec::strip_for(opt.angles);
  const DriftSpec drift = DriftSpec::strip_conditioned();
  const double dt = opt.dt;
  const double cap = drift_cap(dt);
  const double sdt = std::sqrt(dt);
  CounterRng rng(opt.seed);
  Vec2 state{0.0, 0.5 * (spec.y_lo + spec.y_hi)};

  StripCycleStats out;
  detail::ExcursionTracker tracker;
  std::vector<std::size_t> level_cross;
  std::vector<double> down_t, up_t, up_llow, down_llow;
  double l_lower = 0.0;
  int next_level = 0;

  const int want = opt.burnin_cycles + opt.target_cycles;
  for (std::size_t k = 0;; ++k) {
    if (k >= opt.max_steps) break;
    if (static_cast<int>(tracker.stats().s_down.size()) > want) {
      out.completed = true;
      break;
    }
    bool clipped = false;
    Vec2 w = clip_drift(drift.value(state), cap, &clipped) * dt;
    w += Vec2{sdt * rng.next_normal(), sdt * rng.next_normal()};
    const LcpStep step = one_step_reflect(state, w, spec);
    state = step.post_state;
    l_lower += step.dm_lower;
    const bool on_low = step.dm_lower > 0.0;
    const bool on_up = step.dm_upper > 0.0;
    const std::size_t idx = k + 1;
    if (opt.windows) {
      while (next_level <= opt.windows->count &&
             state.x >= opt.windows->origin + opt.windows->width * next_level) {
        level_cross.push_back(idx);
        ++next_level;
      }
    }
    const std::size_t n_down_before = tracker.stats().s_down.size();
    const std::size_t n_up_before = tracker.stats().s_up.size();
    tracker.feed(on_low, on_up, state.x, idx);
    if (tracker.stats().s_down.size() > n_down_before) {
      down_t.push_back(static_cast<double>(idx) * dt);
      down_llow.push_back(l_lower);
    }
    if (tracker.stats().s_up.size() > n_up_before) {
      up_t.push_back(static_cast<double>(idx) * dt);
      up_llow.push_back(l_lower);
    }
    out.steps = idx;
  }
  tracker.finalize();
  const ExcursionStats& st = tracker.stats();
  const std::size_t burn = static_cast<std::size_t>(opt.burnin_cycles);
  for (std::size_t k = burn; k < st.cycle_dx.size(); ++k) out.cycle_dx.push_back(st.cycle_dx[k]);
  for (std::size_t k = burn; k < up_t.size(); ++k) {
    out.d2u_times.push_back(up_t[k] - down_t[k]);
    out.d2u_lower_lt.push_back(up_llow[k] - down_llow[k]);
    if (k + 1 < down_t.size()) out.u2d_times.push_back(down_t[k + 1] - up_t[k]);
  }
  if (tracker.down_x().size() > burn + 1)
    out.total_progress = tracker.down_x().back() - tracker.down_x()[burn];
  if (opt.windows) {
    ExcursionStats tmp = st;
    detail::fill_window_counts(tmp, level_cross, opt.windows->count);
    out.n_d = std::move(tmp.n_d);
    out.n_D = std::move(tmp.n_D);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Streaming quadrant run stopped at h-levels (martingale / hitting checks).

struct HLevelOptions {
  WedgeAngles angles;
  DriftKind drift = DriftKind::None;
  Vec2 x0;
  double h_low = 0.0;
  double h_high = 0.0;
  double dt = 1e-4;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100'000'000;
  double origin_guard = 0.0;  // 0 => 10*sqrt(dt)
};

struct HLevelResult {
  enum class Outcome { HitLow, HitHigh, OriginGuard, StepCap } outcome = Outcome::StepCap;
  double h_stop = 0.0;  // interpolated level value at the stop
  double time = 0.0;
  std::size_t clipped_steps = 0;
};

inline HLevelResult run_to_h_level(const HLevelOptions& opt) {
  const ReflectionSpec spec = ReflectionSpec::quadrant_for(opt.angles);
  const MapSpec map = MapSpec::from_angles(opt.angles);
  const DriftSpec drift{opt.drift, map};
  const double dt = opt.dt;
  const double cap = drift_cap(dt);
  const double sdt = std::sqrt(dt);
  const double guard = opt.origin_guard > 0.0 ? opt.origin_guard : 10.0 * sdt;
  CounterRng rng(opt.seed);
  Vec2 state = opt.x0;
  double h_prev = h_value(state, map);
  HLevelResult res;
  for (std::size_t k = 0; k < opt.max_steps; ++k) {
    Vec2 w{sdt * rng.next_normal(), sdt * rng.next_normal()};
    if (opt.drift != DriftKind::None) {
      bool clipped = false;
      w += clip_drift(drift.value(state), cap, &clipped) * dt;
      if (clipped) ++res.clipped_steps;
    }
    state = one_step_reflect(state, w, spec).post_state;
    const double h_now = h_value(state, map);
    const double t_now = static_cast<double>(k + 1) * dt;
    if (h_now <= opt.h_low || h_now >= opt.h_high) {
      const bool low = h_now <= opt.h_low;
      const double level = low ? opt.h_low : opt.h_high;
      const double span = h_now - h_prev;
      const double frac = span != 0.0 ? std::clamp((level - h_prev) / span, 0.0, 1.0) : 1.0;
      res.outcome = low ? HLevelResult::Outcome::HitLow : HLevelResult::Outcome::HitHigh;
      res.h_stop = level;
      res.time = t_now - dt + frac * dt;
      return res;
    }
    if (state.norm() < guard) {
      res.outcome = HLevelResult::Outcome::OriginGuard;
      res.h_stop = h_now;
      res.time = t_now;
      return res;
    }
    h_prev = h_now;
  }
  return res;
}

}  // namespace orbm

#endif  // ORBM_SIM_HPP_
