#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "orbm/analytics.hpp"
#include "orbm/conformal.hpp"
#include "orbm/sim.hpp"

using namespace orbm;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;
const WedgeAngles kAngles{pi / 3, -pi / 6};
}  // namespace

TEST_CASE("simulate stop reasons") {
  const auto spec = ReflectionSpec::quadrant_for(kAngles);
  const MapSpec map = MapSpec::from_angles(kAngles);

  SECTION("horizon") {
    const Trajectory tr = simulate({1.0, 1.0}, spec, DriftSpec::none(), 7, 0.05, 1e-3);
    CHECK(tr.stop_reason == StopReason::Horizon);
    CHECK(tr.path.size() == 51);
  }
  SECTION("level hit with interpolation") {
    StopRules rules;
    rules.map = map;
    rules.h_low = 0.5;
    rules.h_high = 2.0;
    Vec2 x0{1.0, 0.5};
    const Trajectory tr = simulate(x0, spec, DriftSpec::none(), 7, 50.0, 1e-3, rules);
    REQUIRE(tr.stop_reason == StopReason::LevelHit);
    CHECK((tr.stop_h == 0.5 || tr.stop_h == 2.0));
    CHECK(tr.stop_time <= tr.path.t.back());
    CHECK(tr.stop_time >= tr.path.t[tr.path.size() - 2]);
  }
  SECTION("origin guard") {
    StopRules rules;
    rules.stop_at_origin_guard = true;
    rules.origin_guard_radius = 0.5;
    const Trajectory tr = simulate({0.55, 0.0}, spec, DriftSpec::none(), 3, 10.0, 1e-3, rules);
    CHECK(tr.stop_reason == StopReason::OriginNeighborhood);
    CHECK(tr.origin_entries >= 1);
  }
}

TEST_CASE("strip trajectories stay confined") {
  const auto spec = ReflectionSpec::strip_for(kAngles);
  const Trajectory tr = simulate({0.0, spec.y_lo + 0.5 * (spec.y_hi - spec.y_lo)}, spec,
                                 DriftSpec::strip_conditioned(), 11, 5.0, 1e-4);
  for (const Vec2& p : tr.path.state) {
    REQUIRE(p.y >= spec.y_lo - kFaceTol);
    REQUIRE(p.y <= spec.y_hi + kFaceTol);
  }
  CHECK(tr.clipped_steps == 0);  // cot is tame on this strip
}

TEST_CASE("martingale property of stopped h") {
  // Driftless quadrant run stopped at symmetric h-levels: E h(stop) = h(x0).
  const MapSpec map = MapSpec::from_angles({3 * pi / 8, pi / 16});
  const double b0 = 1.0;
  // Start on the mid ray, h = b0.
  const double th = pi / 4;
  const double r0 = std::pow(b0 / std::cos(map.alpha * th - map.theta1), 1.0 / map.alpha);
  const Vec2 x0{r0 * std::cos(th), r0 * std::sin(th)};
  REQUIRE_THAT(h_value(x0, map), WithinAbs(b0, 1e-12));

  const McReport rep = monte_carlo(
      McConfig{4000, 2718, 2},
      [&](std::uint64_t seed, std::size_t) -> std::optional<double> {
        HLevelOptions opt;
        opt.angles = {map.theta1, map.theta2};
        opt.drift = DriftKind::None;
        opt.x0 = x0;
        opt.h_low = 0.6;
        opt.h_high = 1.4;
        opt.dt = 2e-4;
        opt.seed = seed;
        const HLevelResult r = run_to_h_level(opt);
        if (r.outcome == HLevelResult::Outcome::HitLow ||
            r.outcome == HLevelResult::Outcome::HitHigh)
          return r.h_stop;
        return std::nullopt;
      });
  CHECK_THAT(rep.estimate, WithinAbs(b0, 4.0 * rep.std_error));
  CHECK(rep.flags.at("excluded") < 40);
}

TEST_CASE("h-transform hitting law") {
  const MapSpec map = MapSpec::from_angles({3 * pi / 8, pi / 16});
  const double a = 0.5, b0 = 1.0, cap = 4.0;
  const double th = pi / 4;
  const double r0 = std::pow(b0 / std::cos(map.alpha * th - map.theta1), 1.0 / map.alpha);
  const Vec2 x0{r0 * std::cos(th), r0 * std::sin(th)};

  const McReport rep = monte_carlo(
      McConfig{3000, 3141, 2},
      [&](std::uint64_t seed, std::size_t) -> std::optional<double> {
        HLevelOptions opt;
        opt.angles = {map.theta1, map.theta2};
        opt.drift = DriftKind::HTransform;
        opt.x0 = x0;
        opt.h_low = a;
        opt.h_high = cap;
        opt.dt = 2e-4;
        opt.seed = seed;
        const HLevelResult r = run_to_h_level(opt);
        if (r.outcome == HLevelResult::Outcome::HitLow) return 1.0;
        if (r.outcome == HLevelResult::Outcome::HitHigh) return 0.0;
        return std::nullopt;
      });
  // Complete the tail beyond the cap with the scale law at the far level.
  const double estimate = rep.estimate + (1.0 - rep.estimate) * (a / cap);
  const double se = rep.std_error * (1.0 - a / cap);
  CHECK_THAT(estimate, WithinAbs(a / b0, 4.0 * se + 0.01));
}

TEST_CASE("excursion statistics on a synthetic zigzag") {
  // Hand-built strip path touching lower, upper, lower, upper, lower.
  ReflectedPath p;
  const double lo = 0.2, hi = 1.0;
  auto push = [&](double t, double x, double y, double ll, double lu) {
    p.t.push_back(t);
    p.state.push_back({x, y});
    p.l_lower.push_back(ll);
    p.l_upper.push_back(lu);
  };
  push(0.0, 0.0, 0.6, 0.0, 0.0);
  push(1.0, 0.5, lo, 0.1, 0.0);   // S^d_1
  push(2.0, 1.0, 0.6, 0.1, 0.0);
  push(3.0, 1.5, hi, 0.1, 0.2);   // S^u_1
  push(4.0, 2.0, 0.6, 0.1, 0.2);
  push(5.0, 2.5, lo, 0.3, 0.2);   // S^d_2
  push(6.0, 3.0, lo, 0.5, 0.2);   // still on the face: no new hit
  push(7.0, 3.5, hi, 0.5, 0.4);   // S^u_2
  push(8.0, 4.0, lo, 0.7, 0.4);   // S^d_3
  push(9.0, 4.5, hi, 0.7, 0.6);   // S^u_3
  const auto spec = ReflectionSpec::strip(1.0, -1.0, lo, hi);
  const ExcursionStats st = excursion_stats(p, spec);
  REQUIRE(st.s_down == std::vector<std::size_t>{1, 5, 8});
  REQUIRE(st.s_up == std::vector<std::size_t>{3, 7, 9});
  REQUIRE(st.s_up_minus == std::vector<std::size_t>{1, 6, 8});
  for (std::size_t k = 0; k < st.s_up.size(); ++k) {
    REQUIRE(st.s_down[k] <= st.s_up[k]);
    if (k + 1 < st.s_down.size()) REQUIRE(st.s_up[k] <= st.s_down[k + 1]);
  }
  REQUIRE(st.cycle_dx.size() == 2);
  CHECK_THAT(st.cycle_dx[0], WithinAbs(2.0, 1e-15));
  CHECK_THAT(st.cycle_dx[1], WithinAbs(1.5, 1e-15));
}

TEST_CASE("trajectory without upper hits has empty up-sequences") {
  ReflectedPath p;
  for (int k = 0; k <= 10; ++k) {
    p.t.push_back(k * 0.1);
    p.state.push_back({0.1 * k, 0.5});
    p.l_lower.push_back(0.0);
    p.l_upper.push_back(0.0);
  }
  const auto spec = ReflectionSpec::strip(1.0, -1.0, 0.2, 1.0);
  const auto st = excursion_stats(p, spec, kFaceTol, WindowSpec{0.0, 0.5, 2});
  CHECK(st.s_up.empty());
  for (int nd : st.n_d) CHECK(nd == 0);
}

TEST_CASE("window counts differ by at most one") {
  StripCycleOptions opt;
  opt.angles = kAngles;
  opt.dt = 2e-4;
  opt.target_cycles = 200;
  opt.burnin_cycles = 2;
  opt.windows = WindowSpec{1.0, 1.0, 40};
  for (std::uint64_t seed : {9ull, 10ull, 11ull}) {
    opt.seed = seed;
    const StripCycleStats st = run_strip_cycles(opt);
    REQUIRE(!st.n_d.empty());
    for (std::size_t w = 0; w < st.n_d.size(); ++w) {
      REQUIRE(st.n_d[w] <= st.n_D[w]);
      REQUIRE(st.n_D[w] - st.n_d[w] <= 1);
    }
  }
}

TEST_CASE("monte carlo harness") {
  SECTION("constant statistic") {
    const McReport rep =
        monte_carlo(McConfig{100, 1, 2}, [](std::uint64_t, std::size_t) { return 1.0; });
    CHECK(rep.estimate == 1.0);
    CHECK(rep.std_error == 0.0);
    CHECK(rep.n == 100);
  }
  SECTION("driver endpoint mean vanishes") {
    const McReport rep = monte_carlo(
        McConfig{10000, 77, 2}, [](std::uint64_t seed, std::size_t) -> std::optional<double> {
          return brownian_driver(seed, 1.0, 0.01).f.back().x;
        });
    CHECK(std::fabs(rep.estimate) < 4.0 * rep.std_error);
    CHECK_THAT(rep.std_error, WithinAbs(0.01, 0.002));  // sigma = 1 over sqrt(1e4)
  }
  SECTION("reproducible and thread-count independent") {
    auto stat = [](std::uint64_t seed, std::size_t) -> std::optional<double> {
      CounterRng rng(seed);
      return rng.next_normal();
    };
    const McReport a = monte_carlo(McConfig{500, 42, 1}, stat);
    const McReport b = monte_carlo(McConfig{500, 42, 2}, stat);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
  }
  SECTION("failure rate aborts") {
    CHECK_THROWS_AS(monte_carlo(McConfig{10, 1, 1, 0.2},
                                [](std::uint64_t, std::size_t) -> std::optional<double> {
                                  throw std::runtime_error("boom");
                                }),
                    std::runtime_error);
  }
  SECTION("needs two replicas") {
    CHECK_THROWS_AS(monte_carlo(McConfig{1, 1, 1}, [](std::uint64_t, std::size_t) { return 0.0; }),
                    std::invalid_argument);
  }
}

TEST_CASE("drift clipping fires near the origin under the h-transform") {
  const MapSpec map = MapSpec::from_angles(kAngles);
  const DriftSpec drift = DriftSpec::h_transform(map);
  const double dt = 1e-4;
  bool clipped = false;
  // |grad h / h| ~ alpha/|z| blows past the cap close to the origin.
  clip_drift(drift.value({1e-6, 1e-6}), drift_cap(dt), &clipped);
  CHECK(clipped);
  clipped = false;
  clip_drift(drift.value({1.0, 1.0}), drift_cap(dt), &clipped);
  CHECK(!clipped);
}

TEST_CASE("exit_1d bridge correction removes the barrier bias") {
  // Driftless exit probabilities from the middle of (0,1) are 1/2 exactly;
  // with the start at 0.3 the linear scale gives 0.3.
  const McReport rep = monte_carlo(
      McConfig{20000, 5, 2}, [&](std::uint64_t seed, std::size_t) -> std::optional<double> {
        CounterRng rng(seed);
        const auto r = exit_1d(0.3, 0.0, 1.0, [](double) { return 0.0; }, 1e-3, rng);
        if (!r.exited) return std::nullopt;
        return r.hit_upper ? 1.0 : 0.0;
      });
  CHECK_THAT(rep.estimate, WithinAbs(0.3, 4.0 * rep.std_error));
}

TEST_CASE("wedge vertical coordinate accrues the new clock as quadratic variation") {
  const MapSpec map = MapSpec::from_angles(kAngles);
  const auto spec = ReflectionSpec::quadrant_for(kAngles);
  double qv = 0.0, clock = 0.0;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 16; ++seed) {
    const Trajectory tr = simulate({2.0, 1.0}, spec, DriftSpec::none(), seed, 0.5, 5e-5);
    TransportedTrajectory w;
    try {
      w = transport(tr.path.t, tr.path.state, map, TransportTarget::Wedge, 0.05);
    } catch (const std::domain_error&) {
      continue;  // rare origin-guard abort
    }
    for (std::size_t k = 1; k < w.state.size(); ++k) {
      const double d = w.state[k].y - w.state[k - 1].y;
      qv += d * d;
    }
    clock += w.t_new.back();
    ++runs;
  }
  REQUIRE(runs >= 12);
  CHECK_THAT(qv / clock, WithinAbs(1.0, 0.05));
}
