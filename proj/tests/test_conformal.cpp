#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "orbm/conformal.hpp"
#include "orbm/drivers.hpp"
#include "orbm/rng.hpp"

using namespace orbm;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = std::numbers::pi;
const MapSpec kMap = MapSpec::from_angles({pi / 3, -pi / 6});  // alpha = 1/3
}  // namespace

TEST_CASE("wedge edge angles") {
  // Positive x-axis maps to the lower wedge edge at angle pi/2 - theta1.
  const Vec2 w = to_wedge({1.0, 0.0}, kMap);
  CHECK_THAT(std::atan2(w.y, w.x), WithinAbs(pi / 2 - pi / 3, 1e-12));
  CHECK_THAT(w.norm(), WithinAbs(1.0, 1e-12));

  // i maps to angle pi/2 + theta2 = (pi/2 - theta1) + alpha*pi/2.
  const Vec2 u = to_wedge({0.0, 1.0}, kMap);
  CHECK_THAT(std::atan2(u.y, u.x), WithinAbs(pi / 2 - pi / 6, 1e-12));

  CHECK_THAT(kMap.lower_edge_angle() + kMap.alpha * (pi / 2), WithinAbs(kMap.upper_edge_angle(), 1e-12));
}

TEST_CASE("round trip through the wedge") {
  CounterRng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 z{0.05 + 3.0 * rng.next_uniform(), 0.05 + 3.0 * rng.next_uniform()};
    const Vec2 back = from_wedge(to_wedge(z, kMap), kMap);
    REQUIRE_THAT((back - z).norm(), WithinAbs(0.0, 1e-12 * (1.0 + z.norm())));
  }
  CHECK(to_wedge({0.0, 0.0}, kMap) == Vec2{0.0, 0.0});  // fixed point
}

TEST_CASE("h agrees with the wedge imaginary part") {
  CounterRng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 z{3.0 * rng.next_uniform(), 3.0 * rng.next_uniform()};
    REQUIRE_THAT(h_value(z, kMap), WithinAbs(to_wedge(z, kMap).y, 1e-12));
  }
  // On the lower face h = r^alpha cos(theta1) > 0.
  const double r = 2.0;
  CHECK_THAT(h_value({r, 0.0}, kMap),
             WithinAbs(std::pow(r, kMap.alpha) * std::cos(kMap.theta1), 1e-13));
}

TEST_CASE("h gradient matches finite differences") {
  CounterRng rng(5);
  const double step = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const Vec2 z{0.2 + 2.0 * rng.next_uniform(), 0.2 + 2.0 * rng.next_uniform()};
    const Vec2 g = h_gradient(z, kMap);
    const double gx =
        (h_value({z.x + step, z.y}, kMap) - h_value({z.x - step, z.y}, kMap)) / (2 * step);
    const double gy =
        (h_value({z.x, z.y + step}, kMap) - h_value({z.x, z.y - step}, kMap)) / (2 * step);
    REQUIRE_THAT(g.x, WithinAbs(gx, 1e-5 * (1.0 + std::fabs(gx))));
    REQUIRE_THAT(g.y, WithinAbs(gy, 1e-5 * (1.0 + std::fabs(gy))));
  }
  CHECK_THROWS_AS(h_gradient({0.0, 0.0}, kMap), std::domain_error);
}

TEST_CASE("gradient bound |grad h| / h <= c / |z|") {
  // Calibrated on a radial grid; c depends only on the angles.
  double c = 0.0;
  for (double r : {0.01, 0.1, 1.0, 10.0, 100.0})
    for (int k = 0; k <= 20; ++k) {
      const double th = (pi / 2) * k / 20.0;
      const Vec2 z{r * std::cos(th), r * std::sin(th)};
      c = std::max(c, h_gradient(z, kMap).norm() / h_value(z, kMap) * z.norm());
    }
  CHECK(c < 2.0 / kMap.alpha);  // stays of order alpha / cos(theta2)
  CHECK(c >= kMap.alpha);
}

TEST_CASE("h is discretely harmonic at second order") {
  const Vec2 z{1.3, 0.7};
  auto laplacian = [&](double eta) {
    return (h_value({z.x + eta, z.y}, kMap) + h_value({z.x - eta, z.y}, kMap) +
            h_value({z.x, z.y + eta}, kMap) + h_value({z.x, z.y - eta}, kMap) -
            4.0 * h_value(z, kMap)) /
           (eta * eta);
  };
  const double l2 = std::fabs(laplacian(1e-2));
  const double l3 = std::fabs(laplacian(1e-3));
  // O(eta^2) residual: two orders of magnitude per decade.
  CHECK(l3 < l2 * 3e-2);
}

TEST_CASE("boundary orthogonality of the h gradient") {
  const Vec2 v_low{-std::tan(kMap.theta1), 1.0};
  const Vec2 v_up{1.0, -std::tan(kMap.theta2)};
  for (int k = 1; k <= 1000; ++k) {
    const double r = 0.01 + 5.0 * k / 1000.0;
    REQUIRE_THAT(h_gradient({r, 0.0}, kMap).dot(v_low), WithinAbs(0.0, 1e-10));
    REQUIRE_THAT(h_gradient({0.0, r}, kMap).dot(v_up), WithinAbs(0.0, 1e-10));
  }
}

TEST_CASE("transport of a constant trajectory") {
  std::vector<double> t;
  std::vector<Vec2> x;
  const Vec2 z0{1.2, 0.8};
  for (int k = 0; k <= 10; ++k) {
    t.push_back(0.1 * k);
    x.push_back(z0);
  }
  const TransportedTrajectory tr = transport(t, x, kMap, TransportTarget::Wedge);
  const Vec2 w0 = to_wedge(z0, kMap);
  for (std::size_t k = 0; k < tr.state.size(); ++k) CHECK((tr.state[k] - w0).norm() == 0.0);
  const double rate = wedge_clock_rate(z0, kMap);
  CHECK_THAT(tr.t_new.back(), WithinAbs(rate * 1.0, 1e-12));
}

TEST_CASE("lower-face segments map onto the wedge edge") {
  std::vector<double> t;
  std::vector<Vec2> x;
  for (int k = 0; k <= 20; ++k) {
    t.push_back(0.05 * k);
    x.push_back({0.5 + 0.1 * k, 0.0});
  }
  const TransportedTrajectory wedge = transport(t, x, kMap, TransportTarget::Wedge);
  for (const Vec2& w : wedge.state)
    CHECK_THAT(std::atan2(w.y, w.x), WithinAbs(kMap.lower_edge_angle(), 1e-12));
  const TransportedTrajectory strip = transport(t, x, kMap, TransportTarget::Strip);
  for (const Vec2& s : strip.state)
    CHECK_THAT(s.y, WithinAbs(kMap.lower_edge_angle(), 1e-12));  // strip floor
}

TEST_CASE("transport aborts at the origin guard") {
  std::vector<double> t{0.0, 0.1, 0.2};
  std::vector<Vec2> x{{1.0, 1.0}, {0.005, 0.005}, {1.0, 1.0}};
  CHECK_THROWS_AS(transport(t, x, kMap, TransportTarget::Wedge, 0.01), std::domain_error);
}

TEST_CASE("resampling in the new clock is monotone and interpolating") {
  std::vector<double> t;
  std::vector<Vec2> x;
  CounterRng rng(6);
  Vec2 z{1.0, 1.0};
  for (int k = 0; k <= 200; ++k) {
    t.push_back(1e-2 * k);
    x.push_back(z);
    z += Vec2{0.05 * (rng.next_uniform() - 0.5), 0.05 * (rng.next_uniform() - 0.5)};
  }
  const TransportedTrajectory tr = transport(t, x, kMap, TransportTarget::Wedge);
  const TransportedTrajectory rs = resample_uniform(tr, 64);
  REQUIRE(rs.state.size() == 64);
  CHECK(rs.t_new.front() == tr.t_new.front());
  CHECK_THAT(rs.t_new.back(), WithinAbs(tr.t_new.back(), 1e-12));
  for (std::size_t k = 1; k < rs.t_new.size(); ++k) REQUIRE(rs.t_new[k] > rs.t_new[k - 1]);
}
