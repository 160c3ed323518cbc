// Discretized Skorokhod map.
//
// Each step resolves a two-face linear complementarity problem by exhaustive
// pattern enumeration (Interior / LowerOnly / UpperOnly / Corner), each case a
// closed-form solve.  For the quadrant the problem matrix is a P-matrix
// whenever a1*a2 < 1 (det = 1 - a1*a2 > 0), which makes the feasible pattern
// unique; the strip decouples by the vertical coordinate and is always unique.
// Activated face coordinates are snapped exactly to the face value.

#ifndef ORBM_REFLECT_HPP_
#define ORBM_REFLECT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbm/drivers.hpp"
#include "orbm/params.hpp"
#include "orbm/vec2.hpp"

namespace orbm {

inline constexpr double kFaceTol = 1e-12;      // "on the face" band for checks
inline constexpr double kFeasTol = 1e-12;      // pattern feasibility slack

enum class DomainKind { Quadrant, Strip };

struct ReflectionSpec {
  DomainKind domain = DomainKind::Quadrant;
  double a1 = 0.0;     // tan(theta1), lower-face tangential coefficient
  double a2 = 0.0;     // tan(theta2)
  double y_lo = 0.0;   // strip only
  double y_hi = 0.0;   // strip only

  // Quadrant pushes: (-a1, 1) on the lower face {y=0}, (1, -a2) on the left
  // face {x=0}.  Strip pushes: (-a1, 1) on {y=y_lo}, (-a2, -1) on {y=y_hi}.
  Vec2 v_lower() const {
    return {-a1, 1.0};
  }
  Vec2 v_upper() const {
    return domain == DomainKind::Quadrant ? Vec2{1.0, -a2} : Vec2{-a2, -1.0};
  }

  bool completely_s() const {
    if (domain == DomainKind::Strip) return true;
    if (a1 > 0.0 && a2 > 0.0) return a1 * a2 < 1.0;
    return true;
  }
  // One-step uniqueness holds iff the 2x2 problem matrix is a P-matrix.
  bool unique_one_step() const {
    return domain == DomainKind::Strip || a1 * a2 < 1.0;
  }

  static ReflectionSpec quadrant(double a1, double a2) {
    ReflectionSpec s = quadrant_unchecked(a1, a2);
    if (!s.completely_s())
      throw std::invalid_argument("ReflectionSpec: quadrant push matrix is not completely-S");
    return s;
  }
  // No completely-S validation; for probing the solver's failure path.
  static ReflectionSpec quadrant_unchecked(double a1, double a2) {
    ReflectionSpec s;
    s.domain = DomainKind::Quadrant;
    s.a1 = a1;
    s.a2 = a2;
    return s;
  }
  static ReflectionSpec quadrant_for(const WedgeAngles& w) {
    return quadrant(std::tan(w.theta1), std::tan(w.theta2));
  }
  static ReflectionSpec strip(double a1, double a2, double y_lo, double y_hi) {
    if (!(y_lo < y_hi)) throw std::invalid_argument("ReflectionSpec: strip needs y_lo < y_hi");
    ReflectionSpec s;
    s.domain = DomainKind::Strip;
    s.a1 = a1;
    s.a2 = a2;
    s.y_lo = y_lo;
    s.y_hi = y_hi;
    return s;
  }
  static ReflectionSpec strip_for(const WedgeAngles& w) {
    return strip(std::tan(w.theta1), std::tan(w.theta2), kHalfPi - w.theta1, kHalfPi + w.theta2);
  }

  bool contains(const Vec2& p) const {
    if (domain == DomainKind::Quadrant) return p.x >= 0.0 && p.y >= 0.0;
    return p.y >= y_lo && p.y <= y_hi;
  }
  bool on_lower(const Vec2& p) const {
    return domain == DomainKind::Quadrant ? std::fabs(p.y) <= kFaceTol
                                          : std::fabs(p.y - y_lo) <= kFaceTol;
  }
  bool on_upper(const Vec2& p) const {
    return domain == DomainKind::Quadrant ? std::fabs(p.x) <= kFaceTol
                                          : std::fabs(p.y - y_hi) <= kFaceTol;
  }
};

enum class StepPattern { Interior, LowerOnly, UpperOnly, Corner };

inline const char* to_string(StepPattern p) {
  switch (p) {
    case StepPattern::Interior: return "Interior";
    case StepPattern::LowerOnly: return "LowerOnly";
    case StepPattern::UpperOnly: return "UpperOnly";
    case StepPattern::Corner: return "Corner";
  }
  return "?";
}

struct LcpStep {
  Vec2 pre_state;
  Vec2 displacement;
  Vec2 post_state;
  double dm_lower = 0.0;
  double dm_upper = 0.0;
  StepPattern pattern = StepPattern::Interior;
};

struct LcpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Candidate solve for one pattern; feasible = all inequality residuals
// >= -kFeasTol.  residual reports the worst violation for diagnostics.
struct Candidate {
  bool feasible = false;
  double residual = 0.0;
  LcpStep step;
};

inline Candidate try_quadrant(const ReflectionSpec& s, const Vec2& z, StepPattern pat) {
  Candidate c;
  c.step.pattern = pat;
  switch (pat) {
    case StepPattern::Interior: {
      c.residual = std::min(z.x, z.y);
      c.feasible = c.residual >= -kFeasTol;
      c.step.post_state = z;
      break;
    }
    case StepPattern::LowerOnly: {
      const double dm = -z.y;
      const double px = z.x - s.a1 * dm;
      c.residual = std::min(dm, px);
      c.feasible = c.residual >= -kFeasTol;
      c.step.dm_lower = std::max(dm, 0.0);
      c.step.post_state = {px, 0.0};
      break;
    }
    case StepPattern::UpperOnly: {
      const double dm = -z.x;
      const double py = z.y - s.a2 * dm;
      c.residual = std::min(dm, py);
      c.feasible = c.residual >= -kFeasTol;
      c.step.dm_upper = std::max(dm, 0.0);
      c.step.post_state = {0.0, py};
      break;
    }
    case StepPattern::Corner: {
      const double det = 1.0 - s.a1 * s.a2;
      if (det == 0.0) {
        c.feasible = false;
        c.residual = -std::numeric_limits<double>::infinity();
        break;
      }
      const double dm_l = -(z.y + s.a2 * z.x) / det;
      const double dm_u = -(z.x + s.a1 * z.y) / det;
      c.residual = std::min(dm_l, dm_u);
      c.feasible = c.residual >= -kFeasTol;
      c.step.dm_lower = std::max(dm_l, 0.0);
      c.step.dm_upper = std::max(dm_u, 0.0);
      c.step.post_state = {0.0, 0.0};
      break;
    }
  }
  return c;
}

inline Candidate try_strip(const ReflectionSpec& s, const Vec2& z, StepPattern pat) {
  Candidate c;
  c.step.pattern = pat;
  switch (pat) {
    case StepPattern::Interior: {
      c.residual = std::min(z.y - s.y_lo, s.y_hi - z.y);
      c.feasible = c.residual >= -kFeasTol;
      c.step.post_state = z;
      break;
    }
    case StepPattern::LowerOnly: {
      const double dm = s.y_lo - z.y;
      c.residual = dm;
      c.feasible = c.residual >= -kFeasTol;
      c.step.dm_lower = std::max(dm, 0.0);
      c.step.post_state = {z.x - s.a1 * c.step.dm_lower, s.y_lo};
      break;
    }
    case StepPattern::UpperOnly: {
      const double dm = z.y - s.y_hi;
      c.residual = dm;
      c.feasible = c.residual >= -kFeasTol;
      c.step.dm_upper = std::max(dm, 0.0);
      c.step.post_state = {z.x - s.a2 * c.step.dm_upper, s.y_hi};
      break;
    }
    case StepPattern::Corner: {
      c.feasible = false;  // the two strip faces cannot both bind
      c.residual = -std::numeric_limits<double>::infinity();
      break;
    }
  }
  return c;
}

inline Candidate try_pattern(const ReflectionSpec& s, const Vec2& z, StepPattern pat) {
  return s.domain == DomainKind::Quadrant ? try_quadrant(s, z, pat) : try_strip(s, z, pat);
}

}  // namespace detail

// One discretization step: push state + displacement back into the domain.
inline LcpStep one_step_reflect(const Vec2& state, const Vec2& displacement,
                                const ReflectionSpec& spec) {
  const Vec2 z = state + displacement;
  static constexpr std::array<StepPattern, 4> kOrder = {
      StepPattern::Interior, StepPattern::LowerOnly, StepPattern::UpperOnly, StepPattern::Corner};
  std::array<double, 4> residuals{};
  for (std::size_t i = 0; i < kOrder.size(); ++i) {
    detail::Candidate c = detail::try_pattern(spec, z, kOrder[i]);
    residuals[i] = c.residual;
    if (c.feasible) {
      c.step.pre_state = state;
      c.step.displacement = displacement;
      // Classify by which local times actually moved.
      const bool low = c.step.dm_lower > kFeasTol;
      const bool up = c.step.dm_upper > kFeasTol;
      c.step.pattern = low && up ? StepPattern::Corner
                       : low     ? StepPattern::LowerOnly
                       : up      ? StepPattern::UpperOnly
                                 : StepPattern::Interior;
      return c.step;
    }
  }
  std::ostringstream os;
  os << "one_step_reflect: no feasible complementarity pattern (non-completely-S spec or "
        "numerical breakdown); candidate residuals:";
  for (std::size_t i = 0; i < kOrder.size(); ++i)
    os << ' ' << to_string(kOrder[i]) << '=' << residuals[i];
  throw LcpError(os.str());
}

// How many of the four patterns are feasible at tolerance tol, counting
// coincident solutions once.  Diagnostic used by the uniqueness checks.
inline int count_feasible_patterns(const Vec2& state, const Vec2& displacement,
                                   const ReflectionSpec& spec, double tol = 1e-10) {
  const Vec2 z = state + displacement;
  std::vector<detail::Candidate> feas;
  for (StepPattern pat : {StepPattern::Interior, StepPattern::LowerOnly, StepPattern::UpperOnly,
                          StepPattern::Corner}) {
    detail::Candidate c = detail::try_pattern(spec, z, pat);
    if (c.residual >= -tol) feas.push_back(c);
  }
  int distinct = 0;
  for (std::size_t i = 0; i < feas.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (std::fabs(feas[i].step.dm_lower - feas[j].step.dm_lower) <= tol &&
          std::fabs(feas[i].step.dm_upper - feas[j].step.dm_upper) <= tol)
        dup = true;
    }
    if (!dup) ++distinct;
  }
  return distinct;
}

struct ReflectedPath {
  std::vector<double> t;
  std::vector<Vec2> state;
  std::vector<double> l_lower;  // cumulative, nondecreasing, start 0
  std::vector<double> l_upper;
  std::vector<std::size_t> events_lower;  // step indices with dm_lower > 0
  std::vector<std::size_t> events_upper;

  std::size_t size() const { return t.size(); }
};

// Solve the whole driver, feeding increments (plus an optional state drift)
// through one_step_reflect.  Drift signature: Vec2(const Vec2& state).
template <class Drift>
inline ReflectedPath solve_path(const DrivingPath& driver, const Vec2& x0,
                                const ReflectionSpec& spec, Drift&& drift) {
  if (driver.size() < 2) throw std::invalid_argument("solve_path: driver needs >= 2 samples");
  if (!spec.contains(x0)) throw std::invalid_argument("solve_path: x0 outside the domain");
  ReflectedPath path;
  const std::size_t n = driver.size();
  path.t = driver.t;
  path.state.resize(n);
  path.l_lower.resize(n);
  path.l_upper.resize(n);
  path.state[0] = x0;
  path.l_lower[0] = 0.0;
  path.l_upper[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = driver.t[k] - driver.t[k - 1];
    Vec2 w = driver.f[k] - driver.f[k - 1];
    w += drift(path.state[k - 1]) * dt;
    LcpStep step;
    try {
      step = one_step_reflect(path.state[k - 1], w, spec);
    } catch (const LcpError& e) {
      throw LcpError(std::string(e.what()) + " at step " + std::to_string(k));
    }
    path.state[k] = step.post_state;
    path.l_lower[k] = path.l_lower[k - 1] + step.dm_lower;
    path.l_upper[k] = path.l_upper[k - 1] + step.dm_upper;
    if (step.dm_lower > 0.0) path.events_lower.push_back(k);
    if (step.dm_upper > 0.0) path.events_upper.push_back(k);
  }
  return path;
}

inline ReflectedPath solve_path(const DrivingPath& driver, const Vec2& x0,
                                const ReflectionSpec& spec) {
  return solve_path(driver, x0, spec, [](const Vec2&) { return Vec2{0.0, 0.0}; });
}

// Max over grid windows [i,j] of (osc(g) + osc(M)) / osc(f), osc being the
// sup of pairwise increment norms over the window.  Interval diameters obey
// D[i][j] = max(D[i+1][j], D[i][j-1], |f_j - f_i|), evaluated with rolling
// rows so the whole scan is O(n^2) time, O(n) memory.
inline double oscillation_ratio(const DrivingPath& driver, const ReflectedPath& path) {
  const std::size_t n = driver.size();
  if (path.size() != n)
    throw std::invalid_argument("oscillation_ratio: driver and path grids differ");
  if (n < 2) return 0.0;
  std::vector<Vec2> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = {path.l_lower[k], path.l_upper[k]};

  std::vector<double> df(n, 0.0), dg(n, 0.0), dm(n, 0.0);  // window length L, start i
  std::vector<double> pf(n, 0.0), pg(n, 0.0), pm(n, 0.0);  // length L-1
  double best = 0.0;
  for (std::size_t L = 1; L < n; ++L) {
    for (std::size_t i = 0; i + L < n; ++i) {
      df[i] = std::max({pf[i], pf[i + 1], (driver.f[i + L] - driver.f[i]).norm()});
      dg[i] = std::max({pg[i], pg[i + 1], (path.state[i + L] - path.state[i]).norm()});
      dm[i] = std::max({pm[i], pm[i + 1], (m[i + L] - m[i]).norm()});
      if (df[i] > 0.0) best = std::max(best, (dg[i] + dm[i]) / df[i]);
    }
    std::swap(df, pf);
    std::swap(dg, pg);
    std::swap(dm, pm);
  }
  return best;
}

}  // namespace orbm

#endif  // ORBM_REFLECT_HPP_
