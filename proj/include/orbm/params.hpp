// Scalar parameters derived from the reflection angle pair and the regime
// classification of the (theta1, theta2) square.
//
// Conventions: theta_i is the reflection angle on face i, positive pointing
// toward the origin; a_i = tan(theta_i).  The push directions are (-a1, 1) on
// the lower face and (1, -a2) on the left face.  Derived constants:
//   alpha = (theta1 + theta2) / (pi/2)
//   beta  = |a1 a2|
//   psi   = (log|a1| + log|a2|) / ((theta1 + theta2)(a1 + a2))
//   kappa = 1 / ((theta1 + theta2)(a1 + a2))
//   rho   = log|a1| + log|a2| = log(beta) = psi / kappa

#ifndef ORBM_PARAMS_HPP_
#define ORBM_PARAMS_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbm {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

struct WedgeAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// The double kHalfPi rounds below the real pi/2, so the closed comparison
// still keeps every representable angle strictly inside (-pi/2, pi/2) with a
// finite tangent.
inline bool angles_admissible(const WedgeAngles& w) {
  return w.theta1 >= -kHalfPi && w.theta1 <= kHalfPi && w.theta2 >= -kHalfPi &&
         w.theta2 <= kHalfPi;
}

struct DerivedParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double psi = 0.0;
  double kappa = 0.0;
  double rho = 0.0;
};

enum class RegimeLabel {
  NotSemimartingale,   // alpha >= 1
  Transient,           // alpha <= 0
  PathwiseUnique,      // 0 < alpha < 1, beta < 1
  TheoremRegion,       // 0 < alpha < 1, beta > 1, a1 > 0 > a2, psi > 1/alpha
  UnresolvedMixedSign, // 0 < alpha < 1, beta >= 1, not in the theorem region
  Degenerate,          // grid marker for theta1+theta2 = 0 / a1+a2 = 0 nodes
};

inline const char* to_string(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::NotSemimartingale: return "NotSemimartingale";
    case RegimeLabel::Transient: return "Transient";
    case RegimeLabel::PathwiseUnique: return "PathwiseUnique";
    case RegimeLabel::TheoremRegion: return "TheoremRegion";
    case RegimeLabel::UnresolvedMixedSign: return "UnresolvedMixedSign";
    case RegimeLabel::Degenerate: return "Degenerate";
  }
  return "?";
}

inline DerivedParams derive(const WedgeAngles& w) {
  if (!angles_admissible(w)) throw std::invalid_argument("derive: angles outside (-pi/2, pi/2)");
  DerivedParams p;
  p.theta1 = w.theta1;
  p.theta2 = w.theta2;
  p.a1 = std::tan(w.theta1);
  p.a2 = std::tan(w.theta2);
  const double sum = w.theta1 + w.theta2;
  const double asum = p.a1 + p.a2;
  if (sum == 0.0 || asum == 0.0)
    throw std::domain_error("derive: degenerate angles, theta1+theta2 = 0 (psi/kappa undefined)");
  p.alpha = sum / kHalfPi;
  p.beta = std::fabs(p.a1 * p.a2);
  p.rho = std::log(std::fabs(p.a1)) + std::log(std::fabs(p.a2));
  p.psi = p.rho / (sum * asum);
  p.kappa = 1.0 / (sum * asum);
  return p;
}

// Strict inequalities throughout; boundary ties fall to the non-theorem side.
inline RegimeLabel classify(const DerivedParams& p) {
  if (p.alpha >= 1.0) return RegimeLabel::NotSemimartingale;
  if (p.alpha <= 0.0) return RegimeLabel::Transient;
  if (p.beta < 1.0) return RegimeLabel::PathwiseUnique;
  // 0 < alpha < 1 and beta >= 1 force opposite signs of a1, a2.
  const bool psi_large = p.rho / (p.a1 + p.a2) > kHalfPi;  // psi > 1/alpha
  if (p.a1 > 0.0 && p.a2 < 0.0 && p.beta > 1.0 && psi_large) return RegimeLabel::TheoremRegion;
  return RegimeLabel::UnresolvedMixedSign;
}

struct RegionNode {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double psi = 0.0;
  double kappa = 0.0;
  RegimeLabel label = RegimeLabel::Degenerate;
};

// Row-major grid over [t1_lo, t1_hi] x [t2_lo, t2_hi]; nodes on the
// degenerate lines keep their angle data but carry the Degenerate label
// with psi/kappa undefined (NaN).
inline std::vector<RegionNode> region_grid(double t1_lo, double t1_hi, double t2_lo,
                                           double t2_hi, int resolution) {
  if (resolution < 2) throw std::invalid_argument("region_grid: resolution must be >= 2");
  if (!(t1_lo < t1_hi) || !(t2_lo < t2_hi)) throw std::invalid_argument("region_grid: empty range");
  if (!angles_admissible({t1_lo, t2_lo}) || !angles_admissible({t1_hi, t2_hi}))
    throw std::invalid_argument("region_grid: range outside admissible square");
  std::vector<RegionNode> out;
  out.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    const double t1 = t1_lo + (t1_hi - t1_lo) * i / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double t2 = t2_lo + (t2_hi - t2_lo) * j / (resolution - 1);
      RegionNode node;
      node.theta1 = t1;
      node.theta2 = t2;
      node.a1 = std::tan(t1);
      node.a2 = std::tan(t2);
      node.alpha = (t1 + t2) / kHalfPi;
      node.beta = std::fabs(node.a1 * node.a2);
      if (t1 + t2 == 0.0 || node.a1 + node.a2 == 0.0) {
        node.psi = std::numeric_limits<double>::quiet_NaN();
        node.kappa = std::numeric_limits<double>::quiet_NaN();
        node.label = RegimeLabel::Degenerate;
      } else {
        const DerivedParams p = derive({t1, t2});
        node.psi = p.psi;
        node.kappa = p.kappa;
        node.label = classify(p);
      }
      out.push_back(node);
    }
  }
  return out;
}

}  // namespace orbm

#endif  // ORBM_PARAMS_HPP_
