#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conullity/fields.hpp"
#include "conullity/interval.hpp"

namespace conullity {

// Upper half-plane {(a, b) : b > 0} with the metric (da^2 + db^2) / b^2.
// Curvature is -1 everywhere, so the scalar curvature is -2 and distances
// have the arcosh closed form below.  All geodesics are available in closed
// form, which the foliation checks lean on heavily.
struct HalfPlane {
  static double inner(const Eigen::Vector2d& p, const Eigen::Vector2d& w1,
                      const Eigen::Vector2d& w2) {
    return w1.dot(w2) / (p[1] * p[1]);
  }

  static double norm(const Eigen::Vector2d& p, const Eigen::Vector2d& w) {
    return w.norm() / p[1];
  }

  static double dist(const Eigen::Vector2d& p, const Eigen::Vector2d& q);

  // Unit-speed geodesic through p with initial velocity w, |w|_g = 1,
  // evaluated at arc length t.  Closed form: vertical lines are exponential
  // in b, all other geodesics run along (c + r*tanh, r*sech).
  static Eigen::Vector2d geodesic_point(const Eigen::Vector2d& p,
                                        const Eigen::Vector2d& w, double t);

  // Same geodesic, returning position and velocity at arc length t.
  static void geodesic_state(const Eigen::Vector2d& p, const Eigen::Vector2d& w,
                             double t, Eigen::Vector2d& pos, Eigen::Vector2d& vel);
};

// A unit-speed curve in the half-plane whose direction turns by H(s) - H(0)
// relative to a parallel-transported frame.  H is the turning angle, so its
// slope is the geodesic curvature, but the construction never differentiates
// H: the tangent is the frame rotated by the sampled angle.
struct TurningCurve {
  std::vector<double> s;
  std::vector<Eigen::Vector2d> pos;
  std::vector<Eigen::Vector2d> tangent;  // rotate(frame, angle), g-unit
  std::vector<Eigen::Vector2d> normal;   // tangent rotated +90 degrees
  std::vector<Eigen::Vector2d> frame;    // parallel transport of v0
  std::vector<double> angle;             // H(s) - H(0)
  double step = 0.0;
  Field1 H;

  // Pieces of the parameter range on which H is declared smooth.  Consumers
  // that estimate curvature by differencing the angle must stay inside.
  // Defaults to the whole range.
  std::vector<Interval> smooth;

  bool declared_smooth(double s_query) const {
    for (const auto& piece : smooth)
      if (piece.lo <= s_query && s_query <= piece.hi) return true;
    return false;
  }

  // Index of the grid sample nearest to s_query.
  std::size_t index_near(double s_query) const;
};

// Integrates the curve with turning function H from p0 with g-unit initial
// velocity v0 over s_range (which must contain 0) at the given step.  With
// enforce_lipschitz set, H is screened on the grid and a slope above 1 throws
// LipschitzViolation; passing false builds the curve anyway, which is how the
// negative controls get their over-turned curves.  Throws Error if the curve
// approaches the boundary b = 0.
TurningCurve build_turning_curve(const HalfPlane& surface, const Field1& H,
                                 const Eigen::Vector2d& p0, const Eigen::Vector2d& v0,
                                 Interval s_range, double step,
                                 bool enforce_lipschitz = true);

// Strip around the curve from which verify_foliation draws its test points.
// Feet are sampled in s_window; offsets run along -normal (the side the curve
// bends away from when the turning slope is positive), so dist > 0 lands on
// that side and dist < 0 on the +normal side.
struct FoliationRegion {
  Interval s_window;
  double dist_lo = -1.0;
  double dist_hi = 1.0;
};

// One sampled point and what the nearest-point scan found for it.
struct FootData {
  Eigen::Vector2d p;
  double seed_s = 0.0;  // foot parameter used to generate the sample
  double seed_u = 0.0;  // signed offset used to generate the sample
  double foot_s = 0.0;  // refined minimizer of s -> d(p, curve(s))
  double dist = 0.0;
  bool unique = true;
  double rival_s = 0.0;          // competing local minimum when !unique
  double convexity_margin = 0.0; // min of secondFD(cosh d) - exp(-d)
};

struct FoliationReport {
  bool ok = false;
  int violations = 0;    // samples failing uniqueness or convexity
  double min_margin = 0.0;
  std::vector<FootData> feet;
};

// Samples points in the region and checks that each sees the curve the way a
// leaf of a foliation by orthogonal geodesics would: the distance along the
// curve has a single local minimum, and cosh of it is strictly convex with
// margin exp(-d) up to a 1e-3 tolerance.  Failures are reported, not thrown,
// so over-turned curves can be probed for the expected breakdown.
FoliationReport verify_foliation(const HalfPlane& surface, const TurningCurve& curve,
                                 const FoliationRegion& region, int samples,
                                 unsigned long long seed);

// Conformal factor of the induced (s, u) coordinates: u is the signed arc
// length along the geodesic leaving curve(s) in the -normal direction, and
// eta solves the scalar Jacobi equation eta_uu = eta with eta(x, 0) = 1 and
// eta_u(x, 0) given by a finite-difference slope of the stored turning angle.
// Queries with x outside the curve's declared smooth set (inset by the
// differencing width) throw NonSmoothPoint; x-partials are not provided.
Field2 extract_eta(const HalfPlane& surface, const TurningCurve& curve,
                   Interval u_range, double step = 1e-3);

}  // namespace conullity
