#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "conullity/interval.hpp"

namespace conullity {

// Smooth function of one variable with derivatives up to max_order().
class ScalarField1D {
 public:
  virtual ~ScalarField1D() = default;

  // k-th derivative at x; k = 0 is the value.
  virtual double deriv(int k, double x) const = 0;
  virtual int max_order() const = 0;

  // Closed support, when the field is compactly supported.
  virtual std::optional<Interval> support_hint() const { return std::nullopt; }

  double operator()(double x) const { return deriv(0, x); }
};

// Smooth function of (x, u) with mixed partials d^a_x d^b_u up to
// a + b <= max_order().
class ScalarField2D {
 public:
  virtual ~ScalarField2D() = default;

  virtual double partial(int a, int b, double x, double u) const = 0;
  virtual int max_order() const = 0;

  double operator()(double x, double u) const { return partial(0, 0, x, u); }
};

using Field1 = std::shared_ptr<const ScalarField1D>;
using Field2 = std::shared_ptr<const ScalarField2D>;

Field1 constant_field(double c);

// amplitude * exp(-1 / (1 - s^2)) with s = (x - center) / radius, zero outside
// |s| < 1. All derivatives vanish at the support edge; they follow the
// rational-prefactor recurrence, no finite differencing involved.
Field1 flat_bump(double center, double radius, double amplitude);

// amplitude * (1 - s^2)^2 on |s| < 1, zero outside: vanishes only to order 2
// at the edge. Negative control for gluing experiments.
Field1 poly_bump(double center, double radius, double amplitude);

// scale * (x - x0)^power for x > x0, zero otherwise. With 0 < power < 1 the
// derivatives blow up as x -> x0+ while the value stays continuous.
Field1 pow_ramp(double x0, double scale, double power);

// Turning-function profile: zero for x <= x0, scale*(x-x0)^(power+1)/(power+1)
// on (x0, x1), constant for x >= x1. Its first derivative is pow_ramp clipped
// at x1, so the field is Lipschitz with constant scale*(x1-x0)^power.
Field1 ramp_turn(double x0, double x1, double scale, double power);

Field2 constant_eta(double c);

// cosh(u) + kgamma(x) sinh(u): the curvature-homogeneous family with
// Scal = -2 and eta(x, 0) = 1.
Field2 ch_eta(Field1 kgamma);

// eta(x, u) obtained by integrating eta_uu = -eta * scal / 2 in u from
// eta(x, 0) = 1, eta_u(x, 0) = kgamma(x), one RK4 column per x grid node.
// u-partials come from the stored solution and the equation itself;
// x-partials differentiate a 5-column interpolant. Throws NonPositiveEta at
// the first zero crossing of eta inside u_range.
Field2 eta_from_scal(Field2 scal, Field1 kgamma, Interval x_range, int x_cols, Interval u_range,
                     double step = 1e-3);

// Central-difference self check: deriv(k+1) against a difference of deriv(k).
// ratio = |fd - analytic| / (atol + rtol * |analytic|); ok iff worst <= 1.
struct FdCheckResult {
  bool ok = true;
  double worst_ratio = 0.0;
  int worst_order = 0;
  double worst_x = 0.0, worst_u = 0.0;
};

FdCheckResult fd_check(const ScalarField1D& f, const std::vector<double>& xs, double h = 1e-5,
                       double rtol = 1e-4, double atol = 1e-8);
FdCheckResult fd_check(const ScalarField2D& f, const std::vector<std::pair<double, double>>& pts,
                       double h = 1e-5, double rtol = 1e-4, double atol = 1e-8);

}  // namespace conullity
