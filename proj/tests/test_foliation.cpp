#include <cmath>

#include "conullity/errors.hpp"
#include "conullity/expr.hpp"
#include "conullity/fields.hpp"
#include "conullity/foliation.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace conullity;
using namespace testsupport;
using Eigen::Vector2d;

namespace {

// Signed distance from a point to the unit semicircle geodesic.
double signed_dist_to_unit_circle(const Vector2d& p) {
  return std::asinh((p.squaredNorm() - 1.0) / (2.0 * p[1]));
}

// Foot parameter of the nearest-point projection onto the unit semicircle
// parametrized as (tanh s, sech s): the orthogonal geodesic through p is the
// circle centered at c = (|p|^2 + 1) / (2a) and crosses at x = 1/c.
double unit_circle_foot(const Vector2d& p) {
  return std::atanh(2.0 * p[0] / (p.squaredNorm() + 1.0));
}

}  // namespace

TEST_CASE("half-plane distances behave like a metric") {
  HalfPlane hp;
  Rng rng(76001);
  const auto draw = [&] {
    return Vector2d(rng.uniform(-3.0, 3.0), rng.uniform(0.05, 5.0));
  };
  for (int k = 0; k < 200; ++k) {
    const Vector2d p = draw(), q = draw(), r = draw();
    CHECK(hp.dist(p, q) == hp.dist(q, p));
    CHECK(hp.dist(p, p) == 0.0);
    CHECK(hp.dist(p, r) <= hp.dist(p, q) + hp.dist(q, r) + 1e-12);
  }

  // Points on a vertical line sit at log-ratio distance.
  CHECK(close(hp.dist({0.0, 1.0}, {0.0, std::exp(1.0)}), 1.0, 1e-14));
  CHECK(close(hp.dist({2.0, 0.25}, {2.0, 4.0}), std::log(16.0), 1e-13));

  // The unit-speed geodesic covers arc length exactly.
  for (int k = 0; k < 100; ++k) {
    const Vector2d p = draw();
    const double alpha = rng.uniform(0.0, 6.283185307179586);
    const Vector2d w = p[1] * Vector2d(std::cos(alpha), std::sin(alpha));
    double t = rng.uniform(0.1, 3.0);
    if (k % 2 == 0) t = -t;
    CHECK(close(hp.dist(p, hp.geodesic_point(p, w, t)), std::abs(t), 1e-12));
  }
}

TEST_CASE("closed-form geodesics satisfy the defining equations") {
  HalfPlane hp;
  Rng rng(76002);
  for (int k = 0; k < 50; ++k) {
    const Vector2d p(rng.uniform(-2.0, 2.0), rng.uniform(0.3, 3.0));
    // Launch angles stay away from vertical, where the circle center blows up
    // and differencing the closed form loses digits; the vertical branch gets
    // its own exact check below.
    const double alpha = rng.uniform(-1.51, 1.51);
    const double flip = k % 2 == 0 ? 1.0 : -1.0;
    const Vector2d w = p[1] * Vector2d(flip * std::cos(alpha), std::sin(alpha));
    const double t = rng.uniform(-2.0, 2.0);

    Vector2d pos, vel;
    hp.geodesic_state(p, w, t, pos, vel);
    CHECK(close(hp.norm(pos, vel), 1.0, 1e-12));

    const double h = 1e-5;
    const Vector2d fd_vel =
        (hp.geodesic_point(p, w, t + h) - hp.geodesic_point(p, w, t - h)) / (2.0 * h);
    CHECK(close((fd_vel - vel).norm(), 0.0, 1e-8));

    // Coordinate acceleration against the connection terms of the model.
    const double h2 = 3e-4;
    const Vector2d fd_acc = (hp.geodesic_point(p, w, t + h2) - 2.0 * pos +
                             hp.geodesic_point(p, w, t - h2)) /
                            (h2 * h2);
    const double b = pos[1];
    CHECK(close(fd_acc[0], 2.0 * vel[0] * vel[1] / b, 1e-5, 1e-5));
    CHECK(close(fd_acc[1], (vel[1] * vel[1] - vel[0] * vel[0]) / b, 1e-5, 1e-5));
  }

  // Vertical launch stays on the vertical line.
  Vector2d pos, vel;
  hp.geodesic_state({0.7, 2.0}, {0.0, -2.0}, 1.5, pos, vel);
  CHECK(pos[0] == 0.7);
  CHECK(close(pos[1], 2.0 * std::exp(-1.5), 1e-13));
  CHECK(close(vel[1], -pos[1], 1e-13));
}

TEST_CASE("a zero turning function traces geodesics") {
  HalfPlane hp;
  const Field1 H = constant_field(0.0);

  const TurningCurve curve =
      build_turning_curve(hp, H, {0.0, 1.0}, {1.0, 0.0}, {-2.0, 5.0}, 1e-3);
  CHECK(curve.s.front() == -2.0);
  CHECK(curve.s.back() == 5.0);
  for (std::size_t i = 0; i < curve.s.size(); ++i) {
    const double s = curve.s[i];
    CHECK(close(curve.pos[i][0], std::tanh(s), 1e-7));
    CHECK(close(curve.pos[i][1], 1.0 / std::cosh(s), 1e-7));
    CHECK(curve.angle[i] == 0.0);
    // Zero angle makes the tangent the frame itself, bit for bit.
    CHECK(curve.tangent[i] == curve.frame[i]);
    CHECK(close(hp.norm(curve.pos[i], curve.tangent[i]), 1.0,
                1e-8 * std::max(1.0, std::abs(s))));
  }

  // A vertical launch runs up the axis exponentially.
  const TurningCurve vert =
      build_turning_curve(hp, H, {0.0, 1.0}, {0.0, 1.0}, {0.0, 3.0}, 1e-3);
  for (std::size_t i = 0; i < vert.s.size(); i += 250) {
    CHECK(close(vert.pos[i][0], 0.0, 1e-9));
    CHECK(close(vert.pos[i][1], std::exp(vert.s[i]), 1e-7 * vert.pos[i][1]));
  }
}

TEST_CASE("unit-slope turning rides horocycles") {
  HalfPlane hp;

  // Slope +1 from a horizontal start keeps the height constant: the line
  // b = 1 is the horocycle through the point at infinity.
  const TurningCurve line = build_turning_curve(hp, parse_field1("x"), {0.0, 1.0},
                                                {1.0, 0.0}, {0.0, 6.0}, 1e-3);
  for (std::size_t i = 0; i < line.s.size(); ++i) {
    CHECK(close(line.pos[i][0], line.s[i], 1e-7));
    CHECK(close(line.pos[i][1], 1.0, 1e-7));
  }

  // Slope -1 bends the other way, onto the circle tangent to the boundary
  // at the origin.
  const TurningCurve circ = build_turning_curve(hp, parse_field1("-x"), {0.0, 1.0},
                                                {1.0, 0.0}, {0.0, 3.0}, 1e-3);
  for (std::size_t i = 0; i < circ.s.size(); ++i) {
    const Vector2d& p = circ.pos[i];
    CHECK(close(p[0] * p[0] + (p[1] - 0.5) * (p[1] - 0.5), 0.25, 1e-7));
  }
  CHECK(circ.pos.back()[1] < 0.15);  // far along, the cusp point pulls it down
}

TEST_CASE("constant turning slope keeps constant distance to a geodesic") {
  HalfPlane hp;

  // Slope -0.6 from (0, 2): the curve stays at distance log 2 above the unit
  // semicircle, the hanging-curve analogue of a straight offset.
  const double d = std::log(2.0);
  const TurningCurve upper = build_turning_curve(hp, parse_field1("-0.6*x"), {0.0, 2.0},
                                                 {2.0, 0.0}, {-4.0, 4.0}, 1e-3);
  for (std::size_t i = 0; i < upper.s.size(); ++i)
    CHECK(close(signed_dist_to_unit_circle(upper.pos[i]), d, 1e-5));

  // Opposite sign from (0, 1/2) runs along the other side.
  const TurningCurve lower = build_turning_curve(hp, parse_field1("0.6*x"), {0.0, 0.5},
                                                 {0.5, 0.0}, {-3.0, 3.0}, 1e-3);
  for (std::size_t i = 0; i < lower.s.size(); ++i)
    CHECK(close(signed_dist_to_unit_circle(lower.pos[i]), -d, 1e-5));
}

TEST_CASE("multi-scale turning respects the frame-angle law") {
  HalfPlane hp;
  // Five stacked scales, slopes summing to exactly 1: Lipschitz-1 with the
  // bound attained, smooth but wiggly at every resolution the grid sees.
  const Field1 H = parse_field1(
      "0.05*sin(4*x) + 0.0125*sin(16*x) + 0.003125*sin(64*x)"
      " + 0.00078125*sin(256*x) + 0.0001953125*sin(1024*x)");
  const double step = 5e-5;
  const TurningCurve curve =
      build_turning_curve(hp, H, {0.0, 1.0}, {1.0, 0.0}, {0.0, 2.0}, step);

  for (std::size_t i = 1; i + 1 < curve.s.size(); i += 37) {
    // The measured direction is a centered difference of positions; its angle
    // against the transported frame must reproduce the turning function.
    const Vector2d t_fd = (curve.pos[i + 1] - curve.pos[i - 1]) / (2.0 * step);
    const Vector2d& e1 = curve.frame[i];
    const Vector2d e2(-e1[1], e1[0]);
    const double measured = std::atan2(t_fd.dot(e2), t_fd.dot(e1));
    CHECK(close(measured, curve.angle[i], 1e-6));
  }
  for (std::size_t i = 0; i < curve.s.size(); i += 101) {
    const double drift = std::abs(hp.norm(curve.pos[i], curve.frame[i]) - 1.0);
    CHECK(drift < 1e-8 * std::max(1.0, std::abs(curve.s[i])));
  }
}

TEST_CASE("turning faster than the bound is rejected with a witness") {
  HalfPlane hp;
  const Field1 H = parse_field1("1.5*x");
  CHECK_THROWS_AS(
      build_turning_curve(hp, H, {0.0, 1.0}, {1.0, 0.0}, {0.0, 2.0}, 1e-3),
      LipschitzViolation);
  try {
    build_turning_curve(hp, H, {0.0, 1.0}, {1.0, 0.0}, {0.0, 2.0}, 1e-3);
  } catch (const LipschitzViolation& e) {
    CHECK(e.s >= 0.0);
    CHECK(e.s <= 2.0);
  }

  // The screen can be waived, which is how the negative controls get built.
  const TurningCurve curve = build_turning_curve(hp, H, {0.0, 1.0}, {1.0, 0.0},
                                                 {0.0, 2.0}, 1e-3, false);
  CHECK(curve.s.size() == 2001);
}

TEST_CASE("feet of a geodesic strip match the closed-form projection") {
  HalfPlane hp;
  const TurningCurve curve = build_turning_curve(hp, constant_field(0.0), {0.0, 1.0},
                                                 {1.0, 0.0}, {-1.0, 6.0}, 1e-3);
  FoliationRegion region;
  region.s_window = {0.5, 4.5};
  region.dist_lo = -1.2;
  region.dist_hi = 1.2;
  const FoliationReport report = verify_foliation(hp, curve, region, 200, 76004);

  CHECK(report.ok);
  CHECK(report.violations == 0);
  CHECK(report.min_margin > -1e-3);
  for (const FootData& foot : report.feet) {
    CHECK(foot.unique);
    CHECK(close(foot.foot_s, foot.seed_s, 1e-6));
    CHECK(close(foot.dist, std::abs(foot.seed_u), 1e-6));
    CHECK(close(foot.foot_s, unit_circle_foot(foot.p), 1e-6));
  }
}

TEST_CASE("a wavy unit-bound turning still foliates its strip") {
  HalfPlane hp;
  const TurningCurve curve = build_turning_curve(hp, parse_field1("sin(x)"), {0.0, 1.0},
                                                 {1.0, 0.0}, {-1.0, 7.0}, 1e-3);
  FoliationRegion region;
  region.s_window = {0.0, 6.0};
  region.dist_lo = -1.2;
  region.dist_hi = 1.2;
  const FoliationReport report = verify_foliation(hp, curve, region, 500, 76005);

  CHECK(report.ok);
  CHECK(report.violations == 0);
  CHECK(report.min_margin > -1e-3);
  for (const FootData& foot : report.feet) {
    CHECK(foot.unique);
    CHECK(close(foot.foot_s, foot.seed_s, 1e-6));
    CHECK(close(foot.dist, std::abs(foot.seed_u), 1e-6));
  }
}

TEST_CASE("an over-turned curve breaks the strip checks") {
  HalfPlane hp;
  // Slope 1.5 closes the curve into a loop of length about 5.62, so twelve
  // units of parameter wrap it twice and every point sees rival feet.
  const TurningCurve curve = build_turning_curve(hp, parse_field1("1.5*x"), {0.0, 1.0},
                                                 {1.0, 0.0}, {0.0, 12.0}, 1e-3, false);
  FoliationRegion region;
  region.s_window = {0.5, 11.0};
  region.dist_lo = -1.2;
  region.dist_hi = -0.3;
  const FoliationReport report = verify_foliation(hp, curve, region, 100, 76006);

  CHECK_FALSE(report.ok);
  CHECK(report.violations >= 95);
  CHECK(report.min_margin < -0.1);
  bool witness = false;
  for (const FootData& foot : report.feet) {
    if (foot.unique) continue;
    witness = true;
    CHECK(std::abs(foot.rival_s - foot.foot_s) > 3.0 * curve.step);
  }
  CHECK(witness);
}

TEST_CASE("the extracted conformal factor solves the leaf equation") {
  HalfPlane hp;

  const TurningCurve flat = build_turning_curve(hp, constant_field(0.0), {0.0, 1.0},
                                                {1.0, 0.0}, {-1.0, 4.0}, 1e-3);
  const Field2 eta0 = extract_eta(hp, flat, {-1.5, 1.5});
  CHECK(eta0->max_order() == 2);
  for (double x : {0.0, 0.7, 2.2}) {
    for (double u : {-1.5, -0.7, 0.0, 0.4, 1.5}) {
      CHECK(close(eta0->partial(0, 0, x, u), std::cosh(u), 1e-9));
      CHECK(close(eta0->partial(0, 1, x, u), std::sinh(u), 1e-9));
      // The leaf equation makes the second u-partial the value itself.
      CHECK(eta0->partial(0, 2, x, u) == eta0->partial(0, 0, x, u));
    }
  }
  CHECK_THROWS_AS(eta0->partial(1, 0, 1.0, 0.0), std::out_of_range);
  CHECK_THROWS_AS(eta0->partial(0, 3, 1.0, 0.0), std::out_of_range);
  CHECK_THROWS_AS(eta0->partial(0, 0, 1.0, 1.6), std::out_of_range);

  const TurningCurve tilted = build_turning_curve(hp, parse_field1("0.5*x"), {0.0, 1.0},
                                                  {1.0, 0.0}, {-1.0, 4.0}, 1e-3);
  const Field2 eta1 = extract_eta(hp, tilted, {-1.5, 1.5});
  for (double x : {0.2, 1.3, 3.0})
    for (double u : {-1.2, 0.5, 1.5})
      CHECK(close(eta1->partial(0, 0, x, u),
                  std::cosh(u) + 0.5 * std::sinh(u), 1e-9));

  TurningCurve wavy = build_turning_curve(hp, parse_field1("sin(x)"), {0.0, 1.0},
                                          {1.0, 0.0}, {-1.0, 4.0}, 1e-3);
  const Field2 eta2 = extract_eta(hp, wavy, {-1.5, 1.5});
  for (double x : {0.0, 0.9, 2.5})
    for (double u : {-1.0, 0.8})
      CHECK(close(eta2->partial(0, 0, x, u),
                  std::cosh(u) + std::cos(x) * std::sinh(u), 1e-6));

  // Restricting the declared smooth set gates the queries.
  wavy.smooth = {{0.0, 2.0}};
  const Field2 gated = extract_eta(hp, wavy, {-1.5, 1.5});
  CHECK(close(gated->partial(0, 0, 1.0, 0.5),
              std::cosh(0.5) + std::cos(1.0) * std::sinh(0.5), 1e-6));
  CHECK_THROWS_AS(gated->partial(0, 0, 2.5, 0.5), NonSmoothPoint);
  CHECK_THROWS_AS(gated->partial(0, 0, -0.5, 0.5), NonSmoothPoint);
  CHECK_THROWS_AS(gated->partial(0, 0, 1.99999, 0.5), NonSmoothPoint);
}

TEST_CASE("leaf variation fields stay orthogonal and match the factor") {
  HalfPlane hp;
  const TurningCurve curve = build_turning_curve(hp, parse_field1("sin(x)"), {0.0, 1.0},
                                                 {1.0, 0.0}, {-1.0, 7.0}, 1e-3);
  const Field2 eta = extract_eta(hp, curve, {-1.3, 1.3});

  const std::size_t n = curve.s.size();
  const double h = curve.step;
  for (int g = 0; g < 20; ++g) {
    const std::size_t i = 100 + static_cast<std::size_t>(g) * (n - 200) / 19;
    // Leaf through curve(s_i), orientation chosen so u > 0 is the side the
    // curve bends away from.
    const auto leaf = [&](std::size_t idx, double u) {
      return HalfPlane::geodesic_point(curve.pos[idx], -curve.normal[idx], u);
    };
    for (double u : {-1.2, -0.6, 0.5, 1.1}) {
      // Variation of the leaf family in the foot parameter, fourth order.
      const Vector2d J = (-leaf(i + 2, u) + 8.0 * leaf(i + 1, u) -
                          8.0 * leaf(i - 1, u) + leaf(i - 2, u)) /
                         (12.0 * h);
      Vector2d pos, vel;
      HalfPlane::geodesic_state(curve.pos[i], -curve.normal[i], u, pos, vel);
      CHECK(std::abs(hp.inner(pos, J, vel)) < 1e-7);
      CHECK(close(hp.norm(pos, J), eta->partial(0, 0, curve.s[i], u), 1e-5));
    }
  }
}
