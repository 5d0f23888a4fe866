#include "conullity/geodesics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "conullity/errors.hpp"
#include "conullity/fields.hpp"
#include "conullity/metric.hpp"
#include "doctest.h"
#include "specs.hpp"
#include "support.hpp"

using namespace conullity;
using testsupport::Rng;

namespace {

ModelSpec flat_spec() {
  ModelSpec s;
  s.n = 1;
  s.f = {constant_field(0.0)};
  s.eta = constant_eta(1.0);
  return s;
}

double simpson_abs_f1(const ModelSpec& s, double x0, double x1, int steps) {
  double total = 0.0;
  const double h = (x1 - x0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = x0 + i * h;
    total += h / 6.0 *
             (std::abs(s.f_at(1, a)) + 4.0 * std::abs(s.f_at(1, a + 0.5 * h)) +
              std::abs(s.f_at(1, a + h)));
  }
  return total;
}

}  // namespace

TEST_CASE("coordinate lines in the leaf directions are geodesics") {
  Rng rng(74001);
  for (const auto& sample : {testsupport::all_samples()[1], testsupport::all_samples()[3]}) {
    const ModelSpec& s = sample.spec;
    const int d = s.dim();
    for (int dir = 1; dir < d; ++dir) {
      GeodesicState start;
      start.p = testsupport::sample_point(rng, sample);
      start.p.u *= 0.1;  // keep room to run 10 units inside the sampled box
      start.velocity = Eigen::VectorXd::Unit(d, dir);

      const Trajectory tr = integrate_geodesic(s, start, 10.0, 1e-3);
      CHECK(!tr.left_domain);
      CHECK(tr.states.size() == 10001);
      CHECK(tr.max_speed_drift() < 1e-8 * 10.0);

      const GeodesicState& last = tr.states.back();
      CHECK(last.arc == 10.0);
      Eigen::VectorXd want = start.p.coords();
      want[dir] += last.arc;
      CHECK(last.p.x == start.p.x);
      for (int j = 1; j < d; ++j)
        CHECK(testsupport::close(last.p.coords()[j], want[j], j == dir ? 1e-9 : 0.0));
      CHECK((last.velocity - start.velocity).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("a flat model integrates euclidean lines") {
  const ModelSpec s = flat_spec();
  Rng rng(74002);
  for (int trial = 0; trial < 4; ++trial) {
    GeodesicState start;
    start.p = testsupport::random_point(rng, 1);
    start.velocity = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (start.velocity.norm() < 0.1) start.velocity[0] = 1.0;

    const Trajectory tr = integrate_geodesic(s, start, 10.0, 1e-3);
    const double speed = std::sqrt(tr.initial_speed2);
    for (size_t k = 0; k < tr.states.size(); k += 500) {
      const Eigen::VectorXd want =
          start.p.coords() + (tr.states[k].arc / speed) * start.velocity;
      CHECK((tr.states[k].p.coords() - want).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK(tr.max_speed_drift() < 1e-10);
  }
}

TEST_CASE("generic geodesics hold their speed over length ten") {
  Rng rng(74003);
  for (const auto& sample :
       {testsupport::all_samples()[1], testsupport::all_samples()[2]}) {
    const ModelSpec& s = sample.spec;
    GeodesicState start;
    start.p = testsupport::sample_point(rng, sample);
    start.velocity.resize(s.dim());
    for (int i = 0; i < s.dim(); ++i) start.velocity[i] = rng.uniform(-1.0, 1.0);
    start.velocity[0] = 0.7;

    const Trajectory tr = integrate_geodesic(s, start, 10.0, 1e-3);
    CHECK(!tr.left_domain);
    CHECK(tr.max_speed_drift() < 1e-8);
  }
}

TEST_CASE("runs stop cleanly at a finite domain end") {
  ModelSpec s = flat_spec();
  s.x_domain = {0.0, 5.0};

  GeodesicState start;
  start.p.x = 2.5;
  start.p.u = 0.0;
  start.p.v = Eigen::VectorXd::Zero(1);
  start.velocity = Eigen::Vector3d(1.0, 0.0, 0.0);

  const Trajectory tr = integrate_geodesic(s, start, 10.0, 1e-3);
  CHECK(tr.left_domain);
  CHECK(!tr.states.empty());
  const double x_end = tr.states.back().p.x;
  CHECK(x_end > 4.9);
  CHECK(x_end < 5.0);
  CHECK(tr.states.back().arc < 10.0);
}

TEST_CASE("the leaf exponential reproduces its input coordinates") {
  Rng rng(74004);
  const double x0 = 0.3;

  // the worked small and large cases
  ModelSpec s1 = testsupport::spec_a();
  Eigen::VectorXd w(2);
  CHECK((exp_map(s1, x0, Eigen::VectorXd::Zero(2)).coords() -
         Eigen::Vector3d(x0, 0.0, 0.0))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  w << 1.0, 0.5;
  CHECK((exp_map(s1, x0, w).coords() - Eigen::Vector3d(x0, 1.0, 0.5)).cwiseAbs().maxCoeff() <
        1e-8);
  w << 10.0, -7.0;
  CHECK((exp_map(s1, x0, w).coords() - Eigen::Vector3d(x0, 10.0, -7.0)).cwiseAbs().maxCoeff() <
        1e-7);

  for (const auto& sample :
       {testsupport::all_samples()[2], testsupport::all_samples()[3]}) {
    const ModelSpec& s = sample.spec;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd big(s.n + 1);
      for (int i = 0; i <= s.n; ++i) big[i] = rng.uniform(-4.0, 4.0);
      const Point q = exp_map(s, x0, big);
      CHECK(q.x == x0);
      CHECK(testsupport::close(q.u, big[0], 1e-7));
      for (int i = 0; i < s.n; ++i) CHECK(testsupport::close(q.v[i], big[1 + i], 1e-7));
    }
  }
}

TEST_CASE("the variation field of the leaf exponential matches its closed form") {
  // spine case: J = e_2 exactly
  {
    const ModelSpec s = testsupport::spec_b();
    Point p;
    p.x = 0.4;
    p.u = 0.0;
    p.v = Eigen::VectorXd::Zero(2);
    const JacobiCheck jc = dphi_dx_check(s, p);
    CHECK(jc.residual < 1e-8);
    CHECK((jc.closed - Eigen::VectorXd::Unit(4, 0)).cwiseAbs().maxCoeff() < 1e-14);
  }

  // the n = 2 worked point
  {
    ModelSpec s;
    s.n = 2;
    s.f = {constant_field(1.0), constant_field(2.0)};
    s.eta = ch_eta(constant_field(0.0));  // cosh u
    Point p;
    p.x = 0.0;
    p.u = 1.0;
    p.v = Eigen::Vector2d(1.0, 1.0);
    const JacobiCheck jc = dphi_dx_check(s, p);
    CHECK(jc.residual < 1e-6);
    CHECK(jc.inner_residual < 1e-8);
  }

  Rng rng(74005);
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    for (int trial = 0; trial < 3; ++trial) {
      const Point p = testsupport::sample_point(rng, sample);
      const JacobiCheck jc = dphi_dx_check(s, p);
      CHECK(jc.residual < 1e-6);
      CHECK(jc.inner_residual < 1e-8);

      // the closed form telescopes to the x-direction
      CHECK((jc.closed - Eigen::VectorXd::Unit(s.dim(), 0)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("the leaf invariant ignores everything but the crossing profile") {
  const ModelSpec s = testsupport::spec_b();

  auto pt = [](double x, double u, double v1, double v2) {
    Point p;
    p.x = x;
    p.u = u;
    p.v = Eigen::Vector2d(v1, v2);
    return p;
  };

  // inside one leaf the pairing keeps only rounding residue of the
  // x-component, so the invariant collapses
  CHECK(leaf_invariant_A(s, {pt(0.2, 0, 0, 0), pt(0.2, 1.0, 3.0, -2.0), pt(0.2, -1, 0, 1)}) <
        1e-12);

  const std::vector<Point> direct = {pt(-1, 0, 0, 0), pt(1, 0, 0, 0)};
  const std::vector<Point> high = {pt(-1, 0, 0, 0), pt(-0.5, 1.0, 3.0, 0.0),
                                   pt(0.5, 1.0, 3.0, -1.0), pt(1, 0, 0, 0)};
  const std::vector<Point> low = {pt(-1, 0, 0, 0), pt(0, -0.8, 1.0, 2.0), pt(1, 0, 0, 0)};

  const double a1 = leaf_invariant_A(s, direct);
  const double a2 = leaf_invariant_A(s, high);
  const double a3 = leaf_invariant_A(s, low);
  CHECK(std::abs(a1 - a2) < 1e-8);
  CHECK(std::abs(a1 - a3) < 1e-8);
  CHECK(testsupport::close(a1, simpson_abs_f1(s, -1.0, 1.0, 4000), 1e-8));

  CHECK_THROWS_AS(leaf_invariant_A(s, {pt(-1, 0, 0, 0), pt(0.5, 0, 0, 0), pt(0.2, 0, 0, 0)}),
                  NonMonotonePath);
}

TEST_CASE("a unit crossing profile makes the invariant count leaf distance") {
  ModelSpec s;
  s.n = 1;
  s.f = {constant_field(1.0)};
  s.eta = ch_eta(constant_field(0.0));

  Point a, b;
  a.x = 0.0;
  a.v = Eigen::VectorXd::Zero(1);
  b.x = 2.0;
  b.v = Eigen::VectorXd::Zero(1);
  CHECK(testsupport::close(leaf_invariant_A(s, {a, b}), 2.0, 1e-10));
}
