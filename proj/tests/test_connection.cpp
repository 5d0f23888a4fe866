#include "conullity/connection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "conullity/fields.hpp"
#include "conullity/metric.hpp"
#include "doctest.h"
#include "specs.hpp"
#include "support.hpp"

using namespace conullity;
using testsupport::Rng;

namespace {

// closed forms for the mixed symbols, assembled from inverse-metric columns
Eigen::VectorXd gamma_xu_closed(const ModelSpec& s, const Point& p, const MetricData& m) {
  const double eta_u = s.eta->partial(0, 1, p.x, p.u);
  const double f1 = s.f_at(1, p.x);
  const double b1 = s.n >= 1 ? m.b[1] : 0.0;
  Eigen::VectorXd g = m.g_inv.col(0) * (m.eta * eta_u + f1 * b1);
  if (s.n >= 1) g += m.g_inv.col(2) * f1;
  return g;
}

Eigen::VectorXd gamma_xv_closed(const ModelSpec& s, const Point& p, const MetricData& m, int i) {
  const double fi = s.f_at(i, p.x);
  const double fi1 = s.f_at(i + 1, p.x);
  const double blo = m.b[i - 1];
  const double bhi = i + 1 <= s.n ? m.b[i + 1] : 0.0;
  Eigen::VectorXd g = m.g_inv.col(0) * (-fi * blo + fi1 * bhi);
  g -= m.g_inv.col(1 + (i - 1)) * fi;  // V_{i-1} column; V_0 = u
  if (i + 1 <= s.n) g += m.g_inv.col(1 + (i + 1)) * fi1;
  return g;
}

}  // namespace

TEST_CASE("mixed symbols match their closed forms") {
  Rng rng(72001);
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    for (int trial = 0; trial < 12; ++trial) {
      const Point p = testsupport::sample_point(rng, sample);
      const MetricData m = metric_at(s, p);
      const auto G = christoffel_at(s, p);
      const int d = s.dim();

      Eigen::VectorXd got(d);
      for (int k = 0; k < d; ++k) got[k] = G[k](0, 1);
      CHECK((got - gamma_xu_closed(s, p, m)).cwiseAbs().maxCoeff() < 1e-10);

      for (int i = 1; i <= s.n; ++i) {
        for (int k = 0; k < d; ++k) got[k] = G[k](0, 1 + i);
        CHECK((got - gamma_xv_closed(s, p, m, i)).cwiseAbs().maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("directions without dx are totally geodesic") {
  Rng rng(72002);
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    const int d = s.dim();
    for (int trial = 0; trial < 8; ++trial) {
      const auto G = christoffel_at(s, testsupport::sample_point(rng, sample));
      double worst = 0.0;
      for (int k = 0; k < d; ++k)
        for (int a = 1; a < d; ++a)
          for (int b = 1; b < d; ++b) worst = std::max(worst, std::abs(G[k](a, b)));
      CHECK(worst == 0.0);
    }
  }
}

TEST_CASE("symbols on the u = v = 0 slice reduce to profile data") {
  Rng rng(72003);
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    const int d = s.dim();
    for (int trial = 0; trial < 8; ++trial) {
      Point p = testsupport::sample_point(rng, sample);
      p.u = 0.0;
      p.v.setZero();
      const auto G = christoffel_at(s, p);
      const double ku = s.eta->partial(0, 1, p.x, 0.0);

      // nab_dx du = ku dx + f_1 dv_1, nab_dx dx = -ku du
      Eigen::VectorXd want = Eigen::VectorXd::Zero(d);
      want[0] = ku;
      if (s.n >= 1) want[2] = s.f_at(1, p.x);
      for (int k = 0; k < d; ++k) CHECK(testsupport::close(G[k](0, 1), want[k], 1e-10));

      for (int k = 0; k < d; ++k)
        CHECK(testsupport::close(G[k](0, 0), k == 1 ? -ku : 0.0, 1e-10));
    }
  }
}

TEST_CASE("analytic metric partials agree with central differences") {
  Rng rng(72004);
  const double h = 1e-5;
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    const int d = s.dim();
    for (int trial = 0; trial < 8; ++trial) {
      const Point p = testsupport::sample_point(rng, sample);
      const auto dg = metric_partials(s, p);
      for (int m = 0; m < d; ++m) {
        Eigen::VectorXd z = p.coords();
        z[m] += h;
        const Eigen::MatrixXd gp = metric_at(s, z).g;
        z[m] -= 2.0 * h;
        const Eigen::MatrixXd gm = metric_at(s, z).g;
        const Eigen::MatrixXd fd = (gp - gm) / (2.0 * h);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            CHECK(testsupport::close(fd(i, j), dg[m](i, j), 1e-6, 1e-6));
      }
    }
  }
}

TEST_CASE("symbols reproduce the metric derivative exactly") {
  // d_m g_ij = sum_k Gamma^k_mi g_kj + Gamma^k_mj g_ki, with both sides from
  // the closed formulas; only rounding should remain
  Rng rng(72005);
  for (const auto& sample : testsupport::all_samples()) {
    const ModelSpec& s = sample.spec;
    const int d = s.dim();
    for (int trial = 0; trial < 8; ++trial) {
      const Point p = testsupport::sample_point(rng, sample);
      const MetricData gd = metric_at(s, p);
      const auto dg = metric_partials(s, p);
      const auto G = christoffel_at(s, p);
      double worst = 0.0;
      for (int m = 0; m < d; ++m)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double rhs = 0.0;
            for (int k = 0; k < d; ++k)
              rhs += G[k](m, i) * gd.g(k, j) + G[k](m, j) * gd.g(k, i);
            worst = std::max(worst, std::abs(dg[m](i, j) - rhs));
          }
      CHECK(worst < 1e-10);
    }
  }
}
