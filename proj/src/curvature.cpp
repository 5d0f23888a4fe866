#include "conullity/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conullity/connection.hpp"
#include "conullity/errors.hpp"

namespace conullity {

Eigen::MatrixXd CurvatureData::ricci() const {
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) ric(j, k) += up_at(i, i, j, k);
  return ric;
}

CurvatureData riemann_at(const ModelSpec& spec, const Point& p, double h) {
  const int d = spec.dim();

  // dG[m][k](i, j) = d Gamma^k_ij / d z^m
  std::vector<std::vector<Eigen::MatrixXd>> dG(d);
  for (int m = 0; m < d; ++m) {
    Eigen::VectorXd z = p.coords();
    z[m] += h;
    const auto plus = christoffel_at(spec, Point::from_coords(z));
    z[m] -= 2.0 * h;
    const auto minus = christoffel_at(spec, Point::from_coords(z));
    dG[m].resize(d);
    for (int k = 0; k < d; ++k) dG[m][k] = (plus[k] - minus[k]) / (2.0 * h);
  }
  const auto G = christoffel_at(spec, p);

  CurvatureData R;
  R.dim = d;
  R.g = metric_at(spec, p).g;
  R.up.assign(static_cast<size_t>(d) * d * d * d, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double s = dG[i][l](j, k) - dG[j][l](i, k);
          for (int m = 0; m < d; ++m) s += G[l](i, m) * G[m](j, k) - G[l](j, m) * G[m](i, k);
          R.up[static_cast<size_t>(((l * d + i) * d + j) * d + k)] = s;
        }

  R.low.assign(R.up.size(), 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) s += R.up_at(l, i, j, k) * R.g(l, m);
          R.low[static_cast<size_t>(((i * d + j) * d + k) * d + m)] = s;
        }
  return R;
}

double scalar_curvature(const ModelSpec& spec, const Point& p, double h) {
  const CurvatureData R = riemann_at(spec, p, h);
  const Eigen::MatrixXd ric = R.ricci();
  const Eigen::MatrixXd g_inv = metric_at(spec, p).g_inv;
  return (g_inv.array() * ric.array()).sum();
}

double nullity_residual(const ModelSpec& spec, const Point& p, double h) {
  const CurvatureData R = riemann_at(spec, p, h);
  const int d = R.dim;
  double all = 0.0, v_touching = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int m = 0; m < d; ++m) {
          const double a = std::abs(R.low_at(i, j, k, m));
          all = std::max(all, a);
          if (i >= 2 || j >= 2 || k >= 2 || m >= 2) v_touching = std::max(v_touching, a);
        }
  return all == 0.0 ? 0.0 : v_touching / all;
}

FrenetData frenet_at(const ModelSpec& spec, const Point& p) {
  const MetricData m = metric_at(spec, p);
  const int n = spec.n;

  FrenetData fr;
  fr.a.resize(n);
  for (int i = 1; i <= n; ++i) fr.a[i - 1] = spec.f_at(i, p.x) / m.eta;
  fr.beta = -spec.eta->partial(0, 1, p.x, p.u) / m.eta;

  fr.M = Eigen::MatrixXd::Zero(n + 2, n + 2);
  fr.M(1, 0) = fr.beta;
  fr.M(0, 1) = -fr.beta;
  for (int i = 1; i <= n; ++i) {
    fr.M(1 + i, i) = fr.a[i - 1];
    fr.M(i, 1 + i) = -fr.a[i - 1];
  }

  fr.splitting << 0.0, (n >= 1 ? fr.a[0] : 0.0), 0.0, 0.0;
  return fr;
}

double covariant_residual(const ModelSpec& spec, const Point& p) {
  const MetricData m = metric_at(spec, p);
  const auto G = christoffel_at(spec, p);
  const int d = spec.dim(), n = spec.n;

  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const int ci = 1 + i;  // coordinate slot of v_i
    for (int k = 0; k < d; ++k) {
      // nab_e @v_i with e = (1/eta)(@x - sum_m b_m @V_m)
      double got = G[k](0, ci);
      for (int mm = 0; mm <= n; ++mm) got -= m.b[mm] * G[k](1 + mm, ci);
      got /= m.eta;

      double want = 0.0;
      if (k == 1 + (i - 1)) want = -spec.f_at(i, p.x) / m.eta;
      if (k == 1 + (i + 1)) want = spec.f_at(i + 1, p.x) / m.eta;
      worst = std::max(worst, std::abs(got - want));
    }
  }
  return worst;
}

double plane_sec(const ModelSpec& spec, const Point& p, Eigen::VectorXd a, Eigen::VectorXd b) {
  const int n = spec.n;
  if (a.size() != n + 2 || b.size() != n + 2)
    throw std::invalid_argument("plane_sec: coefficient vectors must have length n + 2");
  if (a.norm() == 0.0 || b.norm() == 0.0) throw ParallelVectors();
  a.normalize();
  b.normalize();
  const double area2 = 1.0 - std::pow(a.dot(b), 2);
  if (area2 < 1e-12) throw ParallelVectors();

  const MetricData m = metric_at(spec, p);
  const double wedge = a[n] * b[n + 1] - a[n + 1] * b[n];  // e_1 ^ e_2 component
  const double eta_uu = spec.eta->partial(0, 2, p.x, p.u);
  return wedge * wedge / area2 * (-eta_uu / m.eta);
}

}  // namespace conullity
