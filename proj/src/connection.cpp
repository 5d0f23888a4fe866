#include "conullity/connection.hpp"

#include <vector>

namespace conullity {

namespace {

std::vector<Eigen::MatrixXd> partials_impl(const ModelSpec& spec, const Point& p,
                                           const MetricData& m) {
  const int d = spec.dim(), n = spec.n;
  const double x = p.x, u = p.u;

  auto V = [&](int j) -> double {
    if (j < 0 || j > n) return 0.0;
    return j == 0 ? u : p.v[j - 1];
  };
  auto B = [&](int j) -> double { return (j >= 0 && j <= n) ? m.b[j] : 0.0; };
  std::vector<double> f(n + 2, 0.0), fp(n + 2, 0.0);
  for (int j = 1; j <= n; ++j) {
    f[j] = spec.f_at(j, x);
    fp[j] = spec.f_deriv(j, 1, x);
  }
  const double eta_x = spec.eta->partial(1, 0, x, u);
  const double eta_u = spec.eta->partial(0, 1, x, u);

  std::vector<Eigen::MatrixXd> dg(d, Eigen::MatrixXd::Zero(d, d));

  // x-slice: d b_j / dx = V_{j-1} f_j' - V_{j+1} f_{j+1}'
  auto dbdx = [&](int j) { return V(j - 1) * fp[j] - V(j + 1) * fp[j + 1]; };
  double gxx = 2.0 * m.eta * eta_x;
  for (int j = 0; j <= n; ++j) gxx += 2.0 * m.b[j] * dbdx(j);
  dg[0](0, 0) = gxx;
  for (int j = 0; j <= n; ++j) dg[0](0, 1 + j) = dg[0](1 + j, 0) = dbdx(j);

  // V_m-slices: d b_j / d V_m = f_j [m = j-1] - f_{j+1} [m = j+1]
  for (int mi = 0; mi <= n; ++mi) {
    Eigen::MatrixXd& D = dg[1 + mi];
    D(0, 0) = 2.0 * (B(mi + 1) * f[mi + 1] - B(mi - 1) * f[mi]);
    if (mi == 0) D(0, 0) += 2.0 * m.eta * eta_u;
    if (mi + 1 <= n) D(0, 1 + mi + 1) = D(1 + mi + 1, 0) = f[mi + 1];
    if (mi >= 1) D(0, 1 + mi - 1) = D(1 + mi - 1, 0) = -f[mi];
  }
  return dg;
}

}  // namespace

std::vector<Eigen::MatrixXd> metric_partials(const ModelSpec& spec, const Point& p) {
  return partials_impl(spec, p, metric_at(spec, p));
}

std::vector<Eigen::MatrixXd> christoffel_at(const ModelSpec& spec, const Point& p) {
  const MetricData m = metric_at(spec, p);
  const std::vector<Eigen::MatrixXd> dg = partials_impl(spec, p, m);
  const int d = spec.dim();

  std::vector<Eigen::MatrixXd> G(d, Eigen::MatrixXd::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l)
          s += m.g_inv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        G[k](i, j) = G[k](j, i) = 0.5 * s;
      }
  return G;
}

}  // namespace conullity
