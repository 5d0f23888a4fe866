#include "conullity/metric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "conullity/errors.hpp"

namespace conullity {

void validate_spec(const ModelSpec& spec, int x_samples) {
  if (spec.n < 0) throw std::invalid_argument("spec: n must be nonnegative");
  if (static_cast<int>(spec.f.size()) != spec.n)
    throw std::invalid_argument("spec: expected " + std::to_string(spec.n) + " fields f_i");
  for (const auto& fi : spec.f) {
    if (!fi) throw std::invalid_argument("spec: null f field");
    if (fi->max_order() < 1) throw std::invalid_argument("spec: f fields need first derivatives");
  }
  if (!spec.eta) throw std::invalid_argument("spec: null eta");
  if (spec.eta->max_order() < 2)
    throw std::invalid_argument("spec: eta needs u-partials up to order 2");
  if (!(spec.x_domain.hi > spec.x_domain.lo))
    throw std::invalid_argument("spec: empty x-domain");

  // sample eta(x, 0) = 1 on a window of the domain
  const double lo = std::max(spec.x_domain.lo, -10.0);
  const double hi = std::min(spec.x_domain.hi, 10.0);
  for (int i = 0; i < x_samples; ++i) {
    const double t = x_samples == 1 ? 0.5 : static_cast<double>(i) / (x_samples - 1);
    const double x = lo + (hi - lo) * (0.5 / x_samples + t * (1.0 - 1.0 / x_samples));
    double value;
    try {
      value = spec.eta->partial(0, 0, x, 0.0);
    } catch (const Error&) {
      continue;  // eta fields backed by a finite grid may not cover the window
    }
    if (std::abs(value - 1.0) > 1e-9)
      throw std::invalid_argument("spec: eta(x, 0) = " + std::to_string(value) + " at x = " +
                                  std::to_string(x) + ", expected 1");
  }
}

Eigen::VectorXd shear_b(const ModelSpec& spec, double x, double u, const Eigen::VectorXd& v) {
  const int n = spec.n;
  // V_0 = u, V_j = v_j
  auto V = [&](int j) -> double {
    if (j < 0 || j > n) return 0.0;
    return j == 0 ? u : v[j - 1];
  };
  Eigen::VectorXd b(n + 1);
  for (int j = 0; j <= n; ++j)
    b[j] = V(j - 1) * spec.f_at(j, x) - V(j + 1) * spec.f_at(j + 1, x);
  return b;
}

MetricData metric_at(const ModelSpec& spec, const Point& p) {
  const double x = p.x, u = p.u;
  if (!spec.x_domain.contains(x) ||
      (std::isfinite(spec.x_domain.lo) && x - spec.x_domain.lo < 1e-9) ||
      (std::isfinite(spec.x_domain.hi) && spec.x_domain.hi - x < 1e-9))
    throw NearBoundary(x);

  MetricData m;
  m.eta = spec.eta->partial(0, 0, x, u);
  if (!(m.eta > 0.0)) throw DegenerateMetric(x, u, m.eta);
  m.b = shear_b(spec, x, u, p.v);

  const int d = spec.dim();
  m.g = Eigen::MatrixXd::Identity(d, d);
  m.g(0, 0) = m.eta * m.eta + m.b.squaredNorm();
  for (int j = 0; j <= spec.n; ++j) {
    m.g(0, 1 + j) = m.b[j];
    m.g(1 + j, 0) = m.b[j];
  }

  // closed-form inverse: the (u, v) block is I + b b^T / eta^2
  const double ie2 = 1.0 / (m.eta * m.eta);
  m.g_inv.resize(d, d);
  m.g_inv(0, 0) = ie2;
  for (int j = 0; j <= spec.n; ++j) {
    m.g_inv(0, 1 + j) = -m.b[j] * ie2;
    m.g_inv(1 + j, 0) = -m.b[j] * ie2;
    for (int i = 0; i <= spec.n; ++i)
      m.g_inv(1 + i, 1 + j) = (i == j ? 1.0 : 0.0) + m.b[i] * m.b[j] * ie2;
  }
  return m;
}

MetricData metric_at(const ModelSpec& spec, const Eigen::VectorXd& z) {
  return metric_at(spec, Point::from_coords(z));
}

Eigen::MatrixXd orthonormal_frame(const ModelSpec& spec, const Point& p) {
  const MetricData m = metric_at(spec, p);
  const int d = spec.dim();
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(d, d);
  E(0, 0) = 1.0 / m.eta;
  for (int j = 0; j <= spec.n; ++j) E(1 + j, 0) = -m.b[j] / m.eta;
  return E;
}

}  // namespace conullity
