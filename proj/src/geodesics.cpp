#include "conullity/geodesics.hpp"

#include <cmath>
#include <stdexcept>

#include "conullity/connection.hpp"
#include "conullity/errors.hpp"

namespace conullity {

namespace {

Eigen::VectorXd accel(const ModelSpec& spec, const Eigen::VectorXd& z,
                      const Eigen::VectorXd& zdot) {
  const auto G = christoffel_at(spec, Point::from_coords(z));
  const int d = static_cast<int>(z.size());
  Eigen::VectorXd a(d);
  for (int k = 0; k < d; ++k) a[k] = -zdot.dot(G[k] * zdot);
  return a;
}

// one RK4 step of (z, zdot); throws NearBoundary if a stage leaves the domain
void rk4_step(const ModelSpec& spec, Eigen::VectorXd& z, Eigen::VectorXd& zdot, double dt) {
  const Eigen::VectorXd k1v = zdot, k1a = accel(spec, z, zdot);
  const Eigen::VectorXd k2v = zdot + 0.5 * dt * k1a;
  const Eigen::VectorXd k2a = accel(spec, z + 0.5 * dt * k1v, k2v);
  const Eigen::VectorXd k3v = zdot + 0.5 * dt * k2a;
  const Eigen::VectorXd k3a = accel(spec, z + 0.5 * dt * k2v, k3v);
  const Eigen::VectorXd k4v = zdot + dt * k3a;
  const Eigen::VectorXd k4a = accel(spec, z + dt * k3v, k4v);
  z += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  zdot += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
}

double g_speed2(const ModelSpec& spec, const Eigen::VectorXd& z, const Eigen::VectorXd& zdot) {
  const Eigen::MatrixXd g = metric_at(spec, z).g;
  return zdot.dot(g * zdot);
}

}  // namespace

double Trajectory::max_speed_drift() const {
  double worst = 0.0;
  for (double s : speeds) worst = std::max(worst, std::abs(s - initial_speed2));
  return worst;
}

Trajectory integrate_geodesic(const ModelSpec& spec, const GeodesicState& start, double length,
                              double step) {
  if (step <= 0.0) throw std::invalid_argument("integrate_geodesic: step must be positive");
  if (length < 0.0) throw std::invalid_argument("integrate_geodesic: negative length");

  Trajectory out;
  out.initial_speed2 = g_speed2(spec, start.p.coords(), start.velocity);
  out.states.push_back(start);
  out.states.front().arc = 0.0;
  out.speeds.push_back(out.initial_speed2);

  const double speed = std::sqrt(out.initial_speed2);
  if (speed == 0.0 || length == 0.0) return out;

  const double dt = step / speed;
  const long long nfull = static_cast<long long>(std::floor(length / step + 1e-9));
  const double rest = length - static_cast<double>(nfull) * step;

  Eigen::VectorXd z = start.p.coords(), zdot = start.velocity;
  for (long long k = 0; k < nfull; ++k) {
    try {
      rk4_step(spec, z, zdot, dt);
      out.speeds.push_back(g_speed2(spec, z, zdot));
    } catch (const NearBoundary&) {
      out.left_domain = true;
      return out;
    }
    out.states.push_back({Point::from_coords(z), zdot, static_cast<double>(k + 1) * step});
  }
  if (rest > 1e-9 * length) {
    try {
      rk4_step(spec, z, zdot, rest / speed);
      out.speeds.push_back(g_speed2(spec, z, zdot));
      out.states.push_back({Point::from_coords(z), zdot, length});
    } catch (const NearBoundary&) {
      out.left_domain = true;
    }
  }
  return out;
}

Point exp_map(const ModelSpec& spec, double x0, const Eigen::VectorXd& w, double step) {
  if (w.size() != spec.n + 1) throw std::invalid_argument("exp_map: w must have size n + 1");
  GeodesicState s;
  s.p.x = x0;
  s.p.u = 0.0;
  s.p.v = Eigen::VectorXd::Zero(spec.n);
  s.velocity = Eigen::VectorXd::Zero(spec.dim());
  s.velocity.tail(spec.n + 1) = w;

  const double speed = w.norm();  // the (u, v)-block of g is the identity here
  const Trajectory tr = integrate_geodesic(spec, s, speed, step);
  if (tr.left_domain) throw NearBoundary(x0);
  return tr.states.back().p;
}

Eigen::VectorXd jacobi_closed_form(const ModelSpec& spec, const Point& p, double t) {
  Point q;
  q.x = p.x;
  q.u = t * p.u;
  q.v = t * p.v;
  const MetricData m = metric_at(spec, q);
  Eigen::VectorXd J = m.eta * orthonormal_frame(spec, q).col(0);
  for (int j = 0; j <= spec.n; ++j) J[1 + j] += m.b[j];
  return J;
}

JacobiCheck dphi_dx_check(const ModelSpec& spec, const Point& p, double fd_step, double step) {
  Eigen::VectorXd w(spec.n + 1);
  w[0] = p.u;
  w.tail(spec.n) = p.v;

  JacobiCheck out;
  const Eigen::VectorXd zp = exp_map(spec, p.x + fd_step, w, step).coords();
  const Eigen::VectorXd zm = exp_map(spec, p.x - fd_step, w, step).coords();
  out.fd = (zp - zm) / (2.0 * fd_step);
  out.closed = jacobi_closed_form(spec, p, 1.0);
  out.residual = (out.fd - out.closed).cwiseAbs().maxCoeff();

  const MetricData m = metric_at(spec, p);
  const Eigen::VectorXd gJ = m.g * out.fd;
  auto rel = [](double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); };
  out.inner_residual = rel(out.fd.dot(gJ), m.eta * m.eta + m.b.squaredNorm());
  const double b0 = spec.n >= 1 ? -p.v[0] * spec.f_at(1, p.x) : 0.0;
  out.inner_residual = std::max(out.inner_residual, rel(gJ[1], b0));
  for (int i = 1; i <= spec.n; ++i)
    out.inner_residual = std::max(out.inner_residual, rel(gJ[1 + i], m.b[i]));
  return out;
}

double leaf_invariant_A(const ModelSpec& spec, const std::vector<Point>& path) {
  if (path.size() < 2) return 0.0;
  for (size_t k = 0; k + 1 < path.size(); ++k)
    if (path[k + 1].x < path[k].x) throw NonMonotonePath();

  double total = 0.0;
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    const Eigen::VectorXd z0 = path[k].coords();
    const Eigen::VectorXd dz = path[k + 1].coords() - z0;
    const double seg_len = dz.norm();
    if (seg_len == 0.0) continue;

    auto integrand = [&](double s) {
      const Point q = Point::from_coords(z0 + s * dz);
      const MetricData m = metric_at(spec, q);
      const double a1 = spec.f_at(1, q.x) / m.eta;
      const double pairing = dz.dot(m.g * orthonormal_frame(spec, q).col(0));
      return std::abs(a1 * pairing);
    };

    const int pieces = static_cast<int>(std::ceil(seg_len / 1e-3));
    const double h = 1.0 / pieces;
    double seg = 0.0;
    double left = integrand(0.0);
    for (int i = 0; i < pieces; ++i) {
      const double mid = integrand((i + 0.5) * h);
      const double right = i + 1 == pieces ? integrand(1.0) : integrand((i + 1) * h);
      seg += h / 6.0 * (left + 4.0 * mid + right);
      left = right;
    }
    total += seg;
  }
  return total;
}

}  // namespace conullity
