#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conullity/fields.hpp"
#include "conullity/interval.hpp"

namespace conullity {

// The metric family on (x, u, v_1..v_n):
//   g = eta(x,u)^2 dx^2 + sum_j (dv_j + b_j dx)^2,   j = 0..n, v_0 = u,
//   b_j = v_{j-1} f_j(x) - v_{j+1} f_{j+1}(x),       v_{-1} = v_{n+1} = 0,
// with f_0 = f_{n+1} = 0 and eta(x, 0) = 1.
struct ModelSpec {
  int n = 1;
  std::vector<Field1> f;  // f[i-1] is f_i for i = 1..n
  Field2 eta;
  Interval x_domain = Interval::all();

  int dim() const { return n + 2; }

  // f_j(x) with the boundary convention f_0 = f_{n+1} = 0
  double f_at(int j, double x) const {
    return (j >= 1 && j <= n) ? f[static_cast<size_t>(j - 1)]->deriv(0, x) : 0.0;
  }
  double f_deriv(int j, int k, double x) const {
    return (j >= 1 && j <= n) ? f[static_cast<size_t>(j - 1)]->deriv(k, x) : 0.0;
  }
};

// Structural checks plus eta(x, 0) = 1 sampled across the domain window.
// Throws std::invalid_argument on failure.
void validate_spec(const ModelSpec& spec, int x_samples = 257);

struct Point {
  double x = 0.0, u = 0.0;
  Eigen::VectorXd v;  // size n

  Eigen::VectorXd coords() const {
    Eigen::VectorXd z(2 + v.size());
    z[0] = x;
    z[1] = u;
    z.tail(v.size()) = v;
    return z;
  }
  static Point from_coords(const Eigen::VectorXd& z) {
    Point p;
    p.x = z[0];
    p.u = z[1];
    p.v = z.tail(z.size() - 2);
    return p;
  }
};

struct MetricData {
  Eigen::MatrixXd g, g_inv;
  Eigen::VectorXd b;  // b_0..b_n: the dx-shear of (du, dv_1, .., dv_n)
  double eta = 0.0;
};

// b_j at (x, u, v); v may be any vector of size n.
Eigen::VectorXd shear_b(const ModelSpec& spec, double x, double u, const Eigen::VectorXd& v);

// Metric and its closed-form inverse. Throws DegenerateMetric when eta <= 0
// and NearBoundary when x is outside (or within 1e-9 of) the x-domain ends.
MetricData metric_at(const ModelSpec& spec, const Point& p);
MetricData metric_at(const ModelSpec& spec, const Eigen::VectorXd& z);

// Columns (e, @u, @v_1, .., @v_n) with e = (1/eta)(@x - sum_j b_j @v_j);
// orthonormal for g, i.e. E^T g E = I.
Eigen::MatrixXd orthonormal_frame(const ModelSpec& spec, const Point& p);

}  // namespace conullity
