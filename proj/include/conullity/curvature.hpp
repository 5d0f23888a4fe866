#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conullity/metric.hpp"

namespace conullity {

// Curvature tensor at a point, convention
//   R(X, Y)Z = nab_X nab_Y Z - nab_Y nab_X Z - nab_[X,Y] Z,
//   R^l_ijk dz^l = R(@i, @j) @k,  low(i,j,k,m) = g(R(@i,@j)@k, @m).
// Christoffel derivatives use one central difference of the analytic symbols.
struct CurvatureData {
  int dim = 0;
  Eigen::MatrixXd g;
  std::vector<double> up, low;

  double up_at(int l, int i, int j, int k) const {
    return up[static_cast<size_t>(((l * dim + i) * dim + j) * dim + k)];
  }
  double low_at(int i, int j, int k, int m) const {
    return low[static_cast<size_t>(((i * dim + j) * dim + k) * dim + m)];
  }
  Eigen::MatrixXd ricci() const;  // Ric_jk = sum_i R^i_ijk
};

CurvatureData riemann_at(const ModelSpec& spec, const Point& p, double h = 1e-5);

double scalar_curvature(const ModelSpec& spec, const Point& p, double h = 1e-5);

// max |low| over components with a v-index, relative to max |low| overall;
// zero for a metric whose curvature is carried entirely by the (x, u)-plane.
double nullity_residual(const ModelSpec& spec, const Point& p, double h = 1e-5);

// Per-point adapted-frame data: the frame (e_2, e_1, T_1..T_n) with
// e_2 = (1/eta)(@x - sum b_j @V_j), e_1 = @u, T_i = @v_i.
struct FrenetData {
  Eigen::VectorXd a;  // a[i-1] = f_i / eta
  double beta = 0.0;  // -eta_u / eta
  // column j holds nab_{e_2}(frame_j) in frame coordinates; skew tridiagonal
  Eigen::MatrixXd M;
  Eigen::Matrix2d splitting;  // [[0, a_1], [0, 0]], nilpotent
};
FrenetData frenet_at(const ModelSpec& spec, const Point& p);

// max component gap between nab_{e_2} @v_i from the Christoffel symbols and
// its closed form -(f_i/eta) @V_{i-1} + (f_{i+1}/eta) @V_{i+1}
double covariant_residual(const ModelSpec& spec, const Point& p);

// Sectional curvature of span{a, b}; coefficients in the orthonormal basis
// (T_1, .., T_n, e_1, e_2). Inputs are normalized; throws ParallelVectors
// when the plane degenerates.
double plane_sec(const ModelSpec& spec, const Point& p, Eigen::VectorXd a, Eigen::VectorXd b);

}  // namespace conullity
