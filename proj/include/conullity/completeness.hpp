#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "conullity/metric.hpp"

namespace conullity {

// Orthogonal change of frame along x: the solution of S' = S A, S(0) = I,
// with A(x) the skew tridiagonal generator built from the profile functions.
// Skewness keeps S in SO(n+1); the solver reprojects every 100 steps and
// records how far S^T S had drifted from the identity beforehand.
struct RotationPath {
  std::vector<double> xs;          // ascending, contains 0, ends on the range ends
  std::vector<Eigen::MatrixXd> S;  // (n+1) x (n+1), aligned with xs
  double max_pre_projection_drift = 0.0;

  // entry with grid x nearest to the query
  const Eigen::MatrixXd& at(double x) const;
};

// A(x): A[j][j-1] = f_j(x), A[j][j+1] = -f_{j+1}(x), zero elsewhere. Rows and
// columns are indexed by (u, v_1 .. v_n), and A V collects the shear row b.
Eigen::MatrixXd rotation_generator(const ModelSpec& spec, double x);

// x_range must be finite and contain 0.
RotationPath solve_rotation(const ModelSpec& spec, const Interval& x_range, double step);

// Compares |w|^2 through the straightened form eta^2 dx^2 + |d theta|^2,
// d theta = S (A V dx + dV), against the assembled metric at p. The x of p is
// matched to the nearest path entry.
double warped_residual(const ModelSpec& spec, const RotationPath& path, const Point& p,
                       const Eigen::VectorXd& w);

// max warped_residual over random draws: x uniform over the path grid,
// u in [-1.2, 1.2], v in [-2, 2]^n, tangent components in [-1, 1]
double warped_metric_check(const ModelSpec& spec, const RotationPath& path, int sample_count,
                           unsigned long long seed);

// convenience: solves the rotation at step 1e-3 first
double warped_metric_check(const ModelSpec& spec, const Interval& x_range, int sample_count);

// Sufficient-condition certificates, strongest first:
//   CompleteByCor    Scal <= -2 and |k_gamma| <= 1 on the grid
//   CompleteByProp2  |k_gamma| <= (1 - eps) sqrt(|Scal| / 2) with eps > 0
//   CompleteByProp1  |k_gamma| <= sqrt(|Scal| / 2) non-strictly, and the grid
//                    gives no sign that k_gamma grows without bound
//   Inconclusive     none of the above; never a claim of incompleteness
//   IncompleteDomain x_domain is not the whole line, so the model cannot be
//                    complete regardless of curvature
enum class Verdict {
  CompleteByProp1,
  CompleteByProp2,
  CompleteByCor,
  Inconclusive,
  IncompleteDomain,
};

const char* to_string(Verdict v);

struct CertificateGrid {
  Interval x_range{-10.0, 10.0};
  int x_samples = 201;
  Interval u_range{-2.0, 2.0};
  int u_samples = 41;
};

struct CertificateReport {
  Verdict verdict = Verdict::Inconclusive;
  CertificateGrid grid;

  double ratio_max = 0.0;  // sup |k_gamma(x)| / sqrt(|Scal(x, u)| / 2)
  double epsilon = 0.0;    // 1 - ratio_max, floored at 0
  double binding_x = 0.0, binding_u = 0.0;
  double scal_sup = 0.0;    // largest Scal on the grid (closest to zero)
  double kgamma_sup = 0.0;  // sup |k_gamma|

  // Jacobi-field floor min_t cosh(lambda t) + c sinh(lambda t) at the binding
  // ratio c: the exact value sqrt(1 - c^2), and the two epsilon forms
  // sqrt(eps (2 - eps)) (equal to the exact one when c = 1 - eps) and
  // sqrt(1 - eps^2) (recorded for comparison; for eps < 1/2 it exceeds the
  // true floor, so only the other two are safe as bounds).
  double jacobi_c = 0.0;
  double jacobi_exact = 1.0;
  double bound_eps_margin = 1.0;
  double bound_eps_sq = 1.0;

  std::string text() const;
};

// Evaluates k_gamma(x) = eta_u(x, 0) and Scal(x, u) = -2 eta_uu / eta on the
// grid and returns the strongest certificate. Throws PositiveScal if Scal
// fails to be negative at a grid point, DegenerateMetric if eta does.
CertificateReport completeness_certificate(const ModelSpec& spec, const CertificateGrid& grid);

// min of cosh(lambda t) + c sinh(lambda t) over t in [-50, 50], golden
// section; equals sqrt(1 - c^2) for |c| <= 1
double jacobi_profile_min(double lambda, double c);

}  // namespace conullity
