#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conullity/metric.hpp"

namespace conullity {

struct GeodesicState {
  Point p;
  Eigen::VectorXd velocity;  // coordinate components, size n + 2
  double arc = 0.0;
};

// States are recorded at arc-length multiples of the step (plus the endpoint
// when the length is not a multiple). left_domain marks a run cut short at a
// finite x-domain end; the trajectory up to the exit is kept.
struct Trajectory {
  std::vector<GeodesicState> states;
  std::vector<double> speeds;  // g(gamma', gamma') at each state
  double initial_speed2 = 0.0;
  bool left_domain = false;

  double max_speed_drift() const;
};

Trajectory integrate_geodesic(const ModelSpec& spec, const GeodesicState& start, double length,
                              double step = 1e-3);

// Geodesic from (x0, 0, .., 0) with initial velocity w in the (u, v)-block,
// run for unit time. The leaves are flat and totally geodesic, so the result
// must reproduce (x0, w) in coordinates.
Point exp_map(const ModelSpec& spec, double x0, const Eigen::VectorXd& w, double step = 1e-3);

// Coordinate components of the variation field J(t) of the leaf exponential
// along t -> (x, t u, t v): eta(x, tu) e_2 + sum_j b_j(x, tu, tv) @V_j.
Eigen::VectorXd jacobi_closed_form(const ModelSpec& spec, const Point& p, double t);

struct JacobiCheck {
  double residual = 0.0;        // |FD of exp_map - closed form|, coordinates
  double inner_residual = 0.0;  // worst relative gap of the three pairings
  Eigen::VectorXd fd, closed;
};

// Differentiates exp_map in its base parameter by central difference and
// compares against jacobi_closed_form at t = 1; also checks
// g(J, J) = eta^2 + sum b_j^2, g(J, @u) = -v_1 f_1, g(J, @v_i) = b_i.
JacobiCheck dphi_dx_check(const ModelSpec& spec, const Point& p, double fd_step = 1e-4,
                          double step = 1e-3);

// Integral of |a_1 g(gamma', e_2)| along a coordinate polyline, by composite
// Simpson over pieces of coordinate length <= 1e-3. Throws NonMonotonePath
// when x decreases along the path.
double leaf_invariant_A(const ModelSpec& spec, const std::vector<Point>& path);

}  // namespace conullity
