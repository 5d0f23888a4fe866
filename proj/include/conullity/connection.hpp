#pragma once

#include <Eigen/Dense>
#include <vector>

#include "conullity/metric.hpp"

namespace conullity {

// dg[m](i, j) = d g_ij / d z^m from the closed component formulas. Only the
// x-row and x-column of each slice can be nonzero.
std::vector<Eigen::MatrixXd> metric_partials(const ModelSpec& spec, const Point& p);

// G[k](i, j) = Gamma^k_ij of the Levi-Civita connection, assembled from the
// analytic metric partials and the closed-form inverse.
std::vector<Eigen::MatrixXd> christoffel_at(const ModelSpec& spec, const Point& p);

}  // namespace conullity
