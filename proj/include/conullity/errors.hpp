#pragma once

#include <stdexcept>
#include <string>

namespace conullity {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// eta <= 0 at an evaluation point: the metric degenerates there.
struct DegenerateMetric : Error {
  double x, u, eta;
  DegenerateMetric(double x_, double u_, double eta_)
      : Error("degenerate metric: eta(" + std::to_string(x_) + ", " + std::to_string(u_) +
              ") = " + std::to_string(eta_)),
        x(x_), u(u_), eta(eta_) {}
};

// eta crossed zero while integrating the scalar Jacobi equation.
struct NonPositiveEta : Error {
  double x, u;
  NonPositiveEta(double x_, double u_)
      : Error("eta becomes nonpositive near (x, u) = (" + std::to_string(x_) + ", " +
              std::to_string(u_) + ")"),
        x(x_), u(u_) {}
};

// x outside, or within 1e-9 of, the declared x-domain ends.
struct NearBoundary : Error {
  double x;
  explicit NearBoundary(double x_)
      : Error("x = " + std::to_string(x_) + " outside or too close to the x-domain ends"), x(x_) {}
};

// Two plane-spanning vectors are (numerically) linearly dependent.
struct ParallelVectors : Error {
  ParallelVectors() : Error("plane vectors are numerically parallel") {}
};

// A leaf-invariant path doubles back in x.
struct NonMonotonePath : Error {
  NonMonotonePath() : Error("path is not monotone in x") {}
};

// Turning function exceeds Lipschitz constant 1 on the sample grid.
struct LipschitzViolation : Error {
  double s;
  explicit LipschitzViolation(double s_)
      : Error("turning function violates the Lipschitz-1 bound near s = " + std::to_string(s_)),
        s(s_) {}
};

// Evaluation requested at a point excluded from the declared smooth set.
struct NonSmoothPoint : Error {
  double x;
  explicit NonSmoothPoint(double x_)
      : Error("x = " + std::to_string(x_) + " lies outside the declared smooth set"), x(x_) {}
};

// Scalar curvature fails to be negative on the certificate grid.
struct PositiveScal : Error {
  double x, u, scal;
  PositiveScal(double x_, double u_, double scal_)
      : Error("Scal(" + std::to_string(x_) + ", " + std::to_string(u_) +
              ") = " + std::to_string(scal_) + " is not negative"),
        x(x_), u(u_), scal(scal_) {}
};

// Bad run configuration (unknown key, malformed value, missing section).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace conullity
