#pragma once

// Shared sample models for the test suite. Five members exercise every field
// backend: constants, bumps, expressions, cosh-profile eta and the ODE eta.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "conullity/expr.hpp"
#include "conullity/fields.hpp"
#include "conullity/metric.hpp"
#include "support.hpp"

namespace testsupport {

inline conullity::ModelSpec spec_a() {
  conullity::ModelSpec s;
  s.n = 1;
  s.f = {conullity::constant_field(1.0)};
  s.eta = conullity::ch_eta(conullity::constant_field(0.5));
  return s;
}

inline conullity::ModelSpec spec_b() {
  conullity::ModelSpec s;
  s.n = 2;
  s.f = {conullity::flat_bump(0.0, 1.0, 0.8), conullity::parse_field1("2 + 0.3*sin(x)")};
  s.eta = conullity::ch_eta(conullity::parse_field1("0.4*sin(x)"));
  return s;
}

inline conullity::ModelSpec spec_c() {
  conullity::ModelSpec s;
  s.n = 3;
  s.f = {conullity::parse_field1("1 + 0.5*cos(x)"), conullity::flat_bump(0.2, 1.5, 0.6),
         conullity::constant_field(0.7)};
  s.eta = conullity::parse_field2("cosh(u) + 0.2*sin(x + 1)*sinh(u)");
  return s;
}

inline conullity::ModelSpec spec_d() {
  conullity::ModelSpec s;
  s.n = 4;
  s.f = {conullity::parse_field1("0.5 + 0.1*x"), conullity::constant_field(1.5),
         conullity::flat_bump(-0.3, 2.0, 1.0), conullity::parse_field1("cos(0.5*x)")};
  s.eta = conullity::ch_eta(conullity::flat_bump(0.0, 2.0, 0.5));
  return s;
}

// eta integrated from a prescribed scalar curvature; x-domain restricted to
// the solved grid
inline conullity::ModelSpec spec_e() {
  conullity::ModelSpec s;
  s.n = 2;
  s.f = {conullity::constant_field(0.8), conullity::parse_field1("1 + 0.2*sin(x)")};
  s.eta = conullity::eta_from_scal(conullity::parse_field2("-2*(1 + 0.2*sin(x))"),
                                   conullity::parse_field1("0.2*sin(x)"), {-2.5, 2.5}, 201,
                                   {-1.6, 1.6});
  s.x_domain = {-2.5, 2.5};
  return s;
}

// sampling box shared by the randomized tests; spec_e's grid covers it
inline conullity::Point random_point(Rng& rng, int n) {
  conullity::Point p;
  p.x = rng.uniform(-1.8, 1.8);
  p.u = rng.uniform(-1.2, 1.2);
  p.v.resize(n);
  for (int i = 0; i < n; ++i) p.v[i] = rng.uniform(-2.0, 2.0);
  return p;
}

// spec_e interpolates between solved columns, so tests that difference in x
// keep their stencils inside one interpolation window by snapping x to the
// column pitch.
struct Sample {
  conullity::ModelSpec spec;
  double snap_dx = 0.0;
};

inline std::vector<Sample> all_samples() {
  return {{spec_a(), 0.0}, {spec_b(), 0.0}, {spec_c(), 0.0}, {spec_d(), 0.0},
          {spec_e(), 5.0 / 200}};
}

inline conullity::Point sample_point(Rng& rng, const Sample& s) {
  conullity::Point p = random_point(rng, s.spec.n);
  if (s.snap_dx > 0.0) p.x = std::round(p.x / s.snap_dx) * s.snap_dx;
  return p;
}

}  // namespace testsupport
