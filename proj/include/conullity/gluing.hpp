#pragma once

#include <string>
#include <vector>

#include "conullity/fields.hpp"
#include "conullity/interval.hpp"
#include "conullity/metric.hpp"

namespace conullity {

// A globally defined metric built from the product of the surface with a flat
// factor, modified on a finite union S of open intervals where the shear
// profiles live. Away from S every modification is zero by definition; the
// whole assembly is smooth exactly when the profiles die fast enough toward
// the boundary of S relative to the growth of the conformal-factor
// derivatives, which is what check_dagger and smoothness_probe measure.
struct GlueSpec {
  int n = 1;
  std::vector<Interval> S;  // disjoint open intervals, ascending
  std::vector<Field1> f;    // n profiles, each supported inside S
  Field1 H;                 // Lipschitz-1 turning function, smooth on S
  Field2 eta;               // conformal factor; defined everywhere, smooth on S

  bool in_S(double x) const {
    for (const auto& piece : S)
      if (piece.contains(x)) return true;
    return false;
  }

  // Interval endpoints in ascending order.
  std::vector<double> boundary_points() const;

  // Hull [lo of first piece, hi of last piece].
  Interval hull() const;
};

// Structural checks: pieces ascending and disjoint, profile supports inside
// S (by hint when available, by sampling the complement otherwise), H within
// the Lipschitz-1 bound on a sampled grid over the extended hull, and the
// conformal factor normalized to 1 on the spine. Throws std::invalid_argument
// or LipschitzViolation.
void validate_glue(const GlueSpec& glue, double margin = 0.5, double step = 1e-3);

// The model whose assembly the glued metric reproduces on S.
ModelSpec as_model(const GlueSpec& glue);

// Product metric off S (all modifications zero by definition), the family
// assembly on S: same numbers bit for bit as metric_at on as_model output.
// Throws DegenerateMetric when the conformal factor is not positive.
MetricData assemble_glued_metric(const GlueSpec& glue, const Point& p);

// One conformal-factor derivative in a decay product.
struct EtaFactor {
  int a = 0;  // x-order
  int b = 0;  // u-order
};

struct DaggerOrders {
  int k_max = 6;            // profile derivative order
  int a_max = 4;            // per-factor x-order
  int b_max = 4;            // per-factor u-order
  int max_eta_factors = 2;  // factors per product
};

// Decay record of one product |f_i^(k)| * prod |d^(a,b) eta| toward one
// boundary point from one side.
struct DaggerRow {
  int profile = 1;  // i, 1-based
  int k = 0;
  std::vector<EtaFactor> factors;
  double boundary_x = 0.0;
  int side = 1;  // +1 approaches from above, -1 from below
  std::vector<double> distance;
  std::vector<double> value;  // sup over the u grid at each distance
  bool pass = false;
  std::string label() const;
};

struct DaggerReport {
  bool pass = true;
  int products = 0;
  int rows_failed = 0;
  std::vector<DaggerRow> rows;
  std::string note;  // records the certified slice; decay is not a limit claim
  std::string text() const;
};

// Evaluates every product in the requested slice on dyadic approach distances
// 2^-m, m in [m_lo, m_hi], toward each boundary point along the sides that
// lie inside S. A row passes when its last three values are non-increasing
// and below 1e-8. Report-only: failures are recorded with their witness
// values, never thrown. Orders are capped at k <= 6, a+b <= 4 per factor and
// at most 2 factors; asking for more throws std::invalid_argument.
DaggerReport check_dagger(const GlueSpec& glue, const std::vector<double>& boundary_pts,
                          Interval u_box, DaggerOrders orders = {}, int m_lo = 3,
                          int m_hi = 20, int u_samples = 9);

// One metric component probed across the boundary at one derivative order.
struct ProbeRow {
  int row = 0, col = 0;
  int order = 0;
  double left = 0.0, right = 0.0;    // one-sided derivative estimates
  double err_left = 0.0, err_right = 0.0;  // settled step-to-step residuals
  bool cauchy = false;
  bool agree = false;
};

struct SmoothnessReport {
  bool pass = true;
  double boundary_x = 0.0;
  int max_order = 0;
  Point probe;  // the (u, v) slice the components were probed on
  std::vector<ProbeRow> rows;
  std::string text() const;
};

// One-sided finite-difference derivatives of every metric component across a
// boundary point, orders 1..max_order (max 4), on step grids inside
// [1e-5, 1e-2]. PASS needs each one-sided sequence to settle (Cauchy) and the
// two sides to agree within a step-scaled tolerance. Report-only.
SmoothnessReport smoothness_probe(const GlueSpec& glue, double boundary_x,
                                  int max_order = 4);

// A maximal interval on which profile i vanishes identically (sampled).
struct StripRow {
  int profile = 1;  // i, 1-based
  Interval where;
  // The chain breaks before v_i: coordinates (x, u, v_1..v_{i-1}) on one
  // side, (v_i..v_n) on the other. The split is a full metric product on the
  // strip exactly when every later profile vanishes there too.
  int split_index = 1;
  bool tail_vanishes = false;
};

struct StripReport {
  bool reducible = false;
  std::vector<StripRow> strips;
  std::string text() const;
};

// Scans the hull of S for intervals where some profile vanishes identically;
// each one is a strip on which the holonomy-irreducibility proxy fails.
StripReport strip_report(const GlueSpec& glue, double min_length = 0.05,
                         double grid_step = 1e-3);

}  // namespace conullity
