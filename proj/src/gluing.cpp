#include "conullity/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "conullity/errors.hpp"

namespace conullity {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

}  // namespace

std::vector<double> GlueSpec::boundary_points() const {
  std::vector<double> pts;
  pts.reserve(2 * S.size());
  for (const auto& piece : S) {
    pts.push_back(piece.lo);
    pts.push_back(piece.hi);
  }
  return pts;
}

Interval GlueSpec::hull() const {
  if (S.empty()) throw std::invalid_argument("glue spec has no interval pieces");
  return {S.front().lo, S.back().hi};
}

void validate_glue(const GlueSpec& glue, double margin, double step) {
  if (glue.n < 1) throw std::invalid_argument("glue spec needs n >= 1");
  if (glue.f.size() != static_cast<size_t>(glue.n))
    throw std::invalid_argument("glue spec needs exactly n profiles");
  for (const auto& fi : glue.f)
    if (!fi) throw std::invalid_argument("null profile in glue spec");
  if (!glue.H) throw std::invalid_argument("null turning function in glue spec");
  if (!glue.eta) throw std::invalid_argument("null conformal factor in glue spec");
  if (glue.S.empty()) throw std::invalid_argument("glue spec has no interval pieces");
  if (!(margin > 0) || !(step > 0)) throw std::invalid_argument("margin and step must be positive");

  for (size_t i = 0; i < glue.S.size(); ++i) {
    const auto& piece = glue.S[i];
    if (!piece.bounded() || !(piece.lo < piece.hi))
      throw std::invalid_argument("glue pieces must be bounded nonempty open intervals");
    if (i > 0 && !(glue.S[i - 1].hi <= piece.lo))
      throw std::invalid_argument("glue pieces must be disjoint and ascending");
  }

  const Interval hull = glue.hull();
  const double lo = hull.lo - margin, hi = hull.hi + margin;
  const int nodes = std::max(2, static_cast<int>(std::ceil((hi - lo) / step)) + 1);

  // Profile supports must sit inside S: accept a support hint contained in
  // one piece, otherwise insist the sampled values vanish off S.
  for (int i = 0; i < glue.n; ++i) {
    const auto hint = glue.f[i]->support_hint();
    if (hint) {
      bool inside = false;
      for (const auto& piece : glue.S)
        if (piece.lo <= hint->lo && hint->hi <= piece.hi) inside = true;
      if (inside) continue;
    }
    for (int q = 0; q < nodes; ++q) {
      const double x = lo + (hi - lo) * q / (nodes - 1);
      if (!glue.in_S(x) && std::abs((*glue.f[i])(x)) > 0.0)
        throw std::invalid_argument("profile " + std::to_string(i + 1) +
                                    " does not vanish off the glue pieces near x = " + fmt(x));
    }
  }

  // Turning function within the unit Lipschitz bound, sampled pairwise.
  double prev_x = lo, prev_h = (*glue.H)(lo);
  for (int q = 1; q < nodes; ++q) {
    const double x = lo + (hi - lo) * q / (nodes - 1);
    const double hx = (*glue.H)(x);
    if (std::abs(hx - prev_h) > (x - prev_x) * (1.0 + 1e-9) + 1e-12)
      throw LipschitzViolation(0.5 * (prev_x + x));
    prev_x = x;
    prev_h = hx;
  }

  // Spine normalization eta(x, 0) = 1 everywhere, glued part or not.
  for (int q = 0; q < nodes; ++q) {
    const double x = lo + (hi - lo) * q / (nodes - 1);
    if (std::abs(glue.eta->partial(0, 0, x, 0.0) - 1.0) > 1e-9)
      throw std::invalid_argument("conformal factor is not 1 on the spine near x = " + fmt(x));
  }
}

ModelSpec as_model(const GlueSpec& glue) {
  ModelSpec spec;
  spec.n = glue.n;
  spec.f = glue.f;
  spec.eta = glue.eta;
  spec.x_domain = Interval::all();
  return spec;
}

MetricData assemble_glued_metric(const GlueSpec& glue, const Point& p) {
  if (glue.in_S(p.x)) return metric_at(as_model(glue), p);

  // Off S every profile vanishes, so the shear terms are identically zero:
  // build the product metric directly instead of evaluating them.
  const double eta = glue.eta->partial(0, 0, p.x, p.u);
  if (!(eta > 0)) throw DegenerateMetric(p.x, p.u, eta);
  const int dim = glue.n + 2;
  MetricData out;
  out.g = Eigen::MatrixXd::Identity(dim, dim);
  out.g_inv = Eigen::MatrixXd::Identity(dim, dim);
  out.g(0, 0) = eta * eta;
  out.g_inv(0, 0) = 1.0 / (eta * eta);
  out.b = Eigen::VectorXd::Zero(glue.n + 1);
  out.eta = eta;
  return out;
}

std::string DaggerRow::label() const {
  std::string out = "f" + std::to_string(profile) + "^(" + std::to_string(k) + ")";
  for (const auto& fac : factors)
    out += " * eta^(" + std::to_string(fac.a) + "," + std::to_string(fac.b) + ")";
  return out;
}

std::string DaggerReport::text() const {
  std::ostringstream os;
  os << "decay check: " << (pass ? "PASS" : "FAIL") << "\n";
  os << "  products in slice: " << products << ", rows: " << rows.size()
     << ", failed: " << rows_failed << "\n";
  os << "  " << note << "\n";
  int shown = 0;
  for (const auto& row : rows) {
    if (row.pass) continue;
    if (shown == 0) os << "  failing rows:\n";
    if (shown >= 10) {
      os << "    ... " << (rows_failed - shown) << " more\n";
      break;
    }
    os << "    " << row.label() << " at x = " << fmt(row.boundary_x)
       << (row.side > 0 ? " (from above)" : " (from below)")
       << ", last values = " << fmt(row.value[row.value.size() - 3]) << ", "
       << fmt(row.value[row.value.size() - 2]) << ", " << fmt(row.value.back()) << "\n";
    ++shown;
  }
  return os.str();
}

DaggerReport check_dagger(const GlueSpec& glue, const std::vector<double>& boundary_pts,
                          Interval u_box, DaggerOrders orders, int m_lo, int m_hi,
                          int u_samples) {
  if (orders.k_max < 0 || orders.k_max > 6)
    throw std::invalid_argument("profile order must stay within 0..6");
  if (orders.a_max < 0 || orders.a_max > 4 || orders.b_max < 0 || orders.b_max > 4)
    throw std::invalid_argument("factor orders must stay within 0..4");
  if (orders.max_eta_factors < 0 || orders.max_eta_factors > 2)
    throw std::invalid_argument("at most 2 conformal-factor derivatives per product");
  if (m_lo < 1 || m_hi < m_lo + 2)
    throw std::invalid_argument("need at least three dyadic approach distances");
  if (!u_box.bounded() || u_samples < 1) throw std::invalid_argument("bad u sampling box");

  // Single factors d^(a,b) eta with 1 <= a+b <= 4, clipped to what the field
  // can differentiate.
  const int eta_order = std::min(4, glue.eta->max_order());
  std::vector<EtaFactor> singles;
  for (int a = 0; a <= orders.a_max; ++a)
    for (int b = 0; b <= orders.b_max; ++b)
      if (a + b >= 1 && a + b <= eta_order) singles.push_back({a, b});

  std::vector<std::vector<EtaFactor>> factor_sets;
  factor_sets.push_back({});
  if (orders.max_eta_factors >= 1)
    for (const auto& s : singles) factor_sets.push_back({s});
  if (orders.max_eta_factors >= 2)
    for (size_t i = 0; i < singles.size(); ++i)
      for (size_t j = i; j < singles.size(); ++j)
        factor_sets.push_back({singles[i], singles[j]});

  std::vector<double> us(u_samples);
  for (int q = 0; q < u_samples; ++q)
    us[q] = u_samples == 1 ? 0.5 * (u_box.lo + u_box.hi)
                           : u_box.lo + (u_box.hi - u_box.lo) * q / (u_samples - 1);

  DaggerReport report;
  report.products = 0;
  report.note = "slice: one profile derivative of order <= " + std::to_string(orders.k_max) +
                " times at most " + std::to_string(orders.max_eta_factors) +
                " conformal-factor partials of order <= " + std::to_string(eta_order) +
                " each; pass = last three dyadic samples non-increasing and below 1e-8 "
                "(observed decay on a finite grid, not a limit claim)";

  for (int i = 1; i <= glue.n; ++i) {
    const int k_upper = std::min(orders.k_max, glue.f[i - 1]->max_order());
    report.products += (k_upper + 1) * static_cast<int>(factor_sets.size());
  }

  for (double bp : boundary_pts) {
    for (int side : {-1, +1}) {
      // Only approaches that stay inside S are informative; off S the
      // profiles vanish identically.
      if (!glue.in_S(bp + side * std::ldexp(1.0, -m_hi))) continue;

      for (int i = 1; i <= glue.n; ++i) {
        const int k_upper = std::min(orders.k_max, glue.f[i - 1]->max_order());
        for (int k = 0; k <= k_upper; ++k) {
          for (const auto& fs : factor_sets) {
            DaggerRow row;
            row.profile = i;
            row.k = k;
            row.factors = fs;
            row.boundary_x = bp;
            row.side = side;
            for (int m = m_lo; m <= m_hi; ++m) {
              const double d = std::ldexp(1.0, -m);
              const double x = bp + side * d;
              const double fk = glue.f[i - 1]->deriv(k, x);
              double val = 0.0;
              if (fk != 0.0) {
                for (double u : us) {
                  double prod = std::abs(fk);
                  for (const auto& fac : fs)
                    prod *= std::abs(glue.eta->partial(fac.a, fac.b, x, u));
                  val = std::max(val, prod);
                }
              }
              row.distance.push_back(d);
              row.value.push_back(val);
            }
            const size_t s = row.value.size();
            row.pass = row.value[s - 3] >= row.value[s - 2] &&
                       row.value[s - 2] >= row.value[s - 1] && row.value[s - 3] < 1e-8;
            if (!row.pass) {
              report.pass = false;
              ++report.rows_failed;
            }
            report.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return report;
}

std::string SmoothnessReport::text() const {
  std::ostringstream os;
  os << "smoothness probe at x = " << fmt(boundary_x) << ": " << (pass ? "PASS" : "FAIL") << "\n";
  os << "  orders 1.." << max_order << ", components probed: "
     << rows.size() / static_cast<size_t>(std::max(1, max_order)) << "\n";
  int shown = 0;
  for (const auto& row : rows) {
    if (row.cauchy && row.agree) continue;
    if (shown == 0) os << "  failing rows:\n";
    if (shown >= 10) {
      os << "    ...\n";
      break;
    }
    os << "    g(" << row.row << "," << row.col << ") order " << row.order << ": left = "
       << fmt(row.left) << " +- " << fmt(row.err_left) << ", right = " << fmt(row.right)
       << " +- " << fmt(row.err_right) << (row.cauchy ? "" : " [not settled]")
       << (row.agree ? "" : " [sides disagree]") << "\n";
    ++shown;
  }
  return os.str();
}

namespace {

// One-sided m-th derivative, second-order accurate, on nodes
// x_b + side*q*h, q = 0..m+1. Including the boundary node is legitimate:
// the assembly is continuous there (profiles vanish on the boundary), so its
// value belongs to both one-sided limits.
double one_sided_diff(const GlueSpec& glue, const Point& base, double x_b, int side, int m,
                      double h, int gi, int gj) {
  static const std::vector<std::vector<double>> coef = {
      {-1.5, 2.0, -0.5},
      {2.0, -5.0, 4.0, -1.0},
      {-2.5, 9.0, -12.0, 7.0, -1.5},
      {3.0, -14.0, 26.0, -24.0, 11.0, -2.0}};
  const auto& c = coef[m - 1];
  double acc = 0.0;
  for (size_t q = 0; q < c.size(); ++q) {
    Point p = base;
    p.x = x_b + side * static_cast<double>(q) * h;
    acc += c[q] * assemble_glued_metric(glue, p).g(gi, gj);
  }
  const double sh = side * h;
  double denom = 1.0;
  for (int q = 0; q < m; ++q) denom *= sh;
  return acc / denom;
}

}  // namespace

SmoothnessReport smoothness_probe(const GlueSpec& glue, double boundary_x, int max_order) {
  if (max_order < 1 || max_order > 4)
    throw std::invalid_argument("probe order must stay within 1..4");

  SmoothnessReport report;
  report.boundary_x = boundary_x;
  report.max_order = max_order;

  Point base;
  base.x = boundary_x;
  base.u = 0.5;
  base.v = Eigen::VectorXd(glue.n);
  for (int j = 0; j < glue.n; ++j) base.v[j] = (j % 2 == 0) ? 0.8 : -0.6;
  report.probe = base;

  // Halving step grid inside [1e-5, 1e-2].
  std::vector<double> steps;
  for (int q = 0; q < 8; ++q) steps.push_back(1e-2 / (1 << q));

  const int dim = glue.n + 2;
  for (int gi = 0; gi < dim; ++gi) {
    for (int gj = gi; gj < dim; ++gj) {
      for (int m = 1; m <= max_order; ++m) {
        ProbeRow row;
        row.row = gi;
        row.col = gj;
        row.order = m;

        double est[2] = {0, 0}, err[2] = {0, 0};
        bool settled[2] = {false, false};
        for (int si = 0; si < 2; ++si) {
          const int side = si == 0 ? -1 : +1;
          std::vector<double> d;
          for (double h : steps)
            d.push_back(one_sided_diff(glue, base, boundary_x, side, m, h, gi, gj));
          // Pick the step where consecutive estimates are closest; that
          // residual is the error scale. A sequence that keeps drifting by a
          // fixed fraction of its size never settles.
          size_t best = 0;
          double best_e = std::abs(d[1] - d[0]);
          for (size_t q = 1; q + 1 < d.size(); ++q) {
            const double e = std::abs(d[q + 1] - d[q]);
            if (e < best_e) {
              best_e = e;
              best = q;
            }
          }
          est[si] = d[best + 1];
          err[si] = best_e;
          settled[si] = best_e <= 0.05 * std::max(1.0, std::abs(est[si])) + 1e-6;
        }
        row.left = est[0];
        row.right = est[1];
        row.err_left = err[0];
        row.err_right = err[1];
        row.cauchy = settled[0] && settled[1];
        const double scale = std::max({1.0, std::abs(row.left), std::abs(row.right)});
        row.agree = std::abs(row.left - row.right) <=
                    20.0 * (row.err_left + row.err_right) + 1e-6 * scale;
        if (!(row.cauchy && row.agree)) report.pass = false;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

std::string StripReport::text() const {
  std::ostringstream os;
  if (!reducible) {
    os << "no vanishing strips: the shear chain stays coupled on the sampled hull\n";
    return os.str();
  }
  os << "reducible on strips:\n";
  for (const auto& s : strips) {
    os << "  profile " << s.profile << " vanishes on (" << fmt(s.where.lo) << ", "
       << fmt(s.where.hi) << "): split coordinates before index " << s.split_index
       << (s.tail_vanishes ? " (all later profiles vanish too: full product)" : "") << "\n";
  }
  return os.str();
}

StripReport strip_report(const GlueSpec& glue, double min_length, double grid_step) {
  if (!(min_length > 0) || !(grid_step > 0))
    throw std::invalid_argument("min_length and grid_step must be positive");
  const Interval hull = glue.hull();
  const int nodes = std::max(2, static_cast<int>(std::ceil(hull.length() / grid_step)) + 1);
  std::vector<double> xs(nodes);
  for (int q = 0; q < nodes; ++q)
    xs[q] = hull.lo + (hull.hi - hull.lo) * q / (nodes - 1);

  StripReport report;
  for (int i = 1; i <= glue.n; ++i) {
    const auto& fi = *glue.f[i - 1];
    int run_start = -1;
    for (int q = 0; q <= nodes; ++q) {
      const bool zero = q < nodes && std::abs(fi(xs[q])) <= 1e-300;
      if (zero && run_start < 0) run_start = q;
      if (!zero && run_start >= 0) {
        const int run_end = q - 1;
        if (xs[run_end] - xs[run_start] >= min_length) {
          StripRow row;
          row.profile = i;
          row.where = {xs[run_start], xs[run_end]};
          row.split_index = i;
          row.tail_vanishes = true;
          for (int j = i + 1; j <= glue.n && row.tail_vanishes; ++j)
            for (int t = run_start; t <= run_end; ++t)
              if (std::abs((*glue.f[j - 1])(xs[t])) > 1e-300) {
                row.tail_vanishes = false;
                break;
              }
          report.strips.push_back(std::move(row));
        }
        run_start = -1;
      }
    }
  }
  report.reducible = !report.strips.empty();
  return report;
}

}  // namespace conullity
