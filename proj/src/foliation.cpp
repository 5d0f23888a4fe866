#include "conullity/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "conullity/errors.hpp"

namespace conullity {

namespace {

Eigen::Vector2d rot90(const Eigen::Vector2d& w) { return {-w[1], w[0]}; }

// Geodesic curvature guard for the ambient model: positions must stay in the
// open half-plane with enough room for the 1/b terms.
void check_height(double b) {
  if (!(b > 1e-12)) throw Error("turning curve reached the half-plane boundary");
}

}  // namespace

double HalfPlane::dist(const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
  const double arg = 1.0 + ((p - q).squaredNorm()) / (2.0 * p[1] * q[1]);
  return std::acosh(std::max(1.0, arg));
}

void HalfPlane::geodesic_state(const Eigen::Vector2d& p, const Eigen::Vector2d& w,
                               double t, Eigen::Vector2d& pos, Eigen::Vector2d& vel) {
  const double a0 = p[0], b0 = p[1];
  if (std::abs(w[0]) < 1e-13 * std::abs(w[1])) {
    // Vertical line: b moves exponentially in arc length.
    const double sgn = w[1] >= 0.0 ? 1.0 : -1.0;
    const double b = b0 * std::exp(sgn * t);
    pos = {a0, b};
    vel = {0.0, sgn * b};
    return;
  }
  // Mirror so the circle runs left to right, then a = c + r*tanh(sigma0 + t),
  // b = r*sech(sigma0 + t) is unit speed with sigma advancing by arc length.
  const double mirror = w[0] > 0.0 ? 1.0 : -1.0;
  const double sigma0 =
      std::atanh(std::min(1.0 - 1e-16, std::max(-1.0 + 1e-16, -w[1] / b0)));
  const double r = b0 * std::cosh(sigma0);
  const double c = mirror * a0 - r * std::tanh(sigma0);
  const double sig = sigma0 + t;
  const double sech = 1.0 / std::cosh(sig);
  pos = {mirror * (c + r * std::tanh(sig)), r * sech};
  vel = {mirror * r * sech * sech, -r * sech * std::tanh(sig)};
}

Eigen::Vector2d HalfPlane::geodesic_point(const Eigen::Vector2d& p,
                                          const Eigen::Vector2d& w, double t) {
  Eigen::Vector2d pos, vel;
  geodesic_state(p, w, t, pos, vel);
  return pos;
}

std::size_t TurningCurve::index_near(double s_query) const {
  const auto it = std::lower_bound(s.begin(), s.end(), s_query);
  if (it == s.begin()) return 0;
  if (it == s.end()) return s.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - s.begin());
  return (s[hi] - s_query < s_query - s[hi - 1]) ? hi : hi - 1;
}

namespace {

struct CurveState {
  Eigen::Vector2d pos;
  Eigen::Vector2d frame;
};

// d/ds of (pos, frame): the tangent is the frame rotated by theta, the frame
// obeys the parallel transport equations of the half-plane connection.
CurveState curve_rhs(const CurveState& y, double theta) {
  check_height(y.pos[1]);
  const double b = y.pos[1];
  const Eigen::Vector2d t =
      std::cos(theta) * y.frame + std::sin(theta) * rot90(y.frame);
  CurveState d;
  d.pos = t;
  d.frame = {(t[0] * y.frame[1] + t[1] * y.frame[0]) / b,
             (-t[0] * y.frame[0] + t[1] * y.frame[1]) / b};
  return d;
}

CurveState axpy(const CurveState& y, double h, const CurveState& d) {
  return {y.pos + h * d.pos, y.frame + h * d.frame};
}

}  // namespace

TurningCurve build_turning_curve(const HalfPlane& surface, const Field1& H,
                                 const Eigen::Vector2d& p0, const Eigen::Vector2d& v0,
                                 Interval s_range, double step, bool enforce_lipschitz) {
  if (!H) throw std::invalid_argument("turning function is empty");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!s_range.bounded() || s_range.lo > 0.0 || s_range.hi < 0.0)
    throw std::invalid_argument("s_range must be bounded and contain 0");
  if (std::abs(surface.norm(p0, v0) - 1.0) > 1e-9)
    throw std::invalid_argument("initial velocity must be g-unit");

  const double H0 = H->deriv(0, 0.0);

  // Node grids for both directions, built as fresh products so refinements
  // share abscissas, with an exact landing on the range ends.
  const auto nodes_toward = [&](double bound) {
    std::vector<double> out;  // excludes s = 0
    const double dir = bound > 0.0 ? 1.0 : -1.0;
    for (int k = 1;; ++k) {
      double st = dir * (k * step);
      if (dir * st >= dir * bound) {
        out.push_back(bound);
        break;
      }
      out.push_back(st);
    }
    return out;
  };
  std::vector<double> fwd, bwd;
  if (s_range.hi > 0.0) fwd = nodes_toward(s_range.hi);
  if (s_range.lo < 0.0) bwd = nodes_toward(s_range.lo);

  // Screen the turning function on the grid before integrating anything.
  // Between adjacent nodes a Lipschitz-1 function cannot gain more than the
  // spacing; a grid violation pins a witness location.
  const auto angles_of = [&](const std::vector<double>& nodes) {
    std::vector<double> th(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) th[i] = H->deriv(0, nodes[i]) - H0;
    return th;
  };
  const std::vector<double> th_fwd = angles_of(fwd), th_bwd = angles_of(bwd);
  if (enforce_lipschitz) {
    const auto screen = [&](const std::vector<double>& nodes, const std::vector<double>& th) {
      double prev_s = 0.0, prev_th = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double ds = std::abs(nodes[i] - prev_s);
        if (std::abs(th[i] - prev_th) > ds * (1.0 + 1e-9) + 1e-12)
          throw LipschitzViolation(0.5 * (nodes[i] + prev_s));
        prev_s = nodes[i];
        prev_th = th[i];
      }
    };
    screen(fwd, th_fwd);
    screen(bwd, th_bwd);
  }

  struct Row {
    double s, theta;
    CurveState y;
  };
  const auto march = [&](const std::vector<double>& nodes, const std::vector<double>& th) {
    std::vector<Row> rows;
    rows.reserve(nodes.size());
    CurveState y{p0, v0};
    double s0 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double dt = nodes[i] - s0;
      const double sm = s0 + 0.5 * dt;
      const double th_m = H->deriv(0, sm) - H0;
      const CurveState k1 = curve_rhs(y, H->deriv(0, s0) - H0);
      const CurveState k2 = curve_rhs(axpy(y, 0.5 * dt, k1), th_m);
      const CurveState k3 = curve_rhs(axpy(y, 0.5 * dt, k2), th_m);
      const CurveState k4 = curve_rhs(axpy(y, dt, k3), th[i]);
      y.pos += (dt / 6.0) * (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos);
      y.frame += (dt / 6.0) * (k1.frame + 2.0 * k2.frame + 2.0 * k3.frame + k4.frame);
      check_height(y.pos[1]);
      rows.push_back({nodes[i], th[i], y});
      s0 = nodes[i];
    }
    return rows;
  };
  const std::vector<Row> rows_fwd = march(fwd, th_fwd);
  const std::vector<Row> rows_bwd = march(bwd, th_bwd);

  TurningCurve curve;
  curve.step = step;
  curve.H = H;
  curve.smooth = {s_range};
  const std::size_t total = rows_bwd.size() + 1 + rows_fwd.size();
  curve.s.reserve(total);
  curve.pos.reserve(total);
  curve.tangent.reserve(total);
  curve.normal.reserve(total);
  curve.frame.reserve(total);
  curve.angle.reserve(total);
  const auto push = [&](double sv, double theta, const CurveState& y) {
    const Eigen::Vector2d t =
        std::cos(theta) * y.frame + std::sin(theta) * rot90(y.frame);
    curve.s.push_back(sv);
    curve.pos.push_back(y.pos);
    curve.tangent.push_back(t);
    curve.normal.push_back(rot90(t));
    curve.frame.push_back(y.frame);
    curve.angle.push_back(theta);
  };
  for (auto it = rows_bwd.rbegin(); it != rows_bwd.rend(); ++it) push(it->s, it->theta, it->y);
  push(0.0, 0.0, CurveState{p0, v0});
  for (const Row& row : rows_fwd) push(row.s, row.theta, row.y);
  return curve;
}

namespace {

// Cubic Hermite interpolation of the curve between stored samples, using the
// stored tangents as derivative data.
Eigen::Vector2d hermite_pos(const TurningCurve& c, std::size_t i, double sq) {
  const double h = c.s[i + 1] - c.s[i];
  const double t = (sq - c.s[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * c.pos[i] + (t3 - 2.0 * t2 + t) * h * c.tangent[i] +
         (-2.0 * t3 + 3.0 * t2) * c.pos[i + 1] + (t3 - t2) * h * c.tangent[i + 1];
}

double dist_on_curve(const TurningCurve& c, const Eigen::Vector2d& p, double sq) {
  const auto it = std::upper_bound(c.s.begin(), c.s.end(), sq);
  std::size_t i = it == c.s.begin() ? 0 : static_cast<std::size_t>(it - c.s.begin()) - 1;
  i = std::min(i, c.s.size() - 2);
  return HalfPlane::dist(p, hermite_pos(c, i, sq));
}

// Golden-section minimum of the interpolated distance over [lo, hi].
double golden_foot(const TurningCurve& c, const Eigen::Vector2d& p, double lo, double hi) {
  constexpr double phi = 0.6180339887498949;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = dist_on_curve(c, p, x1), f2 = dist_on_curve(c, p, x2);
  while (hi - lo > 1e-10) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = dist_on_curve(c, p, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = dist_on_curve(c, p, x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FoliationReport verify_foliation(const HalfPlane& surface, const TurningCurve& curve,
                                 const FoliationRegion& region, int samples,
                                 unsigned long long seed) {
  const std::size_t n = curve.s.size();
  if (n < 6) throw std::invalid_argument("curve has too few samples");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  if (!(region.dist_lo < region.dist_hi))
    throw std::invalid_argument("region offsets are empty");
  if (region.s_window.lo < curve.s.front() || region.s_window.hi > curve.s.back())
    throw std::invalid_argument("s_window leaves the curve range");

  // Feet are drawn on grid nodes so the seed parameter is exact.
  std::size_t j_lo = curve.index_near(region.s_window.lo);
  std::size_t j_hi = curve.index_near(region.s_window.hi);
  if (curve.s[j_lo] < region.s_window.lo) ++j_lo;
  if (curve.s[j_hi] > region.s_window.hi) --j_hi;
  if (j_hi < j_lo) throw std::invalid_argument("s_window contains no grid nodes");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(j_lo, j_hi);
  std::uniform_real_distribution<double> offset(region.dist_lo, region.dist_hi);

  FoliationReport report;
  report.ok = true;
  report.min_margin = std::numeric_limits<double>::infinity();
  report.feet.reserve(static_cast<std::size_t>(samples));

  std::vector<double> delta(n), cd(n);
  for (int trial = 0; trial < samples; ++trial) {
    FootData foot;
    const std::size_t j = pick(rng);
    foot.seed_s = curve.s[j];
    foot.seed_u = offset(rng);
    // u > 0 runs along -normal; see extract_eta for the orientation choice.
    foot.p = HalfPlane::geodesic_point(curve.pos[j], -curve.normal[j], foot.seed_u);

    std::size_t i0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = surface.dist(foot.p, curve.pos[i]);
      cd[i] = std::cosh(delta[i]);
      if (delta[i] < delta[i0]) i0 = i;
    }
    const double lo = curve.s[i0 == 0 ? 0 : i0 - 1];
    const double hi = curve.s[std::min(i0 + 1, n - 1)];
    foot.foot_s = golden_foot(curve, foot.p, lo, hi);
    foot.dist = dist_on_curve(curve, foot.p, foot.foot_s);

    // Any other discrete local minimum must sit measurably above the global
    // one, otherwise nearest-point projection is ambiguous in the strip.
    foot.unique = true;
    const double cosh_foot = std::cosh(foot.dist);
    const double floor_gap = 1e-6 * std::max(1.0, cosh_foot);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i] > delta[i - 1] || delta[i] > delta[i + 1]) continue;
      if (std::abs(curve.s[i] - foot.foot_s) <= 3.0 * curve.step) continue;
      if (cd[i] - cosh_foot <= floor_gap) {
        foot.unique = false;
        foot.rival_s = curve.s[i];
        break;
      }
    }

    // Interior second differences of cosh(delta); the two outermost intervals
    // may be partial steps, so they are skipped.
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i + 3 < n; ++i) {
      const double second =
          (cd[i - 1] - 2.0 * cd[i] + cd[i + 1]) / (curve.step * curve.step);
      margin = std::min(margin, second - std::exp(-delta[i]));
    }
    foot.convexity_margin = margin;

    const bool sample_ok = foot.unique && margin > -1e-3;
    if (!sample_ok) {
      report.ok = false;
      ++report.violations;
    }
    report.min_margin = std::min(report.min_margin, margin);
    report.feet.push_back(foot);
  }
  return report;
}

namespace {

// Conformal factor of the foliation chart.  For each query the scalar Jacobi
// equation eta'' = eta is integrated from u = 0 with eta = 1 and slope equal
// to a centered difference of the turning angle at the foot parameter.
class FoliationEta final : public ScalarField2D {
 public:
  FoliationEta(TurningCurve curve, Interval u_range, double step)
      : curve_(std::move(curve)), u_range_(u_range), step_(step) {}

  double partial(int a, int b, double x, double u) const override {
    if (a < 0 || b < 0) throw std::out_of_range("negative derivative order");
    if (a > 0) throw std::out_of_range("x-partials of the extracted factor are not provided");
    if (b > 2) throw std::out_of_range("u-order exceeds 2");
    if (u < u_range_.lo || u > u_range_.hi)
      throw std::out_of_range("u outside the declared window");
    const double k = slope_at(x);
    double eta = 1.0, etau = k;
    integrate(u, eta, etau);
    if (b == 0) return eta;
    if (b == 1) return etau;
    return eta;  // eta_uu = eta along every leaf line
  }

  int max_order() const override { return 2; }

 private:
  // Centered difference of the turning angle; legal only with the whole
  // stencil inside a declared-smooth piece of the curve range.
  double slope_at(double x) const {
    const double h = fd_width_;
    const bool inside = [&] {
      if (x - h < curve_.s.front() || x + h > curve_.s.back()) return false;
      for (const auto& piece : curve_.smooth)
        if (piece.lo <= x - h && x + h <= piece.hi) return true;
      return false;
    }();
    if (!inside) throw NonSmoothPoint(x);
    return (curve_.H->deriv(0, x + h) - curve_.H->deriv(0, x - h)) / (2.0 * h);
  }

  void integrate(double u, double& eta, double& etau) const {
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(u) / step_)));
    const double dt = u / nsteps;
    for (int i = 0; i < nsteps; ++i) {
      // RK4 on (eta, eta')' = (eta', eta).
      const double k1e = etau, k1d = eta;
      const double k2e = etau + 0.5 * dt * k1d, k2d = eta + 0.5 * dt * k1e;
      const double k3e = etau + 0.5 * dt * k2d, k3d = eta + 0.5 * dt * k2e;
      const double k4e = etau + dt * k3d, k4d = eta + dt * k3e;
      const double ne = eta + (dt / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
      const double nd = etau + (dt / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      eta = ne;
      etau = nd;
    }
  }

  TurningCurve curve_;
  Interval u_range_;
  double step_;
  double fd_width_ = 1e-4;
};

}  // namespace

Field2 extract_eta(const HalfPlane& surface, const TurningCurve& curve,
                   Interval u_range, double step) {
  (void)surface;
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (!u_range.bounded() || !(u_range.lo <= 0.0 && 0.0 <= u_range.hi))
    throw std::invalid_argument("u_range must be bounded and contain 0");
  if (curve.s.size() < 4) throw std::invalid_argument("curve has too few samples");
  return std::make_shared<FoliationEta>(curve, u_range, step);
}

}  // namespace conullity
