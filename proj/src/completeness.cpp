#include "conullity/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "conullity/errors.hpp"

namespace conullity {

namespace {

double ortho_error(const Eigen::MatrixXd& S) {
  const int d = static_cast<int>(S.rows());
  return (S.transpose() * S - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd polar_project(const Eigen::MatrixXd& S) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::vector<double> linspace(const Interval& r, int m) {
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = r.lo + i * (r.hi - r.lo) / (m - 1);
  return out;
}

}  // namespace

const Eigen::MatrixXd& RotationPath::at(double x) const {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  size_t i = static_cast<size_t>(it - xs.begin());
  if (i == xs.size()) return S.back();
  if (i > 0 && x - xs[i - 1] < xs[i] - x) --i;
  return S[i];
}

Eigen::MatrixXd rotation_generator(const ModelSpec& spec, double x) {
  const int d = spec.n + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int j = 1; j < d; ++j) {
    const double fj = spec.f_at(j, x);
    A(j, j - 1) = fj;
    A(j - 1, j) = -fj;
  }
  return A;
}

RotationPath solve_rotation(const ModelSpec& spec, const Interval& x_range, double step) {
  if (step <= 0.0) throw std::invalid_argument("solve_rotation: step must be positive");
  if (!x_range.bounded() || x_range.lo > 0.0 || x_range.hi < 0.0)
    throw std::invalid_argument("solve_rotation: x_range must be finite and contain 0");

  const int d = spec.n + 1;
  RotationPath out;

  auto rk4 = [&](Eigen::MatrixXd& S, double x0, double x1) {
    const double dt = x1 - x0;
    const double xm = x0 + 0.5 * dt;
    const Eigen::MatrixXd K1 = S * rotation_generator(spec, x0);
    const Eigen::MatrixXd K2 = (S + 0.5 * dt * K1) * rotation_generator(spec, xm);
    const Eigen::MatrixXd K3 = (S + 0.5 * dt * K2) * rotation_generator(spec, xm);
    const Eigen::MatrixXd K4 = (S + dt * K3) * rotation_generator(spec, x1);
    S += dt / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  };

  // grid x values are fresh products k * step so that refined runs land on
  // bit-identical abscissas
  auto march = [&](double bound, std::vector<double>& xs, std::vector<Eigen::MatrixXd>& Ss) {
    const double dir = bound > 0.0 ? 1.0 : -1.0;
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(d, d);
    double x = 0.0;
    int since = 0;
    for (long long k = 1; dir * x < dir * bound; ++k) {
      double xt = dir * (static_cast<double>(k) * step);
      if (dir * xt >= dir * bound) xt = bound;
      rk4(S, x, xt);
      x = xt;
      if (++since == 100) {
        out.max_pre_projection_drift = std::max(out.max_pre_projection_drift, ortho_error(S));
        S = polar_project(S);
        since = 0;
      }
      xs.push_back(x);
      Ss.push_back(S);
    }
    if (since > 0)
      out.max_pre_projection_drift = std::max(out.max_pre_projection_drift, ortho_error(S));
  };

  std::vector<double> fx, bx;
  std::vector<Eigen::MatrixXd> fS, bS;
  march(x_range.hi, fx, fS);
  march(x_range.lo, bx, bS);

  out.xs.reserve(bx.size() + 1 + fx.size());
  out.S.reserve(bx.size() + 1 + fx.size());
  for (size_t i = bx.size(); i-- > 0;) {
    out.xs.push_back(bx[i]);
    out.S.push_back(bS[i]);
  }
  out.xs.push_back(0.0);
  out.S.push_back(Eigen::MatrixXd::Identity(d, d));
  for (size_t i = 0; i < fx.size(); ++i) {
    out.xs.push_back(fx[i]);
    out.S.push_back(fS[i]);
  }
  return out;
}

double warped_residual(const ModelSpec& spec, const RotationPath& path, const Point& p,
                       const Eigen::VectorXd& w) {
  const int n = spec.n;
  if (w.size() != n + 2) throw std::invalid_argument("warped_residual: tangent has wrong size");

  Eigen::VectorXd V(n + 1);
  V[0] = p.u;
  V.tail(n) = p.v;

  const double dx = w[0];
  const Eigen::VectorXd pre = rotation_generator(spec, p.x) * V * dx + w.tail(n + 1);
  const MetricData m = metric_at(spec, p);

  Eigen::VectorXd straight(n + 2);
  straight[0] = m.eta * dx;
  straight.tail(n + 1) = path.at(p.x) * pre;

  return std::abs(straight.dot(straight) - w.dot(m.g * w));
}

double warped_metric_check(const ModelSpec& spec, const RotationPath& path, int sample_count,
                           unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, path.xs.size() - 1);
  std::uniform_real_distribution<double> box_u(-1.2, 1.2), box_v(-2.0, 2.0), box_w(-1.0, 1.0);

  double worst = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Point p;
    p.x = path.xs[pick(rng)];
    p.u = box_u(rng);
    p.v.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) p.v[i] = box_v(rng);
    Eigen::VectorXd w(spec.n + 2);
    for (int i = 0; i < spec.n + 2; ++i) w[i] = box_w(rng);
    worst = std::max(worst, warped_residual(spec, path, p, w));
  }
  return worst;
}

double warped_metric_check(const ModelSpec& spec, const Interval& x_range, int sample_count) {
  const RotationPath path = solve_rotation(spec, x_range, 1e-3);
  return warped_metric_check(spec, path, sample_count, 0x57a8c0ffee);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CompleteByProp1: return "CompleteByProp1";
    case Verdict::CompleteByProp2: return "CompleteByProp2";
    case Verdict::CompleteByCor: return "CompleteByCor";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::IncompleteDomain: return "IncompleteDomain";
  }
  return "?";
}

std::string CertificateReport::text() const {
  std::ostringstream os;
  os << "verdict: " << to_string(verdict) << "\n";
  if (verdict == Verdict::IncompleteDomain) {
    os << "x-domain is not the whole line; grid evaluation skipped\n";
    return os.str();
  }
  os << "x window [" << grid.x_range.lo << ", " << grid.x_range.hi << "] x " << grid.x_samples
     << ", u window [" << grid.u_range.lo << ", " << grid.u_range.hi << "] x " << grid.u_samples
     << "\n";
  os << "sup Scal = " << scal_sup << ", sup |k_gamma| = " << kgamma_sup << "\n";
  os << "sup |k_gamma| / sqrt(|Scal|/2) = " << ratio_max << " at (x, u) = (" << binding_x << ", "
     << binding_u << ")\n";
  os << "epsilon = " << epsilon << "\n";
  os << "jacobi floor sqrt(1 - c^2) = " << jacobi_exact << " at c = " << jacobi_c
     << "; eps forms: sqrt(eps(2-eps)) = " << bound_eps_margin << ", sqrt(1-eps^2) = "
     << bound_eps_sq << "\n";
  return os.str();
}

CertificateReport completeness_certificate(const ModelSpec& spec, const CertificateGrid& grid) {
  if (grid.x_samples < 2 || grid.u_samples < 2)
    throw std::invalid_argument("completeness_certificate: need at least 2 samples per axis");
  if (!grid.x_range.bounded() || !grid.u_range.bounded())
    throw std::invalid_argument("completeness_certificate: grid windows must be finite");

  CertificateReport rep;
  rep.grid = grid;
  if (!spec.x_domain.is_all()) {
    rep.verdict = Verdict::IncompleteDomain;
    return rep;
  }

  const std::vector<double> xs = linspace(grid.x_range, grid.x_samples);
  const std::vector<double> us = linspace(grid.u_range, grid.u_samples);

  std::vector<double> kabs(xs.size());
  rep.scal_sup = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    kabs[i] = std::abs(spec.eta->partial(0, 1, x, 0.0));
    rep.kgamma_sup = std::max(rep.kgamma_sup, kabs[i]);
    for (double u : us) {
      const double eta = spec.eta->partial(0, 0, x, u);
      if (!(eta > 0.0)) throw DegenerateMetric(x, u, eta);
      const double scal = -2.0 * spec.eta->partial(0, 2, x, u) / eta;
      if (scal >= 0.0) throw PositiveScal(x, u, scal);
      rep.scal_sup = std::max(rep.scal_sup, scal);
      const double ratio = kabs[i] / std::sqrt(-0.5 * scal);
      if (ratio > rep.ratio_max) {
        rep.ratio_max = ratio;
        rep.binding_x = x;
        rep.binding_u = u;
      }
    }
  }

  rep.epsilon = std::max(0.0, 1.0 - rep.ratio_max);
  rep.jacobi_c = std::min(rep.ratio_max, 1.0);
  rep.jacobi_exact = std::sqrt(1.0 - rep.jacobi_c * rep.jacobi_c);
  rep.bound_eps_margin = std::sqrt(rep.epsilon * (2.0 - rep.epsilon));
  rep.bound_eps_sq = std::sqrt(1.0 - rep.epsilon * rep.epsilon);

  // The grid cannot certify a bound on k_gamma when its largest value sits on
  // the window edge and keeps growing toward it.
  auto grows_off_edge = [&]() {
    const size_t nx = kabs.size();
    if (nx < 4) return false;
    const size_t i_star = static_cast<size_t>(
        std::max_element(kabs.begin(), kabs.end()) - kabs.begin());
    const size_t m = std::max<size_t>(2, nx / 10);
    if (i_star == 0) {
      for (size_t j = 0; j < m; ++j)
        if (!(kabs[j] > kabs[j + 1])) return false;
      return true;
    }
    if (i_star == nx - 1) {
      for (size_t j = nx - 1 - m; j < nx - 1; ++j)
        if (!(kabs[j] < kabs[j + 1])) return false;
      return true;
    }
    return false;
  };

  if (rep.scal_sup <= -2.0 + 1e-12 && rep.kgamma_sup <= 1.0 + 1e-12)
    rep.verdict = Verdict::CompleteByCor;
  else if (rep.epsilon > 1e-9)
    rep.verdict = Verdict::CompleteByProp2;
  else if (rep.ratio_max <= 1.0 + 1e-12 && !grows_off_edge())
    rep.verdict = Verdict::CompleteByProp1;
  else
    rep.verdict = Verdict::Inconclusive;
  return rep;
}

double jacobi_profile_min(double lambda, double c) {
  if (lambda <= 0.0) throw std::invalid_argument("jacobi_profile_min: lambda must be positive");
  auto f = [&](double t) { return std::cosh(lambda * t) + c * std::sinh(lambda * t); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -50.0, b = 50.0;
  double t1 = b - phi * (b - a), t2 = a + phi * (b - a);
  double f1 = f(t1), f2 = f(t2);
  while (b - a > 1e-11) {
    if (f1 < f2) {
      b = t2;
      t2 = t1;
      f2 = f1;
      t1 = b - phi * (b - a);
      f1 = f(t1);
    } else {
      a = t1;
      t1 = t2;
      f1 = f2;
      t2 = a + phi * (b - a);
      f2 = f(t2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace conullity
