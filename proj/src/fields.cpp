#include "conullity/fields.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "conullity/errors.hpp"

namespace conullity {

namespace {

double factorial_falling(double p, int m) {
  double r = 1.0;
  for (int j = 0; j < m; ++j) r *= (p - j);
  return r;
}

class ConstantField final : public ScalarField1D {
 public:
  explicit ConstantField(double c) : c_(c) {}
  double deriv(int k, double) const override { return k == 0 ? c_ : 0.0; }
  int max_order() const override { return 32; }

 private:
  double c_;
};

// Derivatives of E(s) = exp(-1/(1-s^2)) take the form
//   E^(k)(s) = P_k(s) / (1-s^2)^(2k) * E(s)
// with polynomial numerators obeying
//   P_{k+1} = P_k' (1-s^2)^2 + 4 k s (1-s^2) P_k - 2 s P_k,  P_0 = 1.
class FlatBump final : public ScalarField1D {
 public:
  static constexpr int kMaxOrder = 10;

  FlatBump(double center, double radius, double amplitude)
      : center_(center), radius_(radius), amp_(amplitude) {
    if (radius <= 0.0) throw std::invalid_argument("flat_bump: radius must be positive");
  }

  double deriv(int k, double x) const override {
    if (k < 0 || k > kMaxOrder) throw std::out_of_range("flat_bump: derivative order");
    const double s = (x - center_) / radius_;
    const double w = 1.0 - s * s;
    if (w <= 0.0) return 0.0;
    const double e = std::exp(-1.0 / w);
    // So close to the edge that exp underflowed: the true value is below
    // every denormal, and dividing 0 by an underflowed w^2k would make NaN.
    if (e == 0.0) return 0.0;
    const auto& p = numerators()[static_cast<size_t>(k)];
    double pv = 0.0;
    for (size_t i = p.size(); i-- > 0;) pv = pv * s + p[i];
    return amp_ * pv * e / (std::pow(w, 2 * k) * std::pow(radius_, k));
  }

  int max_order() const override { return kMaxOrder; }
  std::optional<Interval> support_hint() const override {
    return Interval{center_ - radius_, center_ + radius_};
  }

 private:
  using Poly = std::vector<double>;  // ascending coefficients

  static Poly mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  }
  static Poly add(Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
  }
  static Poly diff(const Poly& a) {
    if (a.size() <= 1) return {0.0};
    Poly r(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * double(i);
    return r;
  }

  static const std::vector<Poly>& numerators() {
    static const std::vector<Poly> table = [] {
      std::vector<Poly> t;
      t.push_back({1.0});
      const Poly w = {1.0, 0.0, -1.0};        // 1 - s^2
      const Poly w2 = mul(w, w);              // (1 - s^2)^2
      const Poly m2s = {0.0, -2.0};           // -2 s
      for (int k = 0; k + 1 <= kMaxOrder + 1; ++k) {
        const Poly& pk = t.back();
        Poly next = mul(diff(pk), w2);
        next = add(next, mul(Poly{0.0, 4.0 * k}, mul(w, pk)));
        next = add(next, mul(m2s, pk));
        t.push_back(next);
      }
      return t;
    }();
    return table;
  }

  double center_, radius_, amp_;
};

// amplitude * (1 - s^2)^2 inside the support: C^1 across the edge but not C^2,
// i.e. it vanishes there only to order 2.
class PolyBump final : public ScalarField1D {
 public:
  PolyBump(double center, double radius, double amplitude)
      : center_(center), radius_(radius), amp_(amplitude) {
    if (radius <= 0.0) throw std::invalid_argument("poly_bump: radius must be positive");
  }

  double deriv(int k, double x) const override {
    if (k < 0 || k > 10) throw std::out_of_range("poly_bump: derivative order");
    const double s = (x - center_) / radius_;
    if (std::abs(s) >= 1.0) return 0.0;
    // (1 - s^2)^2 = 1 - 2 s^2 + s^4 and its s-derivatives
    static const double c[5][5] = {{1.0, 0.0, -2.0, 0.0, 1.0},
                                   {0.0, -4.0, 0.0, 4.0, 0.0},
                                   {-4.0, 0.0, 12.0, 0.0, 0.0},
                                   {0.0, 24.0, 0.0, 0.0, 0.0},
                                   {24.0, 0.0, 0.0, 0.0, 0.0}};
    if (k > 4) return 0.0;
    double pv = 0.0;
    for (int i = 4; i >= 0; --i) pv = pv * s + c[k][i];
    return amp_ * pv / std::pow(radius_, k);
  }

  int max_order() const override { return 10; }
  std::optional<Interval> support_hint() const override {
    return Interval{center_ - radius_, center_ + radius_};
  }

 private:
  double center_, radius_, amp_;
};

class PowRamp final : public ScalarField1D {
 public:
  PowRamp(double x0, double scale, double power) : x0_(x0), scale_(scale), power_(power) {}

  double deriv(int k, double x) const override {
    if (k < 0 || k > 8) throw std::out_of_range("pow_ramp: derivative order");
    if (x <= x0_) return 0.0;
    return scale_ * factorial_falling(power_, k) * std::pow(x - x0_, power_ - k);
  }

  int max_order() const override { return 8; }

 private:
  double x0_, scale_, power_;
};

class RampTurn final : public ScalarField1D {
 public:
  RampTurn(double x0, double x1, double scale, double power)
      : x0_(x0), x1_(x1), scale_(scale), power_(power) {
    if (x1 <= x0) throw std::invalid_argument("ramp_turn: needs x1 > x0");
  }

  double deriv(int k, double x) const override {
    if (k < 0 || k > 8) throw std::out_of_range("ramp_turn: derivative order");
    if (x <= x0_) return 0.0;
    if (x >= x1_) {
      if (k == 0) return scale_ * std::pow(x1_ - x0_, power_ + 1.0) / (power_ + 1.0);
      return 0.0;
    }
    if (k == 0) return scale_ * std::pow(x - x0_, power_ + 1.0) / (power_ + 1.0);
    return scale_ * factorial_falling(power_, k - 1) * std::pow(x - x0_, power_ - (k - 1));
  }

  int max_order() const override { return 8; }

 private:
  double x0_, x1_, scale_, power_;
};

class ConstantEta final : public ScalarField2D {
 public:
  explicit ConstantEta(double c) : c_(c) {}
  double partial(int a, int b, double, double) const override {
    return (a == 0 && b == 0) ? c_ : 0.0;
  }
  int max_order() const override { return 32; }

 private:
  double c_;
};

class ChEta final : public ScalarField2D {
 public:
  explicit ChEta(Field1 kg) : kg_(std::move(kg)) {
    if (!kg_) throw std::invalid_argument("ch_eta: null kgamma");
  }

  double partial(int a, int b, double x, double u) const override {
    // d^b/du^b alternates between the cosh/sinh pair
    const double ch_b = (b % 2 == 0) ? std::cosh(u) : std::sinh(u);
    const double sh_b = (b % 2 == 0) ? std::sinh(u) : std::cosh(u);
    if (a == 0) return ch_b + kg_->deriv(0, x) * sh_b;
    return kg_->deriv(a, x) * sh_b;
  }

  int max_order() const override { return kg_->max_order(); }

 private:
  Field1 kg_;
};

// One RK4 column of eta(x_j, .) per x grid node; values and u-slopes stored at
// every step. In u this interpolates the stored Hermite data and falls back on
// the equation for orders >= 2; in x it differentiates a 5-column Lagrange
// interpolant, so x-partials are limited to order 2.
class OdeEtaField final : public ScalarField2D {
 public:
  OdeEtaField(Field2 scal, Field1 kg, Interval x_range, int x_cols, Interval u_range, double step)
      : scal_(std::move(scal)), kg_(std::move(kg)), x0_(x_range.lo), step_(step) {
    if (!scal_ || !kg_) throw std::invalid_argument("eta_from_scal: null input field");
    if (x_cols < 5) throw std::invalid_argument("eta_from_scal: needs at least 5 x columns");
    if (!(x_range.hi > x_range.lo) || !x_range.bounded())
      throw std::invalid_argument("eta_from_scal: x_range must be bounded");
    if (step <= 0.0) throw std::invalid_argument("eta_from_scal: step must be positive");
    if (!(u_range.lo <= 0.0 && u_range.hi >= 0.0))
      throw std::invalid_argument("eta_from_scal: u_range must contain 0");
    cols_ = x_cols;
    dx_ = (x_range.hi - x_range.lo) / (x_cols - 1);
    kmin_ = -static_cast<int>(std::ceil(-u_range.lo / step - 1e-12));
    kmax_ = static_cast<int>(std::ceil(u_range.hi / step - 1e-12));
    eta_.resize(cols_);
    etau_.resize(cols_);
    for (int j = 0; j < cols_; ++j) build_column(j);
  }

  double partial(int a, int b, double x, double u) const override {
    if (a < 0 || b < 0 || a > 2 || b > 4)
      throw std::out_of_range("eta_from_scal: partial order out of range (a <= 2, b <= 4)");
    const double pos = (x - x0_) / dx_;
    if (pos < -1e-9 || pos > cols_ - 1 + 1e-9)
      throw Error("eta_from_scal: x = " + std::to_string(x) + " outside the solved grid");
    int center = static_cast<int>(std::lround(pos));
    if (center < 2) center = 2;
    if (center > cols_ - 3) center = cols_ - 3;

    double ys[5];
    for (int m = 0; m < 5; ++m) ys[m] = column_partial(center - 2 + m, b, u);
    return lagrange5_deriv(center, ys, a, x);
  }

  int max_order() const override { return 4; }

 private:
  void build_column(int j) {
    const double x = x0_ + j * dx_;
    auto& e = eta_[j];
    auto& m = etau_[j];
    const int count = kmax_ - kmin_ + 1;
    e.assign(count, 0.0);
    m.assign(count, 0.0);
    const int i0 = -kmin_;
    e[i0] = 1.0;
    m[i0] = kg_->deriv(0, x);
    march(j, x, i0, +1, kmax_);
    march(j, x, i0, -1, -kmin_);
  }

  void march(int j, double x, int i0, int dir, int steps) {
    auto& e = eta_[j];
    auto& m = etau_[j];
    const double h = dir * step_;
    double y0 = e[i0], y1 = m[i0];
    for (int s = 0; s < steps; ++s) {
      const double u = dir * s * step_;
      double a0 = y1, b0 = accel(x, u, y0);
      double ya = y0 + 0.5 * h * a0, yb = y1 + 0.5 * h * b0;
      double a1 = yb, b1 = accel(x, u + 0.5 * h, ya);
      ya = y0 + 0.5 * h * a1;
      yb = y1 + 0.5 * h * b1;
      double a2 = yb, b2 = accel(x, u + 0.5 * h, ya);
      ya = y0 + h * a2;
      yb = y1 + h * b2;
      double a3 = yb, b3 = accel(x, u + h, ya);
      const double ynew = y0 + h / 6.0 * (a0 + 2 * a1 + 2 * a2 + a3);
      const double mnew = y1 + h / 6.0 * (b0 + 2 * b1 + 2 * b2 + b3);
      if (ynew <= 0.0) {
        const double ucross = u + h * y0 / (y0 - ynew);
        throw NonPositiveEta(x, ucross);
      }
      y0 = ynew;
      y1 = mnew;
      e[i0 + dir * (s + 1)] = y0;
      m[i0 + dir * (s + 1)] = y1;
    }
  }

  double accel(double x, double u, double eta) const {
    return -0.5 * eta * scal_->partial(0, 0, x, u);
  }

  // d^b/du^b eta(x_j, u): cubic Hermite for b = 0, 1, then the equation.
  double column_partial(int j, int b, double u) const {
    if (b >= 2) {
      const double x = x0_ + j * dx_;
      const double s = scal_->partial(0, 0, x, u);
      if (b == 2) return -0.5 * column_partial(j, 0, u) * s;
      const double su = scal_->partial(0, 1, x, u);
      if (b == 3) return -0.5 * (column_partial(j, 1, u) * s + column_partial(j, 0, u) * su);
      const double suu = scal_->partial(0, 2, x, u);
      return -0.5 * (column_partial(j, 2, u) * s + 2.0 * column_partial(j, 1, u) * su +
                     column_partial(j, 0, u) * suu);
    }
    double pos = u / step_;
    if (pos < kmin_ - 1e-9 || pos > kmax_ + 1e-9)
      throw Error("eta_from_scal: u = " + std::to_string(u) + " outside the solved range");
    int k = static_cast<int>(std::floor(pos));
    if (k < kmin_) k = kmin_;
    if (k > kmax_ - 1) k = kmax_ - 1;
    const int i = k - kmin_;
    const double t = pos - k;
    const double y0 = eta_[j][i], y1 = eta_[j][i + 1];
    const double m0 = etau_[j][i] * step_, m1 = etau_[j][i + 1] * step_;
    if (b == 0) {
      const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
      const double h10 = t * (1 - t) * (1 - t);
      const double h01 = t * t * (3 - 2 * t);
      const double h11 = t * t * (t - 1);
      return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    }
    const double d00 = 6 * t * t - 6 * t;
    const double d10 = 3 * t * t - 4 * t + 1;
    const double d01 = -6 * t * t + 6 * t;
    const double d11 = 3 * t * t - 2 * t;
    return (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / step_;
  }

  // a-th derivative at x of the degree-4 interpolant through columns
  // center-2 .. center+2.
  double lagrange5_deriv(int center, const double* ys, int a, double x) const {
    double coeff[5] = {0, 0, 0, 0, 0};  // ascending, in powers of (x - xc)
    const double xc = x0_ + center * dx_;
    for (int i = 0; i < 5; ++i) {
      const double xi = x0_ + (center - 2 + i) * dx_;
      double basis[5] = {1, 0, 0, 0, 0};
      int deg = 0;
      double denom = 1.0;
      for (int jj = 0; jj < 5; ++jj) {
        if (jj == i) continue;
        const double xj = x0_ + (center - 2 + jj) * dx_;
        denom *= (xi - xj);
        const double r = xj - xc;  // multiply basis by ((x - xc) - r)
        for (int d = deg; d >= 0; --d) {
          basis[d + 1] += basis[d];
          basis[d] *= -r;
        }
        ++deg;
      }
      const double w = ys[i] / denom;
      for (int d = 0; d < 5; ++d) coeff[d] += w * basis[d];
    }
    for (int rep = 0; rep < a; ++rep) {
      for (int d = 0; d < 4; ++d) coeff[d] = coeff[d + 1] * (d + 1);
      coeff[4] = 0.0;
    }
    const double dxv = x - xc;
    double r = 0.0;
    for (int d = 4; d >= 0; --d) r = r * dxv + coeff[d];
    return r;
  }

  Field2 scal_;
  Field1 kg_;
  double x0_, dx_ = 0.0, step_;
  int cols_ = 0, kmin_ = 0, kmax_ = 0;
  std::vector<std::vector<double>> eta_, etau_;
};

}  // namespace

Field1 constant_field(double c) { return std::make_shared<ConstantField>(c); }

Field1 flat_bump(double center, double radius, double amplitude) {
  return std::make_shared<FlatBump>(center, radius, amplitude);
}

Field1 poly_bump(double center, double radius, double amplitude) {
  return std::make_shared<PolyBump>(center, radius, amplitude);
}

Field1 pow_ramp(double x0, double scale, double power) {
  return std::make_shared<PowRamp>(x0, scale, power);
}

Field1 ramp_turn(double x0, double x1, double scale, double power) {
  return std::make_shared<RampTurn>(x0, x1, scale, power);
}

Field2 constant_eta(double c) { return std::make_shared<ConstantEta>(c); }

Field2 ch_eta(Field1 kgamma) { return std::make_shared<ChEta>(std::move(kgamma)); }

Field2 eta_from_scal(Field2 scal, Field1 kgamma, Interval x_range, int x_cols, Interval u_range,
                     double step) {
  return std::make_shared<OdeEtaField>(std::move(scal), std::move(kgamma), x_range, x_cols,
                                       u_range, step);
}

FdCheckResult fd_check(const ScalarField1D& f, const std::vector<double>& xs, double h,
                       double rtol, double atol) {
  FdCheckResult r;
  for (int k = 0; k + 1 <= f.max_order(); ++k) {
    for (double x : xs) {
      const double an = f.deriv(k + 1, x);
      const double fd = (f.deriv(k, x + h) - f.deriv(k, x - h)) / (2.0 * h);
      const double ratio = std::abs(fd - an) / (atol + rtol * std::abs(an));
      if (ratio > r.worst_ratio) {
        r.worst_ratio = ratio;
        r.worst_order = k + 1;
        r.worst_x = x;
      }
    }
  }
  r.ok = r.worst_ratio <= 1.0;
  return r;
}

FdCheckResult fd_check(const ScalarField2D& f, const std::vector<std::pair<double, double>>& pts,
                       double h, double rtol, double atol) {
  FdCheckResult r;
  auto consider = [&](double an, double fd, int order, double x, double u) {
    const double ratio = std::abs(fd - an) / (atol + rtol * std::abs(an));
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_order = order;
      r.worst_x = x;
      r.worst_u = u;
    }
  };
  for (int a = 0; a + 1 <= f.max_order(); ++a) {
    for (int b = 0; a + b + 1 <= f.max_order(); ++b) {
      for (auto [x, u] : pts) {
        // fields may support fewer x-orders than their total max_order
        try {
          consider(f.partial(a + 1, b, x, u),
                   (f.partial(a, b, x + h, u) - f.partial(a, b, x - h, u)) / (2.0 * h), a + b + 1,
                   x, u);
        } catch (const std::out_of_range&) {
        }
        try {
          consider(f.partial(a, b + 1, x, u),
                   (f.partial(a, b, x, u + h) - f.partial(a, b, x, u - h)) / (2.0 * h), a + b + 1,
                   x, u);
        } catch (const std::out_of_range&) {
        }
      }
    }
  }
  r.ok = r.worst_ratio <= 1.0;
  return r;
}

}  // namespace conullity
