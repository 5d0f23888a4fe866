#pragma once

// Truncated Taylor jets for forward-mode differentiation of closed-form
// expressions. Jet<double, N> carries value and N derivatives in one variable;
// Jet<Jet<double, M>, N> nests to give mixed partials in two. All elementary
// operations use the classical series recurrences, so results are exact to
// round-off (no truncation beyond order N).

#include <array>
#include <cmath>

namespace conullity {

template <class T, int N>
struct Jet {
  // c[k] = f^{(k)} / k!
  std::array<T, N + 1> c{};

  Jet() = default;
  Jet(const T& v) { c[0] = v; }  // NOLINT: implicit promotion of constants

  static Jet variable(const T& x0) {
    Jet j;
    j.c[0] = x0;
    j.c[1] = T(1.0);
    return j;
  }

  Jet operator-() const {
    Jet r;
    for (int k = 0; k <= N; ++k) r.c[k] = -c[k];
    return r;
  }
};

inline double jet_value(double x) { return x; }
template <class T, int N>
double jet_value(const Jet<T, N>& j) {
  return jet_value(j.c[0]);
}

template <class T, int N>
Jet<T, N> operator+(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

template <class T, int N>
Jet<T, N> operator-(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

template <class T, int N>
Jet<T, N> operator*(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (int k = 0; k <= N; ++k) {
    T acc = a.c[0] * b.c[k];
    for (int i = 1; i <= k; ++i) acc = acc + a.c[i] * b.c[k - i];
    r.c[k] = acc;
  }
  return r;
}

template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  r.c[0] = a.c[0] / b.c[0];
  for (int k = 1; k <= N; ++k) {
    T acc = a.c[k];
    for (int j = 1; j <= k; ++j) acc = acc - b.c[j] * r.c[k - j];
    r.c[k] = acc / b.c[0];
  }
  return r;
}

// Mixed scalar forms: literals stay double all the way down the nesting.
template <class T, int N>
Jet<T, N> operator+(const Jet<T, N>& a, double s) {
  Jet<T, N> r = a;
  r.c[0] = r.c[0] + s;
  return r;
}
template <class T, int N>
Jet<T, N> operator+(double s, const Jet<T, N>& a) {
  return a + s;
}
template <class T, int N>
Jet<T, N> operator-(const Jet<T, N>& a, double s) {
  Jet<T, N> r = a;
  r.c[0] = r.c[0] - s;
  return r;
}
template <class T, int N>
Jet<T, N> operator-(double s, const Jet<T, N>& a) {
  return (-a) + s;
}
template <class T, int N>
Jet<T, N> operator*(const Jet<T, N>& a, double s) {
  Jet<T, N> r;
  for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] * s;
  return r;
}
template <class T, int N>
Jet<T, N> operator*(double s, const Jet<T, N>& a) {
  return a * s;
}
template <class T, int N>
Jet<T, N> operator/(const Jet<T, N>& a, double s) {
  return a * (1.0 / s);
}
template <class T, int N>
Jet<T, N> operator/(double s, const Jet<T, N>& a) {
  return Jet<T, N>(T(s)) / a;
}

template <class T, int N>
Jet<T, N> exp(const Jet<T, N>& f) {
  using std::exp;
  Jet<T, N> g;
  g.c[0] = exp(f.c[0]);
  for (int k = 1; k <= N; ++k) {
    T acc = f.c[1] * g.c[k - 1];
    for (int j = 2; j <= k; ++j) acc = acc + (f.c[j] * double(j)) * g.c[k - j];
    g.c[k] = acc * (1.0 / k);
  }
  return g;
}

template <class T, int N>
Jet<T, N> log(const Jet<T, N>& f) {
  using std::log;
  Jet<T, N> g;
  g.c[0] = log(f.c[0]);
  for (int k = 1; k <= N; ++k) {
    T acc = f.c[k] * double(k);
    for (int j = 1; j < k; ++j) acc = acc - (g.c[j] * double(j)) * f.c[k - j];
    g.c[k] = acc * (1.0 / k) / f.c[0];
  }
  return g;
}

namespace detail {

// sin and cos advance together; flip = -1 gives the circular pair,
// flip = +1 the hyperbolic one.
template <class T, int N>
void sin_cos_pair(const Jet<T, N>& f, Jet<T, N>& s, Jet<T, N>& c, const T& s0, const T& c0,
                  double flip) {
  s.c[0] = s0;
  c.c[0] = c0;
  for (int k = 1; k <= N; ++k) {
    T sa = f.c[1] * c.c[k - 1];
    T ca = f.c[1] * s.c[k - 1];
    for (int j = 2; j <= k; ++j) {
      sa = sa + (f.c[j] * double(j)) * c.c[k - j];
      ca = ca + (f.c[j] * double(j)) * s.c[k - j];
    }
    s.c[k] = sa * (1.0 / k);
    c.c[k] = ca * (flip / k);
  }
}

}  // namespace detail

template <class T, int N>
Jet<T, N> sin(const Jet<T, N>& f) {
  using std::cos;
  using std::sin;
  Jet<T, N> s, c;
  detail::sin_cos_pair(f, s, c, sin(f.c[0]), cos(f.c[0]), -1.0);
  return s;
}

template <class T, int N>
Jet<T, N> cos(const Jet<T, N>& f) {
  using std::cos;
  using std::sin;
  Jet<T, N> s, c;
  detail::sin_cos_pair(f, s, c, sin(f.c[0]), cos(f.c[0]), -1.0);
  return c;
}

template <class T, int N>
Jet<T, N> sinh(const Jet<T, N>& f) {
  using std::cosh;
  using std::sinh;
  Jet<T, N> s, c;
  detail::sin_cos_pair(f, s, c, sinh(f.c[0]), cosh(f.c[0]), +1.0);
  return s;
}

template <class T, int N>
Jet<T, N> cosh(const Jet<T, N>& f) {
  using std::cosh;
  using std::sinh;
  Jet<T, N> s, c;
  detail::sin_cos_pair(f, s, c, sinh(f.c[0]), cosh(f.c[0]), +1.0);
  return c;
}

template <class T, int N>
Jet<T, N> pow(const Jet<T, N>& f, long long n) {
  Jet<T, N> r(T(1.0));
  Jet<T, N> base = f;
  bool invert = n < 0;
  unsigned long long m = invert ? -(unsigned long long)n : (unsigned long long)n;
  while (m != 0) {
    if (m & 1ull) r = r * base;
    base = base * base;
    m >>= 1;
  }
  if (invert) r = Jet<T, N>(T(1.0)) / r;
  return r;
}

// Real exponent; requires a positive base value.
template <class T, int N>
Jet<T, N> pow(const Jet<T, N>& f, double p) {
  double ip;
  if (std::modf(p, &ip) == 0.0 && std::abs(ip) < 64.0) return pow(f, (long long)ip);
  return exp(log(f) * p);
}

}  // namespace conullity
