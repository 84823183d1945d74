// SPDX-License-Identifier: Apache-2.0
//
// Forward-mode dual number carrying a value and its gradient with respect to
// the four box parameters (cx, cy, w, h). The loss formulas are written once
// as templates and instantiated with double (values) and Jet (gradients).
#ifndef BOXLOSS_SRC_JET_HPP_
#define BOXLOSS_SRC_JET_HPP_

#include <array>
#include <cmath>
#include <type_traits>

namespace boxloss::detail {

struct Jet {
  double v = 0.0;
  std::array<double, 4> d{};

  Jet() = default;
  // NOLINTNEXTLINE(google-explicit-constructor): constants promote freely.
  Jet(double value) : v(value) {}
  Jet(double value, int variable) : v(value) { d[variable] = 1.0; }
};

inline Jet operator-(const Jet& a) {
  Jet r(-a.v);
  for (int i = 0; i < 4; ++i) r.d[i] = -a.d[i];
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v);
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r(a.v - b.v);
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v);
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  Jet r(a.v / b.v);
  for (int i = 0; i < 4; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

inline Jet operator+(const Jet& a, double b) { return a + Jet(b); }
inline Jet operator+(double a, const Jet& b) { return Jet(a) + b; }
inline Jet operator-(const Jet& a, double b) { return a - Jet(b); }
inline Jet operator-(double a, const Jet& b) { return Jet(a) - b; }
inline Jet operator*(const Jet& a, double b) {
  Jet r(a.v * b);
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] * b;
  return r;
}
inline Jet operator*(double a, const Jet& b) { return b * a; }
inline Jet operator/(const Jet& a, double b) { return a * (1.0 / b); }
inline Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

inline Jet exp(const Jet& a) {
  Jet r(std::exp(a.v));
  for (int i = 0; i < 4; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

inline Jet atan(const Jet& a) {
  Jet r(std::atan(a.v));
  const double s = 1.0 / (1.0 + a.v * a.v);
  for (int i = 0; i < 4; ++i) r.d[i] = s * a.d[i];
  return r;
}

// Requires p >= 1 so the derivative at a.v == 0 is finite.
inline Jet pow(const Jet& a, double p) {
  Jet r(std::pow(a.v, p));
  const double s = p * std::pow(a.v, p - 1.0);
  for (int i = 0; i < 4; ++i) r.d[i] = s * a.d[i];
  return r;
}

inline double value(double x) { return x; }
inline double value(const Jet& x) { return x.v; }

/// Records whether any subgradient convention was applied.
struct KinkFlag {
  bool hit = false;
};

template <typename T>
T tie_max(const T& a, const T& b, KinkFlag& kink) {
  if (value(a) > value(b)) return a;
  if (value(a) < value(b)) return b;
  kink.hit = true;
  return 0.5 * (a + b);
}

template <typename T>
T tie_min(const T& a, const T& b, KinkFlag& kink) {
  if (value(a) < value(b)) return a;
  if (value(a) > value(b)) return b;
  kink.hit = true;
  return 0.5 * (a + b);
}

template <typename T>
T abs_value(const T& a, KinkFlag& kink) {
  if (value(a) > 0.0) return a;
  if (value(a) < 0.0) return -a;
  kink.hit = true;
  return T(0.0);
}

template <typename T>
T square(const T& a) {
  return a * a;
}

template <typename T>
inline constexpr bool kIsJet = std::is_same_v<T, Jet>;

}  // namespace boxloss::detail

#endif  // BOXLOSS_SRC_JET_HPP_
