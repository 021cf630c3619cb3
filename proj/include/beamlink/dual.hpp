#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <type_traits>

#include <Eigen/Core>

namespace beamlink {

/// Forward-mode differentiation scalar: a value plus N seed derivatives.
/// Nesting the type (Dual<Dual<double, N>, N>) propagates exact second
/// derivatives, which is how element tangents and the shape-function
/// linearization are evaluated.
template <typename T, int N>
struct Dual {
  T value{};
  std::array<T, N> deriv{};

  Dual() = default;
  Dual(const T& v) : value(v) {}

  template <typename U = T>
    requires(!std::same_as<U, double>)
  Dual(double v) : value(v) {}

  static Dual seeded(const T& v, int direction) {
    Dual out(v);
    out.deriv[direction] = T(1.0);
    return out;
  }

  Dual operator-() const {
    Dual out(-value);
    for (int i = 0; i < N; ++i) out.deriv[i] = -deriv[i];
    return out;
  }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    for (int i = 0; i < N; ++i) deriv[i] += o.deriv[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    for (int i = 0; i < N; ++i) deriv[i] -= o.deriv[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) deriv[i] = deriv[i] * o.value + value * o.deriv[i];
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.value;
    value *= inv;
    for (int i = 0; i < N; ++i) deriv[i] = (deriv[i] - value * o.deriv[i]) * inv;
    return *this;
  }
};

// Plain double at the bottom of any nesting.
inline double value_of(double x) { return x; }
template <typename T, int N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.value);
}

template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <typename T, int N>
Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) {
  return a *= b;
}
template <typename T, int N>
Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) {
  return a /= b;
}

template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, double b) {
  a.value += T(b);
  return a;
}
template <typename T, int N>
Dual<T, N> operator+(double a, Dual<T, N> b) {
  b.value += T(a);
  return b;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, double b) {
  a.value -= T(b);
  return a;
}
template <typename T, int N>
Dual<T, N> operator-(double a, const Dual<T, N>& b) {
  return (-b) + a;
}
template <typename T, int N>
Dual<T, N> operator*(Dual<T, N> a, double b) {
  a.value *= T(b);
  for (int i = 0; i < N; ++i) a.deriv[i] *= T(b);
  return a;
}
template <typename T, int N>
Dual<T, N> operator*(double a, Dual<T, N> b) {
  return b * a;
}
template <typename T, int N>
Dual<T, N> operator/(Dual<T, N> a, double b) {
  return a * (1.0 / b);
}
template <typename T, int N>
Dual<T, N> operator/(double a, const Dual<T, N>& b) {
  return Dual<T, N>(T(a)) / b;
}

template <typename T, int N>
bool operator==(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) == value_of(b);
}
template <typename T, int N>
bool operator!=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) != value_of(b);
}
template <typename T, int N>
bool operator<(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) < value_of(b);
}
template <typename T, int N>
bool operator>(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) > value_of(b);
}
template <typename T, int N>
bool operator<=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) <= value_of(b);
}
template <typename T, int N>
bool operator>=(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) >= value_of(b);
}
template <typename T, int N>
bool operator<(const Dual<T, N>& a, double b) {
  return value_of(a) < b;
}
template <typename T, int N>
bool operator>(const Dual<T, N>& a, double b) {
  return value_of(a) > b;
}

/// Chain rule helper: given f(x) and f'(x) at x.value, build f(x).
template <typename T, int N>
Dual<T, N> chain(const Dual<T, N>& x, const T& f, const T& dfdx) {
  Dual<T, N> out(f);
  for (int i = 0; i < N; ++i) out.deriv[i] = dfdx * x.deriv[i];
  return out;
}

using std::atan;
using std::atan2;
using std::cos;
using std::sin;
using std::sqrt;
using std::tan;

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& x) {
  const T s = sqrt(x.value);
  return chain(x, s, T(0.5) / s);
}
template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& x) {
  return chain(x, sin(x.value), cos(x.value));
}
template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& x) {
  return chain(x, cos(x.value), -sin(x.value));
}
template <typename T, int N>
Dual<T, N> tan(const Dual<T, N>& x) {
  const T t = tan(x.value);
  return chain(x, t, T(1.0) + t * t);
}
template <typename T, int N>
Dual<T, N> atan(const Dual<T, N>& x) {
  return chain(x, atan(x.value), T(1.0) / (T(1.0) + x.value * x.value));
}
template <typename T, int N>
Dual<T, N> atan2(const Dual<T, N>& y, const Dual<T, N>& x) {
  Dual<T, N> out(atan2(y.value, x.value));
  const T inv_r2 = T(1.0) / (x.value * x.value + y.value * y.value);
  for (int i = 0; i < N; ++i)
    out.deriv[i] = (x.value * y.deriv[i] - y.value * x.deriv[i]) * inv_r2;
  return out;
}
template <typename T, int N>
Dual<T, N> abs(const Dual<T, N>& x) {
  return value_of(x) < 0.0 ? -x : x;
}

}  // namespace beamlink

namespace Eigen {

template <typename T, int N>
struct NumTraits<beamlink::Dual<T, N>> : NumTraits<double> {
  using Real = beamlink::Dual<T, N>;
  using NonInteger = Real;
  using Literal = double;
  using Nested = Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1 + N,
    AddCost = 1 + N,
    MulCost = 2 * (1 + N)
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(NumTraits<double>::dummy_precision()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <typename T, int N, typename BinOp>
struct ScalarBinaryOpTraits<beamlink::Dual<T, N>, double, BinOp> {
  using ReturnType = beamlink::Dual<T, N>;
};
template <typename T, int N, typename BinOp>
struct ScalarBinaryOpTraits<double, beamlink::Dual<T, N>, BinOp> {
  using ReturnType = beamlink::Dual<T, N>;
};

}  // namespace Eigen
