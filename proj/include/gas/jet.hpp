#pragma once

#include <cmath>

namespace gas {

// Second-order directional jet: value, first and second derivative along one
// input axis. Propagating a jet through the network yields exact du/dx_k and
// d2u/dx_k2 (no finite differencing). Templated on the scalar so the same
// propagation rules can be recorded on a Tape (T = Var) for test oracles.
template <typename T>
struct Jet2T {
  T v{};
  T d1{};
  T d2{};
};

using Jet2 = Jet2T<double>;

template <typename T>
Jet2T<T> operator+(const Jet2T<T>& a, const Jet2T<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
}

template <typename T>
Jet2T<T> operator-(const Jet2T<T>& a, const Jet2T<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2};
}

template <typename T>
Jet2T<T> operator-(const Jet2T<T>& a) {
  return {-a.v, -a.d1, -a.d2};
}

template <typename T>
Jet2T<T> operator*(const Jet2T<T>& a, const Jet2T<T>& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + a.d1 * b.d1 + a.d1 * b.d1 + a.v * b.d2};
}

// affine maps: scale and shift by plain scalars (no curvature contribution)
template <typename T, typename S>
Jet2T<T> operator*(const S& c, const Jet2T<T>& a) {
  return {c * a.v, c * a.d1, c * a.d2};
}

template <typename T, typename S>
Jet2T<T> operator+(const Jet2T<T>& a, const S& c) {
  return {a.v + c, a.d1, a.d2};
}

using std::exp;
using std::tanh;

template <typename T>
Jet2T<T> tanh(const Jet2T<T>& a) {
  const T t = tanh(a.v);
  const T s1 = 1.0 - t * t;         // sigma'
  const T s2 = -2.0 * (t * s1);     // sigma''
  return {t, s1 * a.d1, s2 * (a.d1 * a.d1) + s1 * a.d2};
}

template <typename T>
Jet2T<T> exp(const Jet2T<T>& a) {
  const T e = exp(a.v);
  return {e, e * a.d1, e * (a.d1 * a.d1) + e * a.d2};
}

template <typename T>
Jet2T<T> square(const Jet2T<T>& a) {
  return {a.v * a.v, 2.0 * (a.v * a.d1), 2.0 * (a.d1 * a.d1) + 2.0 * (a.v * a.d2)};
}

}  // namespace gas
