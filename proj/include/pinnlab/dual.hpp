#ifndef PINNLAB_DUAL_HPP
#define PINNLAB_DUAL_HPP

#include <array>
#include <cmath>

namespace pinnlab::ad {

// Forward-mode dual number carrying W tangent slots, one per seeded input
// direction. Arithmetic applies the chain rule exactly per elementary op.
template <int W>
struct DualT {
  double value = 0.0;
  std::array<double, W> tangent{};

  static DualT constant(double v) { return DualT{v, {}}; }
  static DualT seeded(double v, int direction) {
    DualT d{v, {}};
    d.tangent[direction] = 1.0;
    return d;
  }
};

// The unit-width dual: value plus the derivative with respect to one
// chosen input direction.
using DualScalar = DualT<1>;
// Two slots, used to obtain d/dx and d/dt of a network output in one pass.
using Dual2 = DualT<2>;

template <int W>
inline DualT<W> operator+(const DualT<W>& a, const DualT<W>& b) {
  DualT<W> r;
  r.value = a.value + b.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = a.tangent[k] + b.tangent[k];
  return r;
}

template <int W>
inline DualT<W> operator-(const DualT<W>& a, const DualT<W>& b) {
  DualT<W> r;
  r.value = a.value - b.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = a.tangent[k] - b.tangent[k];
  return r;
}

template <int W>
inline DualT<W> operator-(const DualT<W>& a) {
  DualT<W> r;
  r.value = -a.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = -a.tangent[k];
  return r;
}

template <int W>
inline DualT<W> operator*(const DualT<W>& a, const DualT<W>& b) {
  DualT<W> r;
  r.value = a.value * b.value;
  for (int k = 0; k < W; ++k)
    r.tangent[k] = a.value * b.tangent[k] + a.tangent[k] * b.value;
  return r;
}

template <int W>
inline DualT<W> operator*(double c, const DualT<W>& a) {
  DualT<W> r;
  r.value = c * a.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = c * a.tangent[k];
  return r;
}

template <int W>
inline DualT<W> operator/(const DualT<W>& a, const DualT<W>& b) {
  DualT<W> r;
  r.value = a.value / b.value;
  for (int k = 0; k < W; ++k)
    r.tangent[k] = (a.tangent[k] - r.value * b.tangent[k]) / b.value;
  return r;
}

template <int W>
inline DualT<W> tanh(const DualT<W>& a) {
  DualT<W> r;
  r.value = std::tanh(a.value);
  const double d = 1.0 - r.value * r.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = d * a.tangent[k];
  return r;
}

template <int W>
inline DualT<W> sin(const DualT<W>& a) {
  DualT<W> r;
  r.value = std::sin(a.value);
  const double d = std::cos(a.value);
  for (int k = 0; k < W; ++k) r.tangent[k] = d * a.tangent[k];
  return r;
}

template <int W>
inline DualT<W> square(const DualT<W>& a) {
  DualT<W> r;
  r.value = a.value * a.value;
  const double d = 2.0 * a.value;
  for (int k = 0; k < W; ++k) r.tangent[k] = d * a.tangent[k];
  return r;
}

}  // namespace pinnlab::ad

#endif
