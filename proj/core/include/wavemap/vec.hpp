#pragma once

// Small dense helpers for ambient vectors stored in flat, node-major arrays.

#include <cmath>
#include <cstddef>
#include <span>

namespace wavemap::vec {

using Span = std::span<double>;
using CSpan = std::span<const double>;

inline double dot(CSpan a, CSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(CSpan a) { return dot(a, a); }
inline double norm(CSpan a) { return std::sqrt(norm2(a)); }

// y += alpha * x
inline void axpy(double alpha, CSpan x, Span y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, Span x) {
  for (double& v : x) v *= alpha;
}

inline double max_abs(CSpan a) {
  double m = 0.0;
  for (double v : a) m = std::fmax(m, std::fabs(v));
  return m;
}

}  // namespace wavemap::vec
