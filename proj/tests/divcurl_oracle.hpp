#pragma once
// Brute-force evaluation of the div-curl integrals from node coordinates,
// with no use of the lattice index arithmetic in the library.
#include <algorithm>
#include <cmath>
#include <vector>

#include "wavemap/divcurl.hpp"

namespace testing_support {

struct DivCurlOracle {
  const wavemap::DivCurlField& f;
  double eps() const { return 1e-9 * f.h; }

  double t(int i, int l) const { return 0.5 * (f.u(i) + f.v(l)); }
  double r(int i, int l) const { return 0.5 * (f.v(l) - f.u(i)); }

  bool in_region(double u, double v) const {
    const double tt = 0.5 * (u + v), rr = 0.5 * (v - u);
    return tt >= -eps() && tt <= f.T + eps() && rr >= -eps() && u >= -f.X - eps();
  }
  // 1 inside, 1/2 on the boundary, 0 outside.
  double membership(double u, double v) const {
    const double tt = 0.5 * (u + v), rr = 0.5 * (v - u);
    if (!in_region(u, v)) return 0.0;
    const bool edge = std::fabs(tt) < eps() || std::fabs(tt - f.T) < eps() || std::fabs(rr) < eps();
    return edge ? 0.5 : 1.0;
  }

  static double trapezoid(const std::vector<double>& y, double step) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
    return s * step;
  }

  double sup_along_v(const std::vector<double>& F) const {
    double best = 0.0;
    for (int i = 0; i <= f.nu; ++i) {
      std::vector<double> y;
      for (int l = 0; l <= f.nv; ++l)
        if (in_region(f.u(i), f.v(l))) y.push_back(F[f.node(i, l)]);
      best = std::max(best, trapezoid(y, 0.5 * f.h));
    }
    return best;
  }

  double sup_along_u(const std::vector<double>& F) const {
    double best = 0.0;
    for (int l = 0; l <= f.nv; ++l) {
      std::vector<double> y;
      for (int i = 0; i <= f.nu; ++i)
        if (in_region(f.u(i), f.v(l))) y.push_back(F[f.node(i, l)]);
      best = std::max(best, trapezoid(y, 0.5 * f.h));
    }
    return best;
  }

  double slice(const std::vector<double>& Fa, const std::vector<double>& Fb, double at) const {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= f.nu; ++i)
      for (int l = 0; l <= f.nv; ++l)
        if (in_region(f.u(i), f.v(l)) && std::fabs(t(i, l) - at) < eps())
          pts.emplace_back(r(i, l), Fa[f.node(i, l)] + Fb[f.node(i, l)]);
    std::sort(pts.begin(), pts.end());
    std::vector<double> y;
    for (const auto& p : pts) y.push_back(p.second);
    return trapezoid(y, f.h);
  }

  // Area fraction of a cell by midpoint sub-sampling.
  double cell_fraction(int i, int l) const {
    constexpr int N = 16;
    double s = 0.0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        s += membership(f.u(i) + (a + 0.5) * f.h / N, f.v(l) + (b + 0.5) * f.h / N);
    return s / (N * N);
  }

  double source(const std::vector<double>& G) const {
    double s = 0.0;
    for (int i = 0; i < f.nu; ++i)
      for (int l = 0; l < f.nv; ++l) s += cell_fraction(i, l) * std::fabs(G[f.cell(i, l)]);
    // du dv = 2 dr dt
    return 0.5 * f.h * f.h * s;
  }

  double bilinear_lhs() const {
    double s = 0.0;
    for (int i = 0; i < f.nu; ++i)
      for (int l = 0; l < f.nv; ++l) {
        const double w = cell_fraction(i, l);
        if (w == 0.0) continue;
        double acc = 0.0;
        int count = 0;
        for (int di = 0; di < 2; ++di)
          for (int dl = 0; dl < 2; ++dl) {
            if (!in_region(f.u(i + di), f.v(l + dl))) continue;
            const std::size_t n = f.node(i + di, l + dl);
            acc += f.F11[n] * f.F22[n] + f.F12[n] * f.F21[n];
            ++count;
          }
        s += w * acc / count;
      }
    return 0.5 * f.h * f.h * s;
  }

  wavemap::FluxBounds flux() const {
    wavemap::FluxBounds b;
    b.lhs1 = sup_along_v(f.F11) + sup_along_u(f.F12);
    b.rhs1 = slice(f.F11, f.F12, 0.0) + source(f.G1);
    b.lhs2 = sup_along_v(f.F21) + sup_along_u(f.F22);
    b.rhs2 = slice(f.F21, f.F22, f.T) + slice(f.F21, f.F22, 0.0) + source(f.G2);
    b.ratio1 = b.lhs1 / b.rhs1;
    b.ratio2 = b.lhs2 / b.rhs2;
    return b;
  }
};

}  // namespace testing_support
