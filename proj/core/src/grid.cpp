#include "wavemap/grid.hpp"

#include <cmath>
#include <sstream>

#include "wavemap/error.hpp"

namespace wavemap {

RadialGrid::RadialGrid(double dr, double r_max) : dr_(dr), r_max_(r_max), size_(0) {
  if (!(dr > 0.0) || !(r_max > 0.0) || !std::isfinite(dr) || !std::isfinite(r_max))
    throw Error(ErrorCode::BadResolution, "dr and r_max must be positive and finite");
  const double count = r_max / dr;
  const double rounded = std::round(count);
  if (std::fabs(count - rounded) > 1e-9 * std::max(1.0, count)) {
    std::ostringstream os;
    os << "r_max/dr = " << count << " is not an integer";
    throw Error(ErrorCode::BadResolution, os.str());
  }
  if (rounded < kMinNodes) {
    std::ostringstream os;
    os << "grid needs at least " << kMinNodes << " nodes, got " << rounded;
    throw Error(ErrorCode::BadResolution, os.str());
  }
  size_ = static_cast<int>(rounded);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> out(size_);
  for (int j = 0; j < size_; ++j) out[j] = r(j);
  return out;
}

RadialGrid build_grid(double dr, double r_max) { return RadialGrid(dr, r_max); }

double weighted_integral(const RadialGrid& grid, std::span<const double> f, double w) {
  if (!(w > -1.0)) {
    std::ostringstream os;
    os << "weight exponent " << w << " is not integrable at the axis";
    throw Error(ErrorCode::NonIntegrableWeight, os.str());
  }
  double sum = 0.0;
  const int J = grid.size();
  if (w == 0.0) {
    for (int j = 0; j < J; ++j) sum += f[j];
  } else if (w == 1.0) {
    for (int j = 0; j < J; ++j) sum += grid.r(j) * f[j];
  } else {
    for (int j = 0; j < J; ++j) sum += std::pow(grid.r(j), w) * f[j];
  }
  return sum * grid.dr();
}

std::vector<double> radial_laplacian(const RadialGrid& grid, std::span<const double> f,
                                     int components) {
  const int J = grid.size();
  const int c = components;
  const double dr = grid.dr();
  const double inv_dr2 = 1.0 / (dr * dr);
  std::vector<double> out(static_cast<std::size_t>(J) * c);
  for (int j = 0; j < J; ++j) {
    const double inv_2r_dr = 1.0 / (2.0 * grid.r(j) * dr);
    for (int a = 0; a < c; ++a) {
      const double mid = f[j * c + a];
      const double lo = (j == 0) ? mid : f[(j - 1) * c + a];
      const double hi = (j == J - 1)
                            ? 3.0 * mid - 3.0 * f[(j - 1) * c + a] + f[(j - 2) * c + a]
                            : f[(j + 1) * c + a];
      out[j * c + a] = (hi - 2.0 * mid + lo) * inv_dr2 + (hi - lo) * inv_2r_dr;
    }
  }
  return out;
}

std::vector<double> radial_derivative(const RadialGrid& grid, std::span<const double> f,
                                      int components, Parity parity) {
  const int J = grid.size();
  const int c = components;
  const double inv_2dr = 1.0 / (2.0 * grid.dr());
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  std::vector<double> out(static_cast<std::size_t>(J) * c);
  for (int j = 0; j < J; ++j) {
    for (int a = 0; a < c; ++a) {
      const double mid = f[j * c + a];
      const double lo = (j == 0) ? sign * mid : f[(j - 1) * c + a];
      const double hi = (j == J - 1)
                            ? 3.0 * mid - 3.0 * f[(j - 1) * c + a] + f[(j - 2) * c + a]
                            : f[(j + 1) * c + a];
      out[j * c + a] = (hi - lo) * inv_2dr;
    }
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> null_derivatives(
    std::span<const double> f_t, std::span<const double> f_r) {
  std::vector<double> fu(f_t.size()), fv(f_t.size());
  for (std::size_t i = 0; i < f_t.size(); ++i) {
    fu[i] = 0.5 * (f_t[i] - f_r[i]);
    fv[i] = 0.5 * (f_t[i] + f_r[i]);
  }
  return {std::move(fu), std::move(fv)};
}

}  // namespace wavemap
