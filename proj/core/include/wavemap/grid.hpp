#pragma once

#include <span>
#include <utility>
#include <vector>

namespace wavemap {

/// Cell-centered uniform radial grid, r_j = (j + 1/2) dr, j = 0..J-1.
/// No node sits on the axis; J * dr == r_max.
class RadialGrid {
 public:
  RadialGrid(double dr, double r_max);

  double dr() const noexcept { return dr_; }
  double r_max() const noexcept { return r_max_; }
  int size() const noexcept { return size_; }
  double r(int j) const noexcept { return (j + 0.5) * dr_; }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid& other) const noexcept {
    return size_ == other.size_ && dr_ == other.dr_;
  }

  static constexpr int kMinNodes = 4;

 private:
  double dr_;
  double r_max_;
  int size_;
};

RadialGrid build_grid(double dr, double r_max);

/// Midpoint rule for  int_0^{r_max} r^w f(r) dr.  Requires w > -1.
double weighted_integral(const RadialGrid& grid, std::span<const double> f, double w);

/// f_rr + f_r / r for a field with `components` interleaved components per
/// node. Even reflection across the axis; quadratic extrapolation ghost at
/// the outer edge.
std::vector<double> radial_laplacian(const RadialGrid& grid, std::span<const double> f,
                                     int components = 1);

enum class Parity { Even, Odd };

/// Centered first derivative with a parity ghost at the axis.
std::vector<double> radial_derivative(const RadialGrid& grid, std::span<const double> f,
                                      int components = 1, Parity parity = Parity::Even);

/// (f_u, f_v) = ((f_t - f_r)/2, (f_t + f_r)/2), pointwise.
std::pair<std::vector<double>, std::vector<double>> null_derivatives(
    std::span<const double> f_t, std::span<const double> f_r);

}  // namespace wavemap
