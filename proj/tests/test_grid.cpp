#include <cmath>

#include "doctest.h"
#include "wavemap/error.hpp"
#include "wavemap/grid.hpp"

using namespace wavemap;

TEST_SUITE("grid") {

TEST_CASE("half-offset nodes") {
  const RadialGrid g(0.5, 2.0);
  CHECK(g.nodes() == std::vector<double>{0.25, 0.75, 1.25, 1.75});
  CHECK(build_grid(std::ldexp(1.0, -8), 16.0).size() == 4096);
  try {
    RadialGrid(0.5, 2.1);
    FAIL("expected BadResolution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadResolution);
  }
}

TEST_CASE("weighted midpoint integral") {
  const RadialGrid g(1.0 / 512, 1.0);
  std::vector<double> f(g.size());
  for (int j = 0; j < g.size(); ++j) f[j] = g.r(j);
  CHECK(weighted_integral(g, f, -0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  std::vector<double> zero(g.size(), 0.0);
  CHECK(weighted_integral(g, zero, -0.7) == 0.0);
  const RadialGrid g3(0.25, 3.0);
  std::vector<double> one(g3.size(), 1.0);
  CHECK(weighted_integral(g3, one, 0.0) == 3.0);
  try {
    weighted_integral(g, f, -1.0);
    FAIL("expected NonIntegrableWeight");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegrableWeight);
  }
}

TEST_CASE("radial laplacian") {
  const RadialGrid g(1.0 / 256, 2.0);
  std::vector<double> r2(g.size()), r4(g.size()), c(g.size(), 3.0);
  for (int j = 0; j < g.size(); ++j) {
    r2[j] = g.r(j) * g.r(j);
    r4[j] = r2[j] * r2[j];
  }
  const auto l2 = radial_laplacian(g, r2);
  const auto l4 = radial_laplacian(g, r4);
  const auto lc = radial_laplacian(g, c);
  double e2 = 0.0, e4 = 0.0;
  // the outer ghost is quadratic, so r^4 is checked away from the last node
  for (int j = 0; j < g.size(); ++j) {
    e2 = std::max(e2, std::fabs(l2[j] - 4.0));
    if (j + 1 < g.size()) e4 = std::max(e4, std::fabs(l4[j] - 16.0 * r2[j]));
    CHECK(lc[j] == 0.0);
  }
  CHECK(e2 < 1e-9);
  CHECK(e4 < 1e-3);

  // second order: the error in r^4 drops by about four on refinement
  const RadialGrid h(1.0 / 512, 2.0);
  std::vector<double> s4(h.size());
  for (int j = 0; j < h.size(); ++j) s4[j] = std::pow(h.r(j), 4);
  const auto m4 = radial_laplacian(h, s4);
  double f4 = 0.0;
  for (int j = 0; j + 1 < h.size(); ++j) f4 = std::max(f4, std::fabs(m4[j] - 16.0 * h.r(j) * h.r(j)));
  CHECK(e4 / f4 > 3.5);
}

TEST_CASE("radial derivative parity") {
  const RadialGrid g(1.0 / 128, 1.0);
  std::vector<double> even(g.size()), odd(g.size());
  for (int j = 0; j < g.size(); ++j) {
    even[j] = std::cos(g.r(j));
    odd[j] = std::sin(g.r(j));
  }
  const auto de = radial_derivative(g, even, 1, Parity::Even);
  const auto dO = radial_derivative(g, odd, 1, Parity::Odd);
  for (int j = 0; j + 1 < g.size(); ++j) {
    CHECK(std::fabs(de[j] + std::sin(g.r(j))) < 1e-4);
    CHECK(std::fabs(dO[j] - std::cos(g.r(j))) < 1e-4);
  }
}

TEST_CASE("null derivatives") {
  const auto [fu, fv] = null_derivatives(std::vector<double>{3.0}, std::vector<double>{1.0});
  CHECK(fu[0] == 1.0);
  CHECK(fv[0] == 2.0);
  const auto [gu, gv] = null_derivatives(std::vector<double>{2.5}, std::vector<double>{2.5});
  CHECK(gu[0] == 0.0);
  const auto [hu, hv] = null_derivatives(std::vector<double>{0.0}, std::vector<double>{1.5});
  CHECK(hu[0] == -hv[0]);
}

}
