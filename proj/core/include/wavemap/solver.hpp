#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavemap/grid.hpp"
#include "wavemap/manifold.hpp"

namespace wavemap {

/// The map and its velocity on every radial node at one instant.
/// phi and phi_t are node-major, ambient_dim() entries per node.
struct FieldState {
  RadialGrid grid;
  TargetManifold target;
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> phi_t;

  // Update history: the previous two projected maps and the previous
  // velocity. Filled as steps are taken; empty in saved snapshots.
  std::vector<double> phi_prev;
  std::vector<double> phi_prev2;
  std::vector<double> phi_t_prev;
  // max_j dist(phi_j, N) before the last projection.
  double preprojection_residual = 0.0;
  long step_index = 0;

  int nodes() const noexcept { return grid.size(); }
  int dim() const noexcept { return target.ambient_dim(); }
  std::span<const double> phi_at(int j) const { return {phi.data() + j * dim(), static_cast<std::size_t>(dim())}; }
  std::span<const double> phi_t_at(int j) const { return {phi_t.data() + j * dim(), static_cast<std::size_t>(dim())}; }

  double constraint_residual() const;
  double tangency_residual() const;
};

enum class DataFamily { GaussianBump, RingBump, Zero };

DataFamily parse_data_family(std::string_view name);
std::string_view to_string(DataFamily family);

struct InitialData {
  DataFamily family = DataFamily::Zero;
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;

  /// Radius beyond which the truncated profile is identically zero.
  double support_radius() const;
  /// a * exp(-(r-c)^2 / w^2), cut off at |r - c| > 6 w.
  double profile(double r) const;
};

/// Cauchy data on N. gaussian_bump: phi = base point, phi_t = a g(r) xi_1.
/// ring_bump: phi = exp_base(a g(r) xi_1), phi_t = a g(r) xi_2, so the map
/// and velocity span two directions and the pull-back frame rotates.
FieldState init_state(const InitialData& data, const RadialGrid& grid,
                      const TargetManifold& target, double t_planned);

struct SolverOptions {
  double cfl_limit = 1.0;
  double blowup_cap = 1e6;
};

/// Tangent-projected centered radial derivative of phi.
std::vector<double> spatial_derivative(const FieldState& state);

/// phi_rr + phi_r / r + 4 B(phi)(phi_u, phi_v)
std::vector<double> acceleration(const FieldState& state);

/// One leapfrog step followed by projection onto N and tangent projection
/// of the reconstructed velocity. The very first step is a Taylor step.
FieldState step(const FieldState& state, double dt, const SolverOptions& options = {});

struct Trajectory {
  std::vector<FieldState> snapshots;
  double dt = 0.0;
  long steps = 0;
  int save_every = 1;
  std::string scheme = "leapfrog+projection";
};

using Observer = std::function<void(const FieldState&)>;

/// Steps from state.t to t_end with a uniform dt <= the requested dt,
/// calling every observer on the initial state and after each step.
Trajectory evolve(const FieldState& state, double t_end, double dt,
                  std::span<const Observer> observers = {}, int save_every = 1,
                  const SolverOptions& options = {});

}  // namespace wavemap
