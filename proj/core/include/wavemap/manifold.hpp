#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wavemap/vec.hpp"

namespace wavemap {

enum class TargetKind { UnitSphere, CliffordTorus, Flat };

TargetKind parse_target_kind(std::string_view name);
std::string_view to_string(TargetKind kind);

struct BoundsReport {
  double sup_B = 0.0;             // sup |B(X,Y)| / (|X||Y|)
  double sup_B_diagonal = 0.0;    // sup |B(X,X)| / |X|^2
  double sup_grad_B = 0.0;        // sup |d/ds B(X,Y)| / (|X||Y||W|) along geodesics
  std::optional<double> sup_grad_frame;  // only for parallelizable targets
};

/// Embedded target N in R^n. Pointwise geometry only; all members are pure.
///
/// Points and vectors are ambient spans of length ambient_dim(). The checked
/// entry points validate that p lies on N and that arguments are tangent,
/// the *_ambient variants evaluate the closed-form extension without checks
/// and are what the inner loops of the solver use.
class TargetManifold {
 public:
  static TargetManifold unit_sphere(int intrinsic_dim = 2);
  static TargetManifold clifford_torus();
  static TargetManifold flat(int ambient_dim);

  TargetKind kind() const noexcept { return kind_; }
  int ambient_dim() const noexcept { return n_; }
  int intrinsic_dim() const noexcept { return k_; }

  // Tolerance used by the OffManifold / NonTangent checks.
  static constexpr double kTolerance = 1e-8;

  std::vector<double> project(vec::CSpan p) const;
  void project_in_place(vec::Span p) const;

  std::vector<double> tangent_project(vec::CSpan p, vec::CSpan x) const;
  void tangent_project_in_place(vec::CSpan p, vec::Span x) const;

  std::vector<double> second_fundamental_form(vec::CSpan p, vec::CSpan x,
                                              vec::CSpan y) const;
  // out += scale * B_p(x, y), closed-form extension to arbitrary ambient x, y.
  void second_fundamental_form_ambient(vec::CSpan p, vec::CSpan x, vec::CSpan y,
                                       double scale, vec::Span out) const;
  // out += scale * (d/ds) B_{p + s w}(x, y) at s = 0, by centered differences.
  void second_fundamental_form_derivative(vec::CSpan p, vec::CSpan w,
                                          vec::CSpan x, vec::CSpan y,
                                          double scale, vec::Span out) const;

  // <R(X,Y)Z, W> via the Gauss equation.
  double curvature(vec::CSpan p, vec::CSpan x, vec::CSpan y, vec::CSpan z,
                   vec::CSpan w) const;
  double curvature_ambient(vec::CSpan p, vec::CSpan x, vec::CSpan y,
                           vec::CSpan z, vec::CSpan w) const;

  // Geodesic exponential map.
  std::vector<double> exp_map(vec::CSpan p, vec::CSpan v) const;

  // Distance from the defining constraint (0 on N).
  double constraint_residual(vec::CSpan p) const;
  // |normal part of x| at p.
  double normal_residual(vec::CSpan p, vec::CSpan x) const;

  // Canonical base point and two orthonormal tangent directions there.
  std::vector<double> base_point() const;
  std::vector<double> base_direction(int which) const;

  // Global orthonormal frame where one exists (torus, flat).
  bool has_global_frame() const noexcept { return kind_ != TargetKind::UnitSphere; }
  std::vector<double> global_frame(vec::CSpan p, int i) const;

  BoundsReport verify_bounds(int samples, std::uint64_t seed) const;

 private:
  TargetManifold(TargetKind kind, int n, int k) : kind_(kind), n_(n), k_(k) {}

  void require_on_manifold(vec::CSpan p) const;
  void require_tangent(vec::CSpan p, vec::CSpan x) const;

  TargetKind kind_;
  int n_;
  int k_;
};

}  // namespace wavemap
