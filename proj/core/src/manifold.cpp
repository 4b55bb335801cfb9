#include "wavemap/manifold.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "wavemap/error.hpp"

namespace wavemap {

namespace {

// Zero-initialized work vector; stays on the stack for small ambient spaces.
class Scratch {
 public:
  explicit Scratch(int n) : n_(n) {
    if (n_ > kInline) heap_.assign(n_, 0.0);
  }
  double& operator[](int i) { return data()[i]; }
  vec::Span span() { return {data(), static_cast<std::size_t>(n_)}; }

 private:
  static constexpr int kInline = 8;
  double* data() { return n_ > kInline ? heap_.data() : inline_.data(); }
  int n_;
  std::array<double, kInline> inline_{};
  std::vector<double> heap_;
};

}  // namespace


namespace {

constexpr double kTorusRadiusSq = 0.5;  // each circle factor has radius 1/sqrt(2)
const double kTorusRadius = std::sqrt(kTorusRadiusSq);
constexpr double kSingularThreshold = 1e-12;

// Torus factors occupy coordinates {0,1} and {2,3}.
constexpr int kFactorBegin[2] = {0, 2};

double factor_dot(vec::CSpan a, vec::CSpan b, int f) {
  const int i = kFactorBegin[f];
  return a[i] * b[i] + a[i + 1] * b[i + 1];
}

std::vector<double> gaussian_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace

TargetKind parse_target_kind(std::string_view name) {
  if (name == "sphere") return TargetKind::UnitSphere;
  if (name == "clifford_torus") return TargetKind::CliffordTorus;
  if (name == "flat") return TargetKind::Flat;
  throw ConfigError("target.kind", "expected one of sphere, clifford_torus, flat; got '" +
                                       std::string(name) + "'");
}

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::UnitSphere: return "sphere";
    case TargetKind::CliffordTorus: return "clifford_torus";
    case TargetKind::Flat: return "flat";
  }
  return "unknown";
}

TargetManifold TargetManifold::unit_sphere(int intrinsic_dim) {
  if (intrinsic_dim < 1) throw Error(ErrorCode::BadResolution, "sphere dimension must be >= 1");
  return TargetManifold(TargetKind::UnitSphere, intrinsic_dim + 1, intrinsic_dim);
}

TargetManifold TargetManifold::clifford_torus() {
  return TargetManifold(TargetKind::CliffordTorus, 4, 2);
}

TargetManifold TargetManifold::flat(int ambient_dim) {
  if (ambient_dim < 1) throw Error(ErrorCode::BadResolution, "flat dimension must be >= 1");
  return TargetManifold(TargetKind::Flat, ambient_dim, ambient_dim);
}

void TargetManifold::project_in_place(vec::Span p) const {
  switch (kind_) {
    case TargetKind::UnitSphere: {
      const double len = vec::norm(p);
      if (len < kSingularThreshold)
        throw Error(ErrorCode::SingularProjection, "cannot project the origin onto the sphere");
      vec::scale(1.0 / len, p);
      break;
    }
    case TargetKind::CliffordTorus: {
      for (int f = 0; f < 2; ++f) {
        const int i = kFactorBegin[f];
        const double len = std::hypot(p[i], p[i + 1]);
        if (len < kSingularThreshold)
          throw Error(ErrorCode::SingularProjection, "torus factor " + std::to_string(f) + " vanishes");
        p[i] *= kTorusRadius / len;
        p[i + 1] *= kTorusRadius / len;
      }
      break;
    }
    case TargetKind::Flat:
      break;
  }
}

std::vector<double> TargetManifold::project(vec::CSpan p) const {
  std::vector<double> out(p.begin(), p.end());
  project_in_place(out);
  return out;
}

void TargetManifold::tangent_project_in_place(vec::CSpan p, vec::Span x) const {
  switch (kind_) {
    case TargetKind::UnitSphere: {
      const double c = vec::dot(x, p) / vec::norm2(p);
      vec::axpy(-c, p, x);
      break;
    }
    case TargetKind::CliffordTorus: {
      for (int f = 0; f < 2; ++f) {
        const int i = kFactorBegin[f];
        const double c = factor_dot(x, p, f) / factor_dot(p, p, f);
        x[i] -= c * p[i];
        x[i + 1] -= c * p[i + 1];
      }
      break;
    }
    case TargetKind::Flat:
      break;
  }
}

std::vector<double> TargetManifold::tangent_project(vec::CSpan p, vec::CSpan x) const {
  require_on_manifold(p);
  std::vector<double> out(x.begin(), x.end());
  tangent_project_in_place(p, out);
  return out;
}

void TargetManifold::second_fundamental_form_ambient(vec::CSpan p, vec::CSpan x, vec::CSpan y,
                                                     double scale, vec::Span out) const {
  switch (kind_) {
    case TargetKind::UnitSphere:
      vec::axpy(-scale * vec::dot(x, y), p, out);
      break;
    case TargetKind::CliffordTorus:
      for (int f = 0; f < 2; ++f) {
        const int i = kFactorBegin[f];
        const double c = -scale * factor_dot(x, y, f) / kTorusRadiusSq;
        out[i] += c * p[i];
        out[i + 1] += c * p[i + 1];
      }
      break;
    case TargetKind::Flat:
      break;
  }
}

std::vector<double> TargetManifold::second_fundamental_form(vec::CSpan p, vec::CSpan x,
                                                            vec::CSpan y) const {
  require_on_manifold(p);
  require_tangent(p, x);
  require_tangent(p, y);
  std::vector<double> out(n_, 0.0);
  second_fundamental_form_ambient(p, x, y, 1.0, out);
  return out;
}

void TargetManifold::second_fundamental_form_derivative(vec::CSpan p, vec::CSpan w, vec::CSpan x,
                                                        vec::CSpan y, double scale,
                                                        vec::Span out) const {
  if (kind_ == TargetKind::Flat) return;
  constexpr double h = 1e-4;
  Scratch plus(n_), minus(n_);
  for (int a = 0; a < n_; ++a) {
    plus[a] = p[a] + h * w[a];
    minus[a] = p[a] - h * w[a];
  }
  second_fundamental_form_ambient(plus.span(), x, y, scale / (2.0 * h), out);
  second_fundamental_form_ambient(minus.span(), x, y, -scale / (2.0 * h), out);
}

double TargetManifold::curvature_ambient(vec::CSpan p, vec::CSpan x, vec::CSpan y, vec::CSpan z,
                                         vec::CSpan w) const {
  if (kind_ == TargetKind::Flat) return 0.0;
  Scratch bxw(n_), byz(n_), bxz(n_), byw(n_);
  second_fundamental_form_ambient(p, x, w, 1.0, bxw.span());
  second_fundamental_form_ambient(p, y, z, 1.0, byz.span());
  second_fundamental_form_ambient(p, x, z, 1.0, bxz.span());
  second_fundamental_form_ambient(p, y, w, 1.0, byw.span());
  return vec::dot(bxw.span(), byz.span()) - vec::dot(bxz.span(), byw.span());
}

double TargetManifold::curvature(vec::CSpan p, vec::CSpan x, vec::CSpan y, vec::CSpan z,
                                 vec::CSpan w) const {
  require_on_manifold(p);
  for (auto v : {x, y, z, w}) require_tangent(p, v);
  return curvature_ambient(p, x, y, z, w);
}

std::vector<double> TargetManifold::exp_map(vec::CSpan p, vec::CSpan v) const {
  std::vector<double> out(p.begin(), p.end());
  switch (kind_) {
    case TargetKind::UnitSphere: {
      const double len = vec::norm(v);
      if (len == 0.0) break;
      vec::scale(std::cos(len), out);
      vec::axpy(std::sin(len) / len, v, out);
      break;
    }
    case TargetKind::CliffordTorus: {
      for (int f = 0; f < 2; ++f) {
        const int i = kFactorBegin[f];
        const double len = std::hypot(v[i], v[i + 1]);
        if (len == 0.0) continue;
        const double angle = len / kTorusRadius;
        const double c = std::cos(angle), s = kTorusRadius * std::sin(angle) / len;
        out[i] = c * p[i] + s * v[i];
        out[i + 1] = c * p[i + 1] + s * v[i + 1];
      }
      break;
    }
    case TargetKind::Flat:
      vec::axpy(1.0, v, out);
      break;
  }
  return out;
}

double TargetManifold::constraint_residual(vec::CSpan p) const {
  switch (kind_) {
    case TargetKind::UnitSphere:
      return std::fabs(vec::norm(p) - 1.0);
    case TargetKind::CliffordTorus:
      return std::max(std::fabs(std::hypot(p[0], p[1]) - kTorusRadius),
                      std::fabs(std::hypot(p[2], p[3]) - kTorusRadius));
    case TargetKind::Flat:
      return 0.0;
  }
  return 0.0;
}

double TargetManifold::normal_residual(vec::CSpan p, vec::CSpan x) const {
  std::vector<double> t(x.begin(), x.end());
  tangent_project_in_place(p, t);
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (x[i] - t[i]) * (x[i] - t[i]);
  return std::sqrt(s);
}

std::vector<double> TargetManifold::base_point() const {
  std::vector<double> p(n_, 0.0);
  switch (kind_) {
    case TargetKind::UnitSphere: p[n_ - 1] = 1.0; break;
    case TargetKind::CliffordTorus: p[0] = kTorusRadius; p[2] = kTorusRadius; break;
    case TargetKind::Flat: break;
  }
  return p;
}

std::vector<double> TargetManifold::base_direction(int which) const {
  if (which < 0 || which >= std::min(k_, 2))
    throw Error(ErrorCode::NonTangent, "base direction " + std::to_string(which) +
                                           " not available for this target");
  std::vector<double> d(n_, 0.0);
  if (kind_ == TargetKind::CliffordTorus)
    d[which == 0 ? 1 : 3] = 1.0;
  else
    d[which] = 1.0;
  return d;
}

std::vector<double> TargetManifold::global_frame(vec::CSpan p, int i) const {
  std::vector<double> e(n_, 0.0);
  if (kind_ == TargetKind::Flat) {
    e[i] = 1.0;
  } else if (kind_ == TargetKind::CliffordTorus) {
    const int b = kFactorBegin[i];
    const double len = std::hypot(p[b], p[b + 1]);
    e[b] = -p[b + 1] / len;
    e[b + 1] = p[b] / len;
  } else {
    throw Error(ErrorCode::DegenerateFrame, "the sphere carries no global tangent frame");
  }
  return e;
}

void TargetManifold::require_on_manifold(vec::CSpan p) const {
  if (static_cast<int>(p.size()) != n_)
    throw Error(ErrorCode::OffManifold, "point has wrong ambient dimension");
  if (constraint_residual(p) > kTolerance)
    throw Error(ErrorCode::OffManifold, "point violates the manifold constraint");
}

void TargetManifold::require_tangent(vec::CSpan p, vec::CSpan x) const {
  if (normal_residual(p, x) > kTolerance * std::max(1.0, vec::norm(x)))
    throw Error(ErrorCode::NonTangent, "vector has a normal component");
}

BoundsReport TargetManifold::verify_bounds(int samples, std::uint64_t seed) const {
  BoundsReport report;
  if (has_global_frame()) report.sup_grad_frame = 0.0;
  if (kind_ == TargetKind::Flat) return report;

  std::mt19937_64 rng(seed);
  auto random_point = [&] {
    auto p = gaussian_vector(rng, n_);
    project_in_place(p);
    return p;
  };
  auto random_unit_tangent = [&](vec::CSpan p) {
    auto x = gaussian_vector(rng, n_);
    tangent_project_in_place(p, x);
    vec::scale(1.0 / vec::norm(x), x);
    return x;
  };

  constexpr double h = 1e-5;
  std::vector<double> b0(n_), bp(n_), bm(n_);
  for (int s = 0; s < samples; ++s) {
    const auto p = random_point();
    const auto x = random_unit_tangent(p);
    const auto y = random_unit_tangent(p);
    const auto w = random_unit_tangent(p);

    std::fill(b0.begin(), b0.end(), 0.0);
    second_fundamental_form_ambient(p, x, y, 1.0, b0);
    report.sup_B = std::max(report.sup_B, vec::norm(b0));

    std::fill(b0.begin(), b0.end(), 0.0);
    second_fundamental_form_ambient(p, x, x, 1.0, b0);
    report.sup_B_diagonal = std::max(report.sup_B_diagonal, vec::norm(b0));

    // Step along the geodesic through p in direction w, carrying x and y by
    // tangent projection, and difference B.
    std::vector<double> hw(w), mhw(w);
    vec::scale(h, hw);
    vec::scale(-h, mhw);
    const auto pp = exp_map(p, hw);
    const auto pm = exp_map(p, mhw);
    auto xp = x, yp = y, xm = x, ym = y;
    tangent_project_in_place(pp, xp);
    tangent_project_in_place(pp, yp);
    tangent_project_in_place(pm, xm);
    tangent_project_in_place(pm, ym);
    std::fill(bp.begin(), bp.end(), 0.0);
    std::fill(bm.begin(), bm.end(), 0.0);
    second_fundamental_form_ambient(pp, xp, yp, 1.0, bp);
    second_fundamental_form_ambient(pm, xm, ym, 1.0, bm);
    double d2 = 0.0;
    for (int i = 0; i < n_; ++i) d2 += std::pow((bp[i] - bm[i]) / (2.0 * h), 2);
    report.sup_grad_B = std::max(report.sup_grad_B, std::sqrt(d2));

    if (report.sup_grad_frame) {
      for (int i = 0; i < k_; ++i) {
        const auto ep = global_frame(pp, i);
        const auto em = global_frame(pm, i);
        std::vector<double> de(n_);
        for (int a = 0; a < n_; ++a) de[a] = (ep[a] - em[a]) / (2.0 * h);
        tangent_project_in_place(p, de);
        *report.sup_grad_frame = std::max(*report.sup_grad_frame, vec::norm(de));
      }
    }
  }
  report.sup_B = std::max(report.sup_B, report.sup_B_diagonal);
  return report;
}

}  // namespace wavemap
