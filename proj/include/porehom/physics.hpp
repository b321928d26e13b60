#pragma once

#include "porehom/fields.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace porehom {

/// Double-well potential F(s) = (s^2 - 1)^2 / 4 and f = F'.
inline double double_well(double s) { return 0.25 * (s * s - 1.0) * (s * s - 1.0); }
inline double double_well_slope(double s) { return s * s * s - s; }

/// Monotone source G with G(0) = 0 and c1 <= G' <= c2.
struct SourceModel {
  enum class Kind { linear, tanh };
  Kind kind = Kind::linear;
  double c1 = 1.0;
  double c2 = 1.0;

  /// G(s) = c s.
  static SourceModel linear(double c);
  /// G(s) = c1 s + (c2 - c1) tanh(s): G' runs from c2 at s = 0 down to c1 as |s| grows.
  static SourceModel tanh_blend(double c1, double c2);

  double operator()(double s) const;
  double slope(double s) const;
  std::string describe() const;
};

/// Macroscopic body force g(t, x).
struct ForceModel {
  enum class Kind { zero, uniform, sinusoidal };
  Kind kind = Kind::zero;
  Eigen::Vector3d amplitude = Eigen::Vector3d::Zero();

  /// g_a(x) = A_a sin(2 pi x_{a+1}) (divergence free).
  Point operator()(double t, const Point& x) const;
  bool is_zero() const { return kind == Kind::zero || amplitude.isZero(0.0); }
  std::string describe() const;
};

struct VelocityInit {
  enum class Kind { zero, vortex };
  Kind kind = Kind::zero;
  double amplitude = 0.0;

  /// Vortex: A (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y)), zero on the box walls.
  Point operator()(const Point& x) const;
  std::string describe() const;
};

struct PhaseInit {
  enum class Kind { uniform, random_fourier };
  Kind kind = Kind::uniform;
  double mean = 0.0;
  double amplitude = 0.0;
  int modes = 3;
  std::uint64_t seed = 0;

  /// Builds the cosine coefficients; must be called after changing the seed or modes.
  void prepare(int dim);
  /// mean + amplitude * sum a_k prod cos(k_a pi x_a) with sum |a_k| = 1.
  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  std::string describe() const;

 private:
  int dim_ = 2;
  std::vector<std::array<int, 3>> waves_;
  std::vector<double> coeffs_;
};

/// L2-orthogonal projection onto discretely divergence-free face fields.
VectorField project_divergence_free(const VectorField& u, const SolverOptions& opts = {});

}  // namespace porehom
