#include "porehom/physics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace porehom {

namespace {
constexpr double pi = std::numbers::pi;
}

SourceModel SourceModel::linear(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("linear source slope must be positive");
  return {Kind::linear, c, c};
}

SourceModel SourceModel::tanh_blend(double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 >= c1)) throw std::invalid_argument("source bounds need 0 < c1 <= c2");
  return {Kind::tanh, c1, c2};
}

double SourceModel::operator()(double s) const {
  if (kind == Kind::linear) return c1 * s;
  return c1 * s + (c2 - c1) * std::tanh(s);
}

double SourceModel::slope(double s) const {
  if (kind == Kind::linear) return c1;
  const double c = std::cosh(s);
  return c1 + (c2 - c1) / (c * c);
}

std::string SourceModel::describe() const {
  std::ostringstream os;
  if (kind == Kind::linear)
    os << "G(s) = " << c1 << " s";
  else
    os << "G(s) = " << c1 << " s + " << (c2 - c1) << " tanh(s)";
  return os.str();
}

Point ForceModel::operator()(double, const Point& x) const {
  Point g{0.0, 0.0, 0.0};
  switch (kind) {
    case Kind::zero: break;
    case Kind::uniform:
      for (int a = 0; a < 3; ++a) g[a] = amplitude(a);
      break;
    case Kind::sinusoidal:
      // Component a varies only along the next axis, so the field is solenoidal.
      g[0] = amplitude(0) * std::sin(2 * pi * x[1]);
      g[1] = amplitude(1) * std::sin(2 * pi * x[0]);
      g[2] = amplitude(2) * std::sin(2 * pi * x[0]);
      break;
  }
  return g;
}

std::string ForceModel::describe() const {
  std::ostringstream os;
  const char* names[] = {"zero", "uniform", "sinusoidal"};
  os << names[static_cast<int>(kind)] << " (" << amplitude.transpose() << ")";
  return os.str();
}

Point VelocityInit::operator()(const Point& x) const {
  if (kind == Kind::zero) return {0.0, 0.0, 0.0};
  const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]);
  return {amplitude * sx * sx * std::sin(2 * pi * x[1]), -amplitude * std::sin(2 * pi * x[0]) * sy * sy, 0.0};
}

std::string VelocityInit::describe() const {
  std::ostringstream os;
  os << (kind == Kind::zero ? "zero" : "vortex") << " amplitude " << amplitude;
  return os.str();
}

void PhaseInit::prepare(int dim) {
  dim_ = dim;
  waves_.clear();
  coeffs_.clear();
  if (kind != Kind::random_fourier) return;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int kz = dim == 3 ? modes : 0;
  for (int k2 = 0; k2 <= kz; ++k2)
    for (int k1 = 0; k1 <= modes; ++k1)
      for (int k0 = 0; k0 <= modes; ++k0) {
        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
        waves_.push_back({k0, k1, k2});
        coeffs_.push_back(dist(rng));
      }
  double total = 0.0;
  for (double c : coeffs_) total += std::abs(c);
  if (total > 0.0)
    for (double& c : coeffs_) c /= total;
}

double PhaseInit::operator()(const Point& x) const {
  if (kind == Kind::uniform) return mean;
  double v = 0.0;
  for (std::size_t k = 0; k < waves_.size(); ++k) {
    double term = coeffs_[k];
    for (int a = 0; a < dim_; ++a) term *= std::cos(waves_[k][a] * pi * x[a]);
    v += term;
  }
  return mean + amplitude * v;
}

Point PhaseInit::gradient(const Point& x) const {
  Point g{0.0, 0.0, 0.0};
  if (kind == Kind::uniform) return g;
  for (std::size_t k = 0; k < waves_.size(); ++k)
    for (int b = 0; b < dim_; ++b) {
      double term = amplitude * coeffs_[k];
      for (int a = 0; a < dim_; ++a) {
        const double arg = waves_[k][a] * pi * x[a];
        term *= a == b ? -waves_[k][a] * pi * std::sin(arg) : std::cos(arg);
      }
      g[b] += term;
    }
  return g;
}

std::string PhaseInit::describe() const {
  std::ostringstream os;
  if (kind == Kind::uniform)
    os << "uniform " << mean;
  else
    os << "random_fourier mean " << mean << " amplitude " << amplitude << " modes " << modes << " seed " << seed;
  return os.str();
}

VectorField project_divergence_free(const VectorField& u, const SolverOptions& opts) {
  const auto& mesh = *u.mesh;
  NeumannSolver solver;
  solver.compute(-mesh.laplacian(), opts);
  const Vector q = solver.solve(mesh.div() * u.values, 1e-9, 2.0 * u.values.cwiseAbs().sum() / mesh.h());
  VectorField out(u.mesh, u.values + mesh.grad() * q);
  out.t = u.t;
  return out;
}

}  // namespace porehom
