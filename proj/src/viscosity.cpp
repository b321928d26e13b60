#include "porehom/viscosity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace porehom {

std::array<std::array<int, 2>, 3> shear_pairs() { return {{{0, 1}, {0, 2}, {1, 2}}}; }

Eigen::VectorXd to_mandel(const Eigen::Matrix3d& sym, int dim) {
  Eigen::VectorXd v(sym_size(dim));
  for (int a = 0; a < dim; ++a) v(a) = sym(a, a);
  const auto pairs = shear_pairs();
  for (int s = 0; s < sym_size(dim) - dim; ++s)
    v(dim + s) = std::numbers::sqrt2 * sym(pairs[s][0], pairs[s][1]);
  return v;
}

Eigen::Matrix3d from_mandel(const Eigen::VectorXd& v, int dim) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int a = 0; a < dim; ++a) m(a, a) = v(a);
  const auto pairs = shear_pairs();
  for (int s = 0; s < sym_size(dim) - dim; ++s) {
    const double x = v(dim + s) / std::numbers::sqrt2;
    m(pairs[s][0], pairs[s][1]) = x;
    m(pairs[s][1], pairs[s][0]) = x;
  }
  return m;
}

Eigen::MatrixXd mandel_to_voigt(const Eigen::MatrixXd& mandel, int dim) {
  Eigen::MatrixXd voigt = mandel;
  for (int i = 0; i < voigt.rows(); ++i)
    for (int j = 0; j < voigt.cols(); ++j) {
      if (i >= dim) voigt(i, j) /= std::numbers::sqrt2;
      if (j >= dim) voigt(i, j) /= std::numbers::sqrt2;
    }
  return voigt;
}

ViscosityModel::ViscosityModel(int dim, Evaluator eval, double kappa1, double kappa2, bool time_dependent,
                               bool spatially_uniform, std::string description)
    : dim_(dim),
      eval_(std::move(eval)),
      kappa1_(kappa1),
      kappa2_(kappa2),
      time_dependent_(time_dependent),
      spatially_uniform_(spatially_uniform),
      description_(std::move(description)) {
  if (!(kappa1_ > 0.0)) throw std::invalid_argument("viscosity tensor must be coercive (kappa1 > 0)");
}

ViscosityModel ViscosityModel::isotropic(int dim, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity nu must be positive");
  const int n = sym_size(dim);
  Eigen::MatrixXd k = 2.0 * nu * Eigen::MatrixXd::Identity(n, n);
  return ViscosityModel(
      dim, [k](double, const std::array<double, 3>&) { return k; }, 2.0 * nu, 2.0 * nu, false, true,
      "isotropic nu=" + std::to_string(nu));
}

ViscosityModel ViscosityModel::constant(int dim, const Eigen::MatrixXd& mandel) {
  const int n = sym_size(dim);
  if (mandel.rows() != n || mandel.cols() != n) throw std::invalid_argument("Mandel matrix has wrong size");
  if ((mandel - mandel.transpose()).cwiseAbs().maxCoeff() > 1e-12 * mandel.cwiseAbs().maxCoeff())
    throw std::invalid_argument("viscosity tensor lacks major symmetry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mandel);
  const Eigen::MatrixXd k = mandel;
  return ViscosityModel(
      dim, [k](double, const std::array<double, 3>&) { return k; }, eig.eigenvalues().minCoeff(),
      eig.eigenvalues().maxCoeff(), false, true, "constant Mandel tensor");
}

ViscosityModel ViscosityModel::oscillating(int dim, double nu0, double amp, double rate) {
  if (!(nu0 > 0.0) || !(std::abs(amp) < 1.0) || rate < 0.0)
    throw std::invalid_argument("oscillating viscosity needs nu0 > 0, |amp| < 1, rate >= 0");
  const int n = sym_size(dim);
  auto eval = [=](double t, const std::array<double, 3>& y) {
    double mod = 1.0;
    for (int a = 0; a < dim; ++a) mod *= std::cos(2.0 * std::numbers::pi * y[a]);
    const double nu = nu0 * (1.0 + amp * mod) * (1.0 + rate * t);
    return Eigen::MatrixXd(2.0 * nu * Eigen::MatrixXd::Identity(n, n));
  };
  // kappa2 is reported for t = 0; it grows linearly with `rate`.
  return ViscosityModel(dim, eval, 2.0 * nu0 * (1.0 - std::abs(amp)), 2.0 * nu0 * (1.0 + std::abs(amp)),
                        rate != 0.0, amp == 0.0, "oscillating nu0=" + std::to_string(nu0));
}

double ViscosityModel::contract(double t, const std::array<double, 3>& y, const Eigen::Matrix3d& x,
                                const Eigen::Matrix3d& yy) const {
  return to_mandel(yy, dim_).dot(mandel(t, y) * to_mandel(x, dim_));
}

}  // namespace porehom
