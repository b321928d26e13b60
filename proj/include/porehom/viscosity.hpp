#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>

namespace porehom {

/// Number of independent components of a symmetric dim x dim matrix.
constexpr int sym_size(int dim) { return dim * (dim + 1) / 2; }

/// Shear pairs in Mandel order: (0,1) in 2D; (0,1), (0,2), (1,2) in 3D.
std::array<std::array<int, 2>, 3> shear_pairs();

/// Mandel coordinates (X11, X22[, X33], sqrt2 X12[, sqrt2 X13, sqrt2 X23]).
/// The Mandel basis is orthonormal for the Frobenius product, so
/// A X : Y = mandel(Y)^T K mandel(X).
Eigen::VectorXd to_mandel(const Eigen::Matrix3d& sym, int dim);
Eigen::Matrix3d from_mandel(const Eigen::VectorXd& v, int dim);

/// Voigt stiffness layout C_IJ = A_ijkl from a Mandel matrix.
Eigen::MatrixXd mandel_to_voigt(const Eigen::MatrixXd& mandel, int dim);

/// Rank-4 viscosity tensor A(t, y) on symmetric matrices, y in the unit cell.
class ViscosityModel {
 public:
  using Evaluator = std::function<Eigen::MatrixXd(double t, const std::array<double, 3>& y)>;

  ViscosityModel() = default;
  ViscosityModel(int dim, Evaluator eval, double kappa1, double kappa2, bool time_dependent,
                 bool spatially_uniform, std::string description);

  /// A = 2 nu (symmetric identity).
  static ViscosityModel isotropic(int dim, double nu);
  /// Spatially and temporally constant tensor given in Mandel form.
  static ViscosityModel constant(int dim, const Eigen::MatrixXd& mandel);
  /// 2 nu(t, y) I with nu = nu0 (1 + amp prod_a cos(2 pi y_a)) (1 + rate t).
  static ViscosityModel oscillating(int dim, double nu0, double amp, double rate);

  int dim() const { return dim_; }
  Eigen::MatrixXd mandel(double t, const std::array<double, 3>& y) const { return eval_(t, y); }
  double kappa1() const { return kappa1_; }
  double kappa2() const { return kappa2_; }
  bool time_dependent() const { return time_dependent_; }
  bool spatially_uniform() const { return spatially_uniform_; }
  const std::string& description() const { return description_; }

  /// A X : Y for symmetric X, Y.
  double contract(double t, const std::array<double, 3>& y, const Eigen::Matrix3d& x,
                  const Eigen::Matrix3d& yy) const;

 private:
  int dim_ = 2;
  Evaluator eval_;
  double kappa1_ = 0.0;
  double kappa2_ = 0.0;
  bool time_dependent_ = false;
  bool spatially_uniform_ = true;
  std::string description_;
};

}  // namespace porehom
