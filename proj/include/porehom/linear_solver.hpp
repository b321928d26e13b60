#pragma once

#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <string>

namespace porehom {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverKind { direct, iterative };

struct SolverOptions {
  SolverKind kind = SolverKind::direct;
  double tol = 1e-10;  // relative residual for the iterative path
  int max_iter = 20000;
};

SolverKind parse_solver_kind(const std::string& name);

/// Factor-once, solve-many wrapper around Eigen's sparse solvers.
///
/// Symmetric matrices use LDL^T or preconditioned conjugate gradients;
/// general matrices use sparse LU or BiCGSTAB.
class LinearSolver {
 public:
  LinearSolver();
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  void compute(const SparseMatrix& a, bool symmetric, const SolverOptions& opts = {});
  Vector solve(const Vector& b) const;
  bool ready() const;
  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

/// Solver for singular symmetric PSD operators whose kernel is the constants
/// (pure Neumann Laplacians on a connected pore set). The kernel is removed by
/// grounding the first unknown; solutions are returned with zero mean.
class NeumannSolver {
 public:
  void compute(const SparseMatrix& psd, const SolverOptions& opts = {});
  /// Throws SolverError if sum(rhs) is not zero within `compat_tol` relative to
  /// max(sum|rhs|, scale). Callers whose right-hand side is a divergence pass the
  /// magnitude of the underlying flux as `scale`, so round-off alone never trips it.
  Vector solve(const Vector& rhs, double compat_tol = 1e-9, double scale = 0.0) const;

 private:
  LinearSolver solver_;
};

}  // namespace porehom
