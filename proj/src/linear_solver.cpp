#include "porehom/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace porehom {

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "direct") return SolverKind::direct;
  if (name == "cg" || name == "iterative") return SolverKind::iterative;
  throw std::invalid_argument("unknown solver kind '" + name + "'");
}

struct LinearSolver::Impl {
  bool symmetric = true;
  SolverOptions opts;
  SparseMatrix a;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ldlt;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu;
  std::unique_ptr<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                                           Eigen::IncompleteCholesky<double>>>
      cg;
  std::unique_ptr<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>> bicg;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::compute(const SparseMatrix& a, bool symmetric, const SolverOptions& opts) {
  impl_ = std::make_unique<Impl>();
  impl_->symmetric = symmetric;
  impl_->opts = opts;
  impl_->a = a;
  impl_->a.makeCompressed();
  if (opts.kind == SolverKind::direct) {
    if (symmetric) {
      impl_->ldlt = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>();
      impl_->ldlt->compute(impl_->a);
      if (impl_->ldlt->info() != Eigen::Success) throw SolverError("LDL^T factorization failed");
    } else {
      impl_->lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
      impl_->lu->compute(impl_->a);
      if (impl_->lu->info() != Eigen::Success) throw SolverError("sparse LU factorization failed");
    }
  } else if (symmetric) {
    impl_->cg = std::make_unique<std::remove_reference_t<decltype(*impl_->cg)>>();
    impl_->cg->setTolerance(opts.tol);
    impl_->cg->setMaxIterations(opts.max_iter);
    impl_->cg->compute(impl_->a);
    if (impl_->cg->info() != Eigen::Success) throw SolverError("CG preconditioner setup failed");
  } else {
    impl_->bicg = std::make_unique<std::remove_reference_t<decltype(*impl_->bicg)>>();
    impl_->bicg->setTolerance(opts.tol);
    impl_->bicg->setMaxIterations(opts.max_iter);
    impl_->bicg->compute(impl_->a);
    if (impl_->bicg->info() != Eigen::Success) throw SolverError("BiCGSTAB preconditioner setup failed");
  }
}

bool LinearSolver::ready() const { return impl_ && (impl_->ldlt || impl_->lu || impl_->cg || impl_->bicg); }

Vector LinearSolver::solve(const Vector& b) const {
  if (!ready()) throw SolverError("solve called before compute");
  Vector x;
  if (impl_->ldlt) {
    x = impl_->ldlt->solve(b);
    x += impl_->ldlt->solve(Vector(b - impl_->a * x));  // one step of iterative refinement
  } else if (impl_->lu) {
    x = impl_->lu->solve(b);
    x += impl_->lu->solve(Vector(b - impl_->a * x));
  } else if (impl_->cg) {
    x = impl_->cg->solve(b);
    if (impl_->cg->info() != Eigen::Success)
      throw SolverError("conjugate gradients did not converge in " + std::to_string(impl_->opts.max_iter) +
                        " iterations");
  } else {
    x = impl_->bicg->solve(b);
    if (impl_->bicg->info() != Eigen::Success) throw SolverError("BiCGSTAB did not converge");
  }
  const double bn = b.norm();
  last_residual_ = bn > 0.0 ? (impl_->a * x - b).norm() / bn : (impl_->a * x).norm();
  if (!std::isfinite(last_residual_)) throw SolverError("linear solve produced non-finite values");
  return x;
}

void NeumannSolver::compute(const SparseMatrix& psd, const SolverOptions& opts) {
  SparseMatrix grounded = psd;
  // Adding a positive entry at one diagonal position makes the operator SPD;
  // for compatible right-hand sides the grounded value comes out as zero.
  grounded.coeffRef(0, 0) += std::abs(psd.coeff(0, 0)) > 0.0 ? std::abs(psd.coeff(0, 0)) : 1.0;
  solver_.compute(grounded, true, opts);
}

Vector NeumannSolver::solve(const Vector& rhs, double compat_tol, double scale) const {
  const double total = rhs.sum();
  scale = std::max(scale, rhs.cwiseAbs().sum());
  if (std::abs(total) > compat_tol * scale && scale > 0.0)
    throw SolverError("right-hand side is incompatible with pure Neumann conditions (nonzero mean)");
  Vector b = rhs.array() - total / static_cast<double>(rhs.size());
  Vector x = solver_.solve(b);
  x.array() -= x.mean();
  return x;
}

}  // namespace porehom
