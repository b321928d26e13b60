#pragma once

#include "porehom/fields.hpp"
#include "porehom/geometry.hpp"
#include "porehom/viscosity.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace porehom {

struct CellSolveOptions {
  SolverOptions solver;
  double tol = 1e-10;  // divergence / orthogonality target of the Stokes iteration
  int max_iter = 200;
  double penalty = 0.0;  // augmented-Lagrangian weight; 0 selects it from the operator scale
};

struct StokesCorrector {
  VectorField chi;
  ScalarField pi;
  double div_residual = 0.0;  // max |div chi|
  int iterations = 0;
};

/// Correctors of the reference cell at time t. chi1 / pi1 are indexed by the
/// Mandel basis (diagonal strains first, then shears); chi2 / chi3 by axis.
struct CorrectorSet {
  MeshPtr mesh;
  double t = 0.0;
  std::vector<ScalarField> chi2, chi3;
  std::vector<StokesCorrector> chi1;
  double scalar_residual = 0.0;
};

struct EffectiveTensors {
  int dim = 2;
  double t = 0.0;
  double porosity = 1.0;
  Eigen::MatrixXd a_hom;  // Mandel layout
  Eigen::MatrixXd b_hom, c_hom;
  Eigen::MatrixXd b_energy;  // energy form of B, kept as a cross-check
  double a_asymmetry = 0.0;  // before symmetrization
  bool time_dependent = false;

  /// Identity tensors for a given isotropic viscosity (the unperforated case).
  static EffectiveTensors identity(int dim, const Eigen::MatrixXd& a_mandel);
  Eigen::Matrix3d b3() const;
  Eigen::Matrix3d c3() const;
};

/// Periodic staggered mesh of the cell (micro coordinates = positions in Y).
MeshPtr cell_mesh(const UnitCell& cell);

/// Face field equal to 1 on open faces normal to `axis` (e_i restricted to Y_p).
Vector unit_face_field(const StaggeredMesh& mesh, int axis);
/// Extended-layout strain rows of the constant matrix M (Mandel coordinates m).
Vector constant_strain(const StaggeredMesh& mesh, const Eigen::VectorXd& m);

ScalarField solve_scalar_corrector(const MeshPtr& mesh, int axis, const SolverOptions& opts = {});
std::vector<ScalarField> solve_scalar_correctors(const MeshPtr& mesh, const SolverOptions& opts = {});

/// Corrector for the Mandel basis strain `index`, slip on the inclusion.
StokesCorrector solve_stokes_corrector(const MeshPtr& mesh, int index, const ViscosityModel& model, double t,
                                       const CellSolveOptions& opts = {});

CorrectorSet solve_correctors(const MeshPtr& mesh, const ViscosityModel& model, double t,
                              const CellSolveOptions& opts = {});

/// a(u, v) per unit pore volume with u, v given in extended strain layout.
double strain_energy(const StaggeredMesh& mesh, const SparseMatrix& weights, const Vector& su, const Vector& sv);

Eigen::MatrixXd effective_A(const CorrectorSet& c, const ViscosityModel& model, double* asymmetry = nullptr);
/// Returns (flux form, energy form) of B for the given scalar correctors.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> effective_B(const MeshPtr& mesh, const std::vector<ScalarField>& chi);

EffectiveTensors compute_effective_tensors(const UnitCell& cell, const ViscosityModel& model, double t,
                                           const CellSolveOptions& opts = {}, CorrectorSet* out = nullptr);

/// Minimum of A Xi : Xi over `samples` random unit-Frobenius symmetric Xi.
double sampled_coercivity(const Eigen::MatrixXd& a_mandel, int dim, int samples, std::uint64_t seed);
/// Largest |A Xi : Theta - A Theta : Xi| over random pairs.
double sampled_asymmetry(const Eigen::MatrixXd& a_mandel, int dim, int samples, std::uint64_t seed);

struct TensorCheck {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// B = C, B SPD with spectrum in (0, 1], flux/energy forms of B, major symmetry
/// and sampled coercivity of A.
std::vector<TensorCheck> tensor_invariants(const EffectiveTensors& e, int samples = 100, std::uint64_t seed = 0);

}  // namespace porehom
