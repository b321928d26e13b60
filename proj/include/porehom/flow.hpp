#pragma once

#include "porehom/fields.hpp"
#include "porehom/physics.hpp"
#include "porehom/viscosity.hpp"

#include <string>
#include <vector>

namespace porehom {

/// Unknowns of a phase-field flow on a staggered mesh.
struct FlowState {
  VectorField u;
  ScalarField p, phi, mu;
  double t = 0.0;
  long step = 0;
};

struct EnergyRecord {
  double t = 0.0;
  double total = 0.0;
  double kinetic = 0.0;
  double free = 0.0;
  double phi_mean = 0.0;
  double u_l2 = 0.0;
  double diss_residual = 0.0;
  double div_residual = 0.0;
  double convection_work = 0.0;  // dt * transport * <C(u)u, u>
};

struct EnergyTrace {
  std::vector<EnergyRecord> records;

  static const char* csv_header();
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// Scalings that distinguish the micro system from the homogenized one.
struct FlowCoefficients {
  bool transport = true;      // convection and advection present at all
  double transport_scale = 1.0;
  double korteweg = 1.0;      // multiplies phi C grad(mu)
  double phase_energy = 1.0;  // multiplies the gradient and potential energies
  double force = 1.0;         // multiplies g
};

struct FlowOptions {
  double dt = 1e-3;
  double s0 = 2.0;
  SolverOptions solver;
};

/// First-order IMEX stepper: convex-split Cahn–Hilliard, then a viscous
/// predictor with explicit skew convection and Korteweg force, then projection.
///
/// The phase operators are L_B = div(B grad) and L_C = div(C grad); with
/// B = C = I they are the plain Neumann Laplacian.
class FlowStepper {
 public:
  FlowStepper(MeshPtr mesh, ViscosityModel viscosity, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c,
              FlowCoefficients coeffs, SourceModel source, ForceModel force, FlowOptions opts);

  /// Replaces the constitutive data; refactors the affected solvers.
  void set_tensors(ViscosityModel viscosity, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c);

  FlowState initial_state(const VelocityInit& u0, double velocity_scale, const PhaseInit& phi0) const;
  /// Replaces phi and recomputes the matching chemical potential.
  void reset_phase(FlowState& s, Vector phi) const;

  /// Cahn–Hilliard update; returns (phi^{n+1}, mu^{n+1}).
  std::pair<ScalarField, ScalarField> ch_substep(const FlowState& s) const;
  /// Momentum predictor and projection; returns (u^{n+1}, p^{n+1}). `convection_work`
  /// receives dt * <C(u^n)u^n, u^n>.
  std::pair<VectorField, ScalarField> ns_substep(const FlowState& s, const ScalarField& phi, const ScalarField& mu,
                                                 double* convection_work = nullptr);
  /// Advances one step and appends to the trace.
  void step(FlowState& s, EnergyTrace& trace);

  EnergyRecord energy(const FlowState& s) const;
  /// (T^{n+1} - T^n)/dt + viscous + mobility dissipation + source term - force work.
  double dissipation_residual(const FlowState& before, const FlowState& after, double energy_before,
                              double energy_after) const;

  const StaggeredMesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const FlowOptions& options() const { return opts_; }
  const FlowCoefficients& coefficients() const { return coeffs_; }
  const ViscosityModel& viscosity() const { return viscosity_; }
  /// Counts floating-point work spent on transport terms (zero when disabled).
  long transport_evaluations() const { return transport_evals_; }

 private:
  void build_phase_operators();
  void build_viscous(double t);
  Vector sample_force(double t) const;
  Vector korteweg(const Vector& phi, const Vector& mu) const;

  MeshPtr mesh_;
  ViscosityModel viscosity_;
  Eigen::Matrix3d b_, c_;
  FlowCoefficients coeffs_;
  SourceModel source_;
  ForceModel force_;
  FlowOptions opts_;

  bool isotropic_phase_ = true;
  SparseMatrix lap_b_, lap_c_, face_c_;
  SparseMatrix visc_k_;
  double visc_time_ = -1.0;
  LinearSolver ch_solver_, visc_solver_;
  NeumannSolver pressure_solver_;
  long transport_evals_ = 0;
};

}  // namespace porehom
