#pragma once

#include "porehom/cell_problems.hpp"
#include "porehom/flow.hpp"
#include "porehom/geometry.hpp"

#include <functional>
#include <memory>

namespace porehom {

struct MicroParams {
  double lambda_eps = 1.0;
  ViscosityModel viscosity = ViscosityModel::isotropic(2, 1.0);
  SourceModel source = SourceModel::linear(1.0);
  ForceModel force;  // macroscopic g; the applied force is sqrt(lambda_eps) g
  double dt = 1e-3;
  double t_end = 0.1;
  double s0 = 2.0;
  double phi_cap = 1.0;  // expected bound on |phi| used to check s0
  VelocityInit u0;       // macroscopic u0; the initial velocity is sqrt(lambda_eps) u0
  PhaseInit phi0;
  /// When set, phi0 is corrected to phi0 + eps chi(x/eps) . grad phi0 with the
  /// scalar correctors of the cell (well-prepared data).
  std::shared_ptr<const CorrectorSet> phase_correctors;
  SolverOptions solver;

  /// Throws std::invalid_argument when a precondition of the scheme fails.
  void validate() const;
  long num_steps() const;
};

using MicroState = FlowState;

/// Microscopic phase-field flow on the perforated domain: no-slip outer walls,
/// free slip on the inclusions.
class MicroSolver {
 public:
  MicroSolver(const PerforatedDomain& domain, MicroParams params);

  const MicroState& state() const { return state_; }
  MicroState& state() { return state_; }
  const EnergyTrace& trace() const { return trace_; }
  FlowStepper& stepper() { return *stepper_; }
  const MicroParams& params() const { return params_; }
  const MeshPtr& mesh() const { return stepper_->mesh_ptr(); }

  void step();
  /// Steps until t_end; `observer` (optional) sees the state after every step.
  void run(const std::function<void(const MicroState&)>& observer = {});

 private:
  void apply_correctors(const PerforatedDomain& domain);

  MicroParams params_;
  std::unique_ptr<FlowStepper> stepper_;
  MicroState state_;
  EnergyTrace trace_;
};

/// Micro scalings: lambda_eps for the capillary terms, sqrt(lambda_eps) for the force.
FlowCoefficients micro_coefficients(double lambda_eps);

}  // namespace porehom
