#pragma once

#include "porehom/cell_problems.hpp"
#include "porehom/flow.hpp"

#include <functional>
#include <memory>

namespace porehom {

/// Effective tensors as a function of time; called at each step start when
/// the tensors are flagged time dependent, once otherwise.
using TensorProvider = std::function<EffectiveTensors(double t)>;

struct MacroParams {
  double lambda = 1.0;  // 0 selects the Stokes–Cahn–Hilliard branch
  EffectiveTensors tensors;
  TensorProvider provider;  // optional; overrides `tensors` when set
  SourceModel source = SourceModel::linear(1.0);
  ForceModel force;
  double dt = 1e-3;
  double t_end = 0.1;
  double s0 = 2.0;
  double phi_cap = 1.0;
  VelocityInit u0;
  PhaseInit phi0;
  SolverOptions solver;
  int n = 64;  // cells per side of the unperforated box
  int dim = 2;

  void validate() const;
  long num_steps() const;
};

using MacroState = FlowState;

/// sqrt(lambda) transport, omitted entirely when lambda = 0.
FlowCoefficients macro_coefficients(double lambda);

class MacroSolver {
 public:
  explicit MacroSolver(MacroParams params);

  const MacroState& state() const { return state_; }
  MacroState& state() { return state_; }
  const EnergyTrace& trace() const { return trace_; }
  FlowStepper& stepper() { return *stepper_; }
  const MacroParams& params() const { return params_; }
  const MeshPtr& mesh() const { return stepper_->mesh_ptr(); }
  bool has_transport() const { return stepper_->coefficients().transport; }

  void step();
  void run(const std::function<void(const MacroState&)>& observer = {});

 private:
  void refresh_tensors(double t);

  MacroParams params_;
  std::unique_ptr<FlowStepper> stepper_;
  MacroState state_;
  EnergyTrace trace_;
};

/// Walled unperforated box with n cells per side.
MeshPtr box_mesh(int dim, int n);

/// Bilinear (trilinear) interpolation of a cell-centered scalar on a box mesh,
/// clamped to the outermost cell centers.
double sample_cell_field(const StaggeredMesh& box, const Vector& values, const Point& x);

}  // namespace porehom
