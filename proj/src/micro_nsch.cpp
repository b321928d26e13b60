#include "porehom/micro_nsch.hpp"

#include <cmath>
#include <stdexcept>

namespace porehom {

void MicroParams::validate() const {
  if (!(lambda_eps > 0.0)) throw std::invalid_argument("lambda_eps must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (dt * source.c2 > 0.5) throw std::invalid_argument("dt * c2 must not exceed 0.5 (explicit source)");
  const double fprime = std::max(1.0, 3.0 * phi_cap * phi_cap - 1.0);
  if (s0 < 0.5 * fprime) throw std::invalid_argument("s0 must be at least max|f'|/2 on |phi| <= phi_cap");
}

long MicroParams::num_steps() const { return std::lround(t_end / dt); }

FlowCoefficients micro_coefficients(double lambda_eps) {
  FlowCoefficients c;
  c.transport = true;
  c.transport_scale = 1.0;
  c.korteweg = lambda_eps;
  c.phase_energy = lambda_eps;
  c.force = std::sqrt(lambda_eps);
  return c;
}

MicroSolver::MicroSolver(const PerforatedDomain& domain, MicroParams params) : params_(std::move(params)) {
  params_.validate();
  if (params_.viscosity.dim() != domain.grid.dim())
    throw std::invalid_argument("viscosity model dimension does not match the domain");
  params_.phi0.prepare(domain.grid.dim());
  auto mesh = std::make_shared<StaggeredMesh>(domain.grid, domain.m);
  FlowOptions opts{params_.dt, params_.s0, params_.solver};
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  stepper_ = std::make_unique<FlowStepper>(mesh, params_.viscosity, id, id, micro_coefficients(params_.lambda_eps),
                                           params_.source, params_.force, opts);
  state_ = stepper_->initial_state(params_.u0, std::sqrt(params_.lambda_eps), params_.phi0);
  if (params_.phase_correctors) apply_correctors(domain);
  trace_.records.push_back(stepper_->energy(state_));
}

void MicroSolver::apply_correctors(const PerforatedDomain& domain) {
  const auto& set = *params_.phase_correctors;
  const auto& cm = *set.mesh;
  const int dim = domain.grid.dim();
  const int ny = domain.cell.n_y;
  if (cm.grid().n() != ny || cm.grid().mask() != domain.cell.grid.mask() ||
      set.chi2.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("phase correctors do not belong to the domain cell");
  const auto& mesh = *stepper_->mesh_ptr();
  Vector phi = state_.phi.values;
  for (std::size_t d = 0; d < mesh.num_pore(); ++d) {
    CellCoord c = domain.grid.coord(mesh.dof_cell(d));
    for (int a = 0; a < dim; ++a) c[a] %= ny;
    const long yd = cm.cell_dof(cm.grid().index(c));
    const Point g = params_.phi0.gradient(mesh.cell_center(d));
    double corr = 0.0;
    for (int a = 0; a < dim; ++a) corr += set.chi2[static_cast<std::size_t>(a)].values(yd) * g[a];
    phi(static_cast<long>(d)) += domain.eps * corr;
  }
  stepper_->reset_phase(state_, std::move(phi));
}

void MicroSolver::step() { stepper_->step(state_, trace_); }

void MicroSolver::run(const std::function<void(const MicroState&)>& observer) {
  const long n = params_.num_steps();
  while (state_.step < n) {
    step();
    if (observer) observer(state_);
  }
}

}  // namespace porehom
