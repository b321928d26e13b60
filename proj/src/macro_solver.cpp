#include "porehom/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace porehom {

void MacroParams::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (dt * source.c2 > 0.5) throw std::invalid_argument("dt * c2 must not exceed 0.5 (explicit source)");
  const double fprime = std::max(1.0, 3.0 * phi_cap * phi_cap - 1.0);
  if (s0 < 0.5 * fprime) throw std::invalid_argument("s0 must be at least max|f'|/2 on |phi| <= phi_cap");
  if (n < 2) throw std::invalid_argument("macro grid needs at least 2 cells per side");
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
}

long MacroParams::num_steps() const { return std::lround(t_end / dt); }

FlowCoefficients macro_coefficients(double lambda) {
  FlowCoefficients c;
  c.transport = lambda > 0.0;
  c.transport_scale = std::sqrt(lambda);
  c.korteweg = 1.0;
  c.phase_energy = 1.0;
  c.force = 1.0;
  return c;
}

MeshPtr box_mesh(int dim, int n) {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  return std::make_shared<StaggeredMesh>(VoxelGrid(dim, n, false, std::vector<std::uint8_t>(total, 1)), 1);
}

namespace {

void check_tensors(const EffectiveTensors& e, int dim) {
  const int ns = sym_size(dim);
  if (e.dim != dim || e.a_hom.rows() != ns || e.a_hom.cols() != ns || e.b_hom.rows() != dim ||
      e.c_hom.rows() != dim)
    throw std::invalid_argument("effective tensors do not match the macro dimension");
}

}  // namespace

MacroSolver::MacroSolver(MacroParams params) : params_(std::move(params)) {
  params_.validate();
  params_.phi0.prepare(params_.dim);
  if (params_.provider) params_.tensors = params_.provider(0.0);
  check_tensors(params_.tensors, params_.dim);
  FlowOptions opts{params_.dt, params_.s0, params_.solver};
  stepper_ = std::make_unique<FlowStepper>(
      box_mesh(params_.dim, params_.n), ViscosityModel::constant(params_.dim, params_.tensors.a_hom),
      params_.tensors.b3(), params_.tensors.c3(), macro_coefficients(params_.lambda), params_.source, params_.force,
      opts);
  state_ = stepper_->initial_state(params_.u0, 1.0, params_.phi0);
  trace_.records.push_back(stepper_->energy(state_));
}

void MacroSolver::refresh_tensors(double t) {
  if (!params_.provider || !params_.tensors.time_dependent) return;
  params_.tensors = params_.provider(t);
  check_tensors(params_.tensors, params_.dim);
  stepper_->set_tensors(ViscosityModel::constant(params_.dim, params_.tensors.a_hom), params_.tensors.b3(),
                        params_.tensors.c3());
}

void MacroSolver::step() {
  refresh_tensors(state_.t);
  stepper_->step(state_, trace_);
}

void MacroSolver::run(const std::function<void(const MacroState&)>& observer) {
  const long n = params_.num_steps();
  while (state_.step < n) {
    step();
    if (observer) observer(state_);
  }
}

double sample_cell_field(const StaggeredMesh& box, const Vector& values, const Point& x) {
  const int n = box.grid().n();
  const int dim = box.dim();
  std::array<int, 3> lo{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    const double s = std::clamp(x[a] * n - 0.5, 0.0, static_cast<double>(n - 1));
    lo[a] = std::min(static_cast<int>(std::floor(s)), n - 2);
    w[a] = s - lo[a];
  }
  double v = 0.0;
  const int corners = 1 << dim;
  for (int k = 0; k < corners; ++k) {
    double weight = 1.0;
    CellCoord c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const int bit = (k >> a) & 1;
      c[a] = lo[a] + bit;
      weight *= bit ? w[a] : 1.0 - w[a];
    }
    if (weight != 0.0) v += weight * values(box.cell_dof(box.grid().index(c)));
  }
  return v;
}

}  // namespace porehom
