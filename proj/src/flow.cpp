#include "porehom/flow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace porehom {

const char* EnergyTrace::csv_header() { return "t,T,T_K,T_F,phi_mean,u_l2,diss_residual,div_residual"; }

std::string EnergyTrace::to_csv() const {
  std::string out = std::string(csv_header()) + "\n";
  char line[512];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.total, r.kinetic,
                  r.free, r.phi_mean, r.u_l2, r.diss_residual, r.div_residual);
    out += line;
  }
  return out;
}

void EnergyTrace::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << to_csv();
}

FlowStepper::FlowStepper(MeshPtr mesh, ViscosityModel viscosity, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c,
                         FlowCoefficients coeffs, SourceModel source, ForceModel force, FlowOptions opts)
    : mesh_(std::move(mesh)),
      viscosity_(std::move(viscosity)),
      b_(b),
      c_(c),
      coeffs_(coeffs),
      source_(source),
      force_(force),
      opts_(opts) {
  if (!(opts_.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  build_phase_operators();
  build_viscous(0.0);
  pressure_solver_.compute(-mesh_->laplacian(), opts_.solver);
}

void FlowStepper::set_tensors(ViscosityModel viscosity, const Eigen::Matrix3d& b, const Eigen::Matrix3d& c) {
  viscosity_ = std::move(viscosity);
  const bool phase_changed = !b.isApprox(b_, 0.0) || !c.isApprox(c_, 0.0);
  b_ = b;
  c_ = c;
  if (phase_changed) build_phase_operators();
  visc_time_ = -1.0;
  build_viscous(0.0);
}

void FlowStepper::build_phase_operators() {
  const int d = mesh_->dim();
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  isotropic_phase_ = b_.topLeftCorner(d, d).isApprox(id.topLeftCorner(d, d), 0.0) &&
                     c_.topLeftCorner(d, d).isApprox(id.topLeftCorner(d, d), 0.0);
  const long n = static_cast<long>(mesh_->num_pore());
  SparseMatrix eye(n, n);
  eye.setIdentity();
  const double dt = opts_.dt;
  if (isotropic_phase_) {
    lap_b_ = mesh_->laplacian();
    lap_c_ = lap_b_;
    SparseMatrix m = eye + dt * (lap_c_ * lap_b_) - (dt * opts_.s0) * lap_c_;
    m = 0.5 * (m + SparseMatrix(m.transpose()));
    ch_solver_.compute(m, true, opts_.solver);
    face_c_.resize(0, 0);
  } else {
    lap_b_ = anisotropic_laplacian(*mesh_, b_);
    lap_c_ = anisotropic_laplacian(*mesh_, c_);
    face_c_ = face_tensor(*mesh_, c_);
    SparseMatrix m = eye + dt * (lap_c_ * lap_b_) - (dt * opts_.s0) * lap_c_;
    // With B = C the operator is a polynomial in one symmetric matrix.
    const bool same = (b_ - c_).norm() <= 1e-12 * b_.norm();
    if (same) m = 0.5 * (m + SparseMatrix(m.transpose()));
    ch_solver_.compute(m, same, opts_.solver);
  }
}

void FlowStepper::build_viscous(double t) {
  if (visc_time_ >= 0.0 && !viscosity_.time_dependent()) return;
  visc_k_ = viscous_stiffness(*mesh_, viscosity_, t);
  const long n = visc_k_.rows();
  SparseMatrix eye(n, n);
  eye.setIdentity();
  visc_solver_.compute(SparseMatrix(eye / opts_.dt + visc_k_), true, opts_.solver);
  visc_time_ = t;
}

Vector FlowStepper::sample_force(double t) const {
  Vector g = Vector::Zero(static_cast<long>(mesh_->num_faces()));
  if (force_.is_zero()) return g;
  for (std::size_t i = 0; i < mesh_->num_faces(); ++i)
    g(static_cast<long>(i)) = force_(t, mesh_->face_center(i))[mesh_->face(i).axis];
  return g;
}

Vector FlowStepper::korteweg(const Vector& phi, const Vector& mu) const {
  Vector k = mesh_->grad() * mu;
  if (!isotropic_phase_) k = face_c_ * k;
  for (std::size_t i = 0; i < mesh_->num_faces(); ++i) {
    const auto& f = mesh_->face(i);
    std::size_t nb;
    mesh_->grid().neighbor(f.cell, f.axis, 1, nb);
    k(static_cast<long>(i)) *= 0.5 * (phi(mesh_->cell_dof(f.cell)) + phi(mesh_->cell_dof(nb)));
  }
  return k;
}

FlowState FlowStepper::initial_state(const VelocityInit& u0, double velocity_scale, const PhaseInit& phi0) const {
  FlowState s;
  s.u = VectorField(mesh_);
  if (u0.kind != VelocityInit::Kind::zero) {
    s.u = sample_vector(mesh_, [&](const Point& x) {
      Point v = u0(x);
      for (double& c : v) c *= velocity_scale;
      return v;
    });
    s.u = project_divergence_free(s.u, opts_.solver);
  }
  s.phi = sample_scalar(mesh_, [&](const Point& x) { return phi0(x); }, ScalarRole::phase);
  Vector f = s.phi.values.unaryExpr([](double v) { return double_well_slope(v); });
  s.mu = ScalarField(mesh_, Vector(-(lap_b_ * s.phi.values) + f), ScalarRole::chemical_potential);
  s.p = ScalarField(mesh_, ScalarRole::pressure);
  return s;
}

void FlowStepper::reset_phase(FlowState& s, Vector phi) const {
  if (phi.size() != static_cast<long>(mesh_->num_pore())) throw std::invalid_argument("phase field size mismatch");
  const Vector f = phi.unaryExpr([](double v) { return double_well_slope(v); });
  s.mu.values = -(lap_b_ * phi) + f;
  s.phi.values = std::move(phi);
}

std::pair<ScalarField, ScalarField> FlowStepper::ch_substep(const FlowState& s) const {
  const double dt = opts_.dt;
  const Vector& phi = s.phi.values;
  const Vector f = phi.unaryExpr([](double v) { return double_well_slope(v); });
  const Vector g = phi.unaryExpr([this](double v) { return source_(v); });
  Vector rhs = phi + dt * (lap_c_ * (f - opts_.s0 * phi)) - dt * g;
  if (coeffs_.transport) rhs -= (dt * coeffs_.transport_scale) * upwind_advection(*mesh_, s.u.values, phi);
  Vector next = ch_solver_.solve(rhs);
  if (!next.allFinite()) throw SolverError("Cahn-Hilliard update produced non-finite values");
  // L_C has zero column sums, so the exact update keeps mean(next) = mean(rhs);
  // restore it against solver round-off.
  next.array() += rhs.mean() - next.mean();
  Vector mu = -(lap_b_ * next) + f + opts_.s0 * (next - phi);
  ScalarField phi_out(mesh_, next, ScalarRole::phase), mu_out(mesh_, std::move(mu), ScalarRole::chemical_potential);
  phi_out.t = mu_out.t = s.t + dt;
  return {std::move(phi_out), std::move(mu_out)};
}

std::pair<VectorField, ScalarField> FlowStepper::ns_substep(const FlowState& s, const ScalarField& phi,
                                                            const ScalarField& mu, double* convection_work) {
  const double dt = opts_.dt;
  build_viscous(s.t + dt);
  Vector rhs = s.u.values / dt - coeffs_.korteweg * korteweg(phi.values, mu.values);
  if (coeffs_.force != 0.0 && !force_.is_zero()) rhs += coeffs_.force * sample_force(s.t);
  double work = 0.0;
  if (coeffs_.transport) {
    Vector c = Vector::Zero(rhs.size());
    add_convect_skew(*mesh_, s.u.values, s.u.values, coeffs_.transport_scale, c);
    ++transport_evals_;
    work = dt * mesh_->dot_faces(c, s.u.values);
    rhs -= c;
  }
  if (convection_work) *convection_work = work;
  const Vector star = visc_solver_.solve(rhs);
  const double flux_scale = 2.0 * star.cwiseAbs().sum() / (mesh_->h() * dt);
  Vector p = pressure_solver_.solve(-(mesh_->div() * star) / dt, 1e-9, flux_scale);
  Vector u = star - dt * (mesh_->grad() * p);
  if (!u.allFinite()) throw SolverError("momentum update produced non-finite values");
  VectorField u_out(mesh_, std::move(u));
  ScalarField p_out(mesh_, std::move(p), ScalarRole::pressure);
  u_out.t = p_out.t = s.t + dt;
  return {std::move(u_out), std::move(p_out)};
}

EnergyRecord FlowStepper::energy(const FlowState& s) const {
  EnergyRecord r;
  r.t = s.t;
  const double vol = mesh_->cell_volume();
  const double u2 = mesh_->dot_faces(s.u.values, s.u.values);
  r.kinetic = 0.5 * u2;
  const double grad_part = -0.5 * s.phi.values.dot(lap_b_ * s.phi.values) * vol;
  double potential = 0.0;
  for (long i = 0; i < s.phi.values.size(); ++i) potential += double_well(s.phi.values(i));
  r.free = coeffs_.phase_energy * (grad_part + potential * vol);
  r.total = r.kinetic + r.free;
  r.phi_mean = s.phi.mean();
  r.u_l2 = std::sqrt(u2);
  r.div_residual = s.u.values.size() ? (mesh_->div() * s.u.values).cwiseAbs().maxCoeff() : 0.0;
  return r;
}

double FlowStepper::dissipation_residual(const FlowState& before, const FlowState& after, double energy_before,
                                         double energy_after) const {
  const double dt = opts_.dt;
  const double vol = mesh_->cell_volume();
  const double viscous = after.u.values.dot(visc_k_ * after.u.values) * vol;
  const Vector gmu = mesh_->grad() * after.mu.values;
  const double mobility = (isotropic_phase_ ? gmu.dot(gmu) : gmu.dot(face_c_ * gmu)) * vol;
  const Vector g = before.phi.values.unaryExpr([this](double v) { return source_(v); });
  const double source = after.mu.values.dot(g) * vol;
  double work = 0.0;
  if (coeffs_.force != 0.0 && !force_.is_zero())
    work = coeffs_.force * mesh_->dot_faces(sample_force(before.t), after.u.values);
  return (energy_after - energy_before) / dt + viscous + coeffs_.phase_energy * (mobility + source) - work;
}

void FlowStepper::step(FlowState& s, EnergyTrace& trace) {
  if (trace.records.empty()) trace.records.push_back(energy(s));
  const FlowState before = s;
  auto [phi, mu] = ch_substep(s);
  double work = 0.0;
  auto [u, p] = ns_substep(s, phi, mu, &work);
  s.phi = std::move(phi);
  s.mu = std::move(mu);
  s.u = std::move(u);
  s.p = std::move(p);
  s.t += opts_.dt;
  ++s.step;
  EnergyRecord r = energy(s);
  r.convection_work = work;
  r.diss_residual = dissipation_residual(before, s, trace.records.back().total, r.total);
  trace.records.push_back(r);
}

}  // namespace porehom
