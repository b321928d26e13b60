#include "porehom/cell_problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace porehom {

namespace {

// Rigid translations along `axis` carry no strain when every a-line is open;
// they are the only kernel of the penalized Stokes operator.
void remove_translations(const StaggeredMesh& mesh, Vector& chi) {
  for (int a = 0; a < mesh.dim(); ++a) {
    const Vector t = unit_face_field(mesh, a);
    if (t.sum() == 0.0) continue;
    if ((mesh.strain() * t).cwiseAbs().maxCoeff() > 1e-9 / mesh.h()) continue;
    const auto b = static_cast<long>(mesh.face_begin(a));
    const auto n = static_cast<long>(mesh.face_end(a) - mesh.face_begin(a));
    chi.segment(b, n).array() -= chi.segment(b, n).mean();
  }
}

Eigen::VectorXd mandel_unit(int dim, int index) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(sym_size(dim));
  m(index) = 1.0;
  return m;
}

}  // namespace

EffectiveTensors EffectiveTensors::identity(int dim, const Eigen::MatrixXd& a_mandel) {
  EffectiveTensors e;
  e.dim = dim;
  e.a_hom = a_mandel;
  e.b_hom = Eigen::MatrixXd::Identity(dim, dim);
  e.c_hom = e.b_hom;
  e.b_energy = e.b_hom;
  return e;
}

Eigen::Matrix3d EffectiveTensors::b3() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m.topLeftCorner(dim, dim) = b_hom;
  return m;
}

Eigen::Matrix3d EffectiveTensors::c3() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m.topLeftCorner(dim, dim) = c_hom;
  return m;
}

MeshPtr cell_mesh(const UnitCell& cell) { return std::make_shared<StaggeredMesh>(cell.grid, 1); }

Vector unit_face_field(const StaggeredMesh& mesh, int axis) {
  Vector e = Vector::Zero(static_cast<long>(mesh.num_faces()));
  for (std::size_t f = mesh.face_begin(axis); f < mesh.face_end(axis); ++f) e(static_cast<long>(f)) = 1.0;
  return e;
}

Vector constant_strain(const StaggeredMesh& mesh, const Eigen::VectorXd& m) {
  const int dim = mesh.dim();
  const auto np = static_cast<long>(mesh.num_pore());
  Vector s = Vector::Zero(mesh.strain().rows());
  for (int a = 0; a < dim; ++a) s.segment(a * np, np).setConstant(m(a));
  Vector edge(static_cast<long>(mesh.num_edges()));
  for (std::size_t e = 0; e < mesh.num_edges(); ++e)
    edge(static_cast<long>(e)) = m(dim + mesh.edges()[e].pair) / std::numbers::sqrt2;
  s.segment(static_cast<long>(mesh.strain_diag_rows()), edge.size()) = edge;
  s.tail(mesh.num_shear() * np) = mesh.shear_to_cells() * edge;
  return s;
}

ScalarField solve_scalar_corrector(const MeshPtr& mesh, int axis, const SolverOptions& opts) {
  NeumannSolver solver;
  solver.compute(-mesh->laplacian(), opts);
  return ScalarField(mesh, solver.solve(mesh->div() * unit_face_field(*mesh, axis)));
}

std::vector<ScalarField> solve_scalar_correctors(const MeshPtr& mesh, const SolverOptions& opts) {
  NeumannSolver solver;
  solver.compute(-mesh->laplacian(), opts);
  std::vector<ScalarField> out;
  for (int a = 0; a < mesh->dim(); ++a)
    out.emplace_back(mesh, solver.solve(mesh->div() * unit_face_field(*mesh, a)));
  return out;
}

namespace {

struct StokesSystem {
  SparseMatrix weights;
  LinearSolver solver;
  double penalty = 0.0;
};

StokesSystem build_stokes(const StaggeredMesh& mesh, const ViscosityModel& model, double t,
                          const CellSolveOptions& opts) {
  StokesSystem sys;
  sys.weights = viscous_weights(mesh, model, t);
  const SparseMatrix& s = mesh.strain();
  SparseMatrix k = SparseMatrix(s.transpose()) * sys.weights * s;
  const SparseMatrix dtd = SparseMatrix(mesh.div().transpose()) * mesh.div();
  const double k_scale = k.diagonal().mean();
  sys.penalty = opts.penalty > 0.0 ? opts.penalty : 1e3 * k_scale / dtd.diagonal().mean();
  SparseMatrix a = k + sys.penalty * dtd;
  for (long i = 0; i < a.rows(); ++i) a.coeffRef(i, i) += 1e-12 * k_scale;
  a = 0.5 * (a + SparseMatrix(a.transpose()));
  sys.solver.compute(a, true, opts.solver);
  return sys;
}

StokesCorrector run_stokes(const MeshPtr& mesh, const StokesSystem& sys, int index, const CellSolveOptions& opts) {
  const StaggeredMesh& m = *mesh;
  const Vector s_m = constant_strain(m, mandel_unit(m.dim(), index));
  const Vector f = m.strain().transpose() * (sys.weights * s_m);
  const SparseMatrix div_t = m.div().transpose();
  Vector pi = Vector::Zero(static_cast<long>(m.num_pore()));
  Vector chi;
  StokesCorrector out;
  for (int it = 1; it <= opts.max_iter; ++it) {
    chi = sys.solver.solve(-f + div_t * pi);
    const Vector d = m.div() * chi;
    pi -= sys.penalty * d;
    out.iterations = it;
    out.div_residual = d.cwiseAbs().maxCoeff();
    if (out.div_residual <= opts.tol) break;
  }
  if (out.div_residual > opts.tol)
    throw SolverError("Stokes cell corrector did not reach the divergence tolerance (residual " +
                      std::to_string(out.div_residual) + ")");
  remove_translations(m, chi);
  pi.array() -= pi.mean();
  out.chi = VectorField(mesh, chi);
  out.pi = ScalarField(mesh, pi, ScalarRole::pressure);
  return out;
}

}  // namespace

StokesCorrector solve_stokes_corrector(const MeshPtr& mesh, int index, const ViscosityModel& model, double t,
                                       const CellSolveOptions& opts) {
  const StokesSystem sys = build_stokes(*mesh, model, t, opts);
  auto out = run_stokes(mesh, sys, index, opts);
  out.chi.t = out.pi.t = t;
  return out;
}

CorrectorSet solve_correctors(const MeshPtr& mesh, const ViscosityModel& model, double t,
                              const CellSolveOptions& opts) {
  CorrectorSet set;
  set.mesh = mesh;
  set.t = t;
  set.chi2 = solve_scalar_correctors(mesh, opts.solver);
  // The second scalar family solves the same problem again on purpose: agreement
  // of the two tensors is then a real check of the solver rather than an alias.
  set.chi3 = solve_scalar_correctors(mesh, opts.solver);
  for (int a = 0; a < mesh->dim(); ++a) {
    const Vector r = mesh->laplacian() * set.chi2[a].values + mesh->div() * unit_face_field(*mesh, a);
    set.scalar_residual = std::max(set.scalar_residual, r.cwiseAbs().maxCoeff());
  }
  const StokesSystem sys = build_stokes(*mesh, model, t, opts);
  for (int i = 0; i < sym_size(mesh->dim()); ++i) {
    set.chi1.push_back(run_stokes(mesh, sys, i, opts));
    set.chi1.back().chi.t = set.chi1.back().pi.t = t;
  }
  return set;
}

double strain_energy(const StaggeredMesh& mesh, const SparseMatrix& weights, const Vector& su, const Vector& sv) {
  return su.dot(weights * sv) * mesh.cell_volume() / mesh.pore_volume();
}

Eigen::MatrixXd effective_A(const CorrectorSet& c, const ViscosityModel& model, double* asymmetry) {
  const StaggeredMesh& mesh = *c.mesh;
  const int n = sym_size(mesh.dim());
  const SparseMatrix w = viscous_weights(mesh, model, c.t);
  std::vector<Vector> total;
  for (int i = 0; i < n; ++i)
    total.push_back(constant_strain(mesh, mandel_unit(mesh.dim(), i)) + mesh.strain() * c.chi1[i].chi.values);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = strain_energy(mesh, w, total[j], total[i]);
  if (asymmetry) *asymmetry = (a - a.transpose()).cwiseAbs().maxCoeff();
  return 0.5 * (a + a.transpose());
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> effective_B(const MeshPtr& mesh, const std::vector<ScalarField>& chi) {
  const int dim = mesh->dim();
  const double scale = mesh->cell_volume() / mesh->pore_volume();
  std::vector<Vector> flux;
  for (int i = 0; i < dim; ++i) flux.push_back(unit_face_field(*mesh, i) + mesh->grad() * chi[i].values);
  Eigen::MatrixXd b_flux(dim, dim), b_energy(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const auto begin = static_cast<long>(mesh->face_begin(j));
      const auto count = static_cast<long>(mesh->face_end(j) - mesh->face_begin(j));
      b_flux(i, j) = flux[i].segment(begin, count).sum() * scale;
      b_energy(i, j) = flux[i].dot(flux[j]) * scale;
    }
  }
  return {b_flux, b_energy};
}

namespace {
// Entries at round-off level would otherwise add couplings to every macro stencil.
void drop_roundoff(Eigen::MatrixXd& m) {
  const double cut = 1e-13 * m.cwiseAbs().maxCoeff();
  m = m.unaryExpr([cut](double v) { return std::abs(v) <= cut ? 0.0 : v; });
}
}  // namespace

EffectiveTensors compute_effective_tensors(const UnitCell& cell, const ViscosityModel& model, double t,
                                           const CellSolveOptions& opts, CorrectorSet* out) {
  const MeshPtr mesh = cell_mesh(cell);
  CorrectorSet set = solve_correctors(mesh, model, t, opts);
  EffectiveTensors e;
  e.dim = cell.dim;
  e.t = t;
  e.porosity = cell.porosity;
  e.time_dependent = model.time_dependent();
  e.a_hom = effective_A(set, model, &e.a_asymmetry);
  auto [b_flux, b_energy] = effective_B(mesh, set.chi2);
  e.b_hom = b_flux;
  e.b_energy = b_energy;
  e.c_hom = effective_B(mesh, set.chi3).first;
  drop_roundoff(e.a_hom);
  drop_roundoff(e.b_hom);
  drop_roundoff(e.c_hom);
  if (out) *out = std::move(set);
  return e;
}

namespace {
Eigen::VectorXd random_unit_sym(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) x(i, j) = x(j, i) = normal(rng);
  x /= x.norm();
  return to_mandel(x, dim);
}
}  // namespace

double sampled_coercivity(const Eigen::MatrixXd& a_mandel, int dim, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_unit_sym(dim, rng);
    lo = std::min(lo, x.dot(a_mandel * x));
  }
  return lo;
}

double sampled_asymmetry(const Eigen::MatrixXd& a_mandel, int dim, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_unit_sym(dim, rng);
    const Eigen::VectorXd y = random_unit_sym(dim, rng);
    worst = std::max(worst, std::abs(y.dot(a_mandel * x) - x.dot(a_mandel * y)));
  }
  return worst;
}

std::vector<TensorCheck> tensor_invariants(const EffectiveTensors& e, int samples, std::uint64_t seed) {
  std::vector<TensorCheck> out;
  auto add = [&out](std::string name, double value, double tol, bool pass) {
    out.push_back({std::move(name), value, tol, pass});
  };
  const double bc = (e.b_hom - e.c_hom).cwiseAbs().maxCoeff();
  add("b_equals_c", bc, 1e-8, bc <= 1e-8);
  const Eigen::MatrixXd bs = 0.5 * (e.b_hom + e.b_hom.transpose());
  const double b_asym = (e.b_hom - e.b_hom.transpose()).cwiseAbs().maxCoeff();
  add("b_symmetric", b_asym, 1e-8, b_asym <= 1e-8);
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(bs).eigenvalues();
  add("b_min_eigenvalue", eig.minCoeff(), 0.0, eig.minCoeff() > 0.0);
  add("b_max_eigenvalue", eig.maxCoeff(), 1.0 + 1e-10, eig.maxCoeff() <= 1.0 + 1e-10);
  const double fe = (e.b_hom - e.b_energy).cwiseAbs().maxCoeff();
  add("b_flux_vs_energy", fe, 1e-7, fe <= 1e-7);
  const double a_asym = std::max(e.a_asymmetry, sampled_asymmetry(e.a_hom, e.dim, samples, seed));
  add("a_major_symmetry", a_asym, 1e-8, a_asym <= 1e-8);
  const double coer = sampled_coercivity(e.a_hom, e.dim, samples, seed);
  add("a_sampled_coercivity", coer, 0.0, coer > 0.0);
  return out;
}

}  // namespace porehom
