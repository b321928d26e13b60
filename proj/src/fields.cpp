#include "porehom/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace porehom {

namespace {
using Triplet = Eigen::Triplet<double>;
}

std::string to_string(ScalarRole role) {
  switch (role) {
    case ScalarRole::phase: return "phi";
    case ScalarRole::chemical_potential: return "mu";
    case ScalarRole::pressure: return "p";
    case ScalarRole::generic: return "scalar";
  }
  return "scalar";
}

ScalarField sample_scalar(const MeshPtr& mesh, const std::function<double(const Point&)>& f, ScalarRole role) {
  ScalarField s(mesh, role);
  for (std::size_t p = 0; p < mesh->num_pore(); ++p) s.values(static_cast<long>(p)) = f(mesh->cell_center(p));
  return s;
}

VectorField sample_vector(const MeshPtr& mesh, const std::function<Point(const Point&)>& f) {
  VectorField u(mesh);
  for (std::size_t i = 0; i < mesh->num_faces(); ++i)
    u.values(static_cast<long>(i)) = f(mesh->face_center(i))[mesh->face(i).axis];
  return u;
}

VectorField grad(const ScalarField& s) {
  VectorField g(s.mesh, s.mesh->grad() * s.values);
  g.t = s.t;
  return g;
}

ScalarField div(const VectorField& u) {
  ScalarField d(u.mesh, u.mesh->div() * u.values);
  d.t = u.t;
  return d;
}

ScalarField laplace_neumann_solve(const ScalarField& rhs, const SolverOptions& opts) {
  NeumannSolver solver;
  solver.compute(-rhs.mesh->laplacian(), opts);
  ScalarField out(rhs.mesh, solver.solve(rhs.values, std::max(opts.tol, 1e-12)), rhs.role);
  out.t = rhs.t;
  return out;
}

std::vector<Eigen::Matrix3d> strain(const VectorField& u) {
  const auto& mesh = *u.mesh;
  const Vector s = mesh.strain() * u.values;
  const auto np = static_cast<long>(mesh.num_pore());
  const long avg = static_cast<long>(mesh.strain_avg_offset());
  const auto pairs = shear_pairs();
  std::vector<Eigen::Matrix3d> out(mesh.num_pore(), Eigen::Matrix3d::Zero());
  for (long p = 0; p < np; ++p) {
    auto& d = out[static_cast<std::size_t>(p)];
    for (int a = 0; a < mesh.dim(); ++a) d(a, a) = s(a * np + p);
    for (int k = 0; k < mesh.num_shear(); ++k) {
      const double v = s(avg + k * np + p);
      d(pairs[k][0], pairs[k][1]) = v;
      d(pairs[k][1], pairs[k][0]) = v;
    }
  }
  return out;
}

SparseMatrix viscous_weights(const StaggeredMesh& mesh, const ViscosityModel& model, double t) {
  const int dim = mesh.dim();
  const int ns = mesh.num_shear();
  const auto np = static_cast<long>(mesh.num_pore());
  const long edge_off = static_cast<long>(mesh.strain_diag_rows());
  const long avg_off = static_cast<long>(mesh.strain_avg_offset());
  std::vector<Triplet> t_w;
  auto add = [&t_w](long r, long c, double v) {
    if (v != 0.0) t_w.emplace_back(r, c, v);
  };
  Eigen::MatrixXd k_uniform;
  if (model.spatially_uniform()) k_uniform = model.mandel(t, {0.5, 0.5, 0.5});
  auto k_at = [&](const Point& x) {
    return model.spatially_uniform() ? k_uniform : model.mandel(t, mesh.micro_coord(x));
  };

  for (long p = 0; p < np; ++p) {
    const Eigen::MatrixXd k = k_at(mesh.cell_center(static_cast<std::size_t>(p)));
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) add(a * np + p, b * np + p, k(a, b));
      for (int s = 0; s < ns; ++s) {
        const double v = std::numbers::sqrt2 * k(a, dim + s);
        add(a * np + p, avg_off + s * np + p, v);
        add(avg_off + s * np + p, a * np + p, v);
      }
    }
    for (int s = 0; s < ns; ++s)
      for (int r = 0; r < ns; ++r)
        if (r != s) add(avg_off + s * np + p, avg_off + r * np + p, 2.0 * k(dim + s, dim + r));
  }
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges()[e];
    const Eigen::MatrixXd k = k_at(edge.x);
    add(edge_off + static_cast<long>(e), edge_off + static_cast<long>(e),
        2.0 * edge.weight * k(dim + edge.pair, dim + edge.pair));
  }
  const long rows = mesh.strain().rows();
  SparseMatrix w(rows, rows);
  w.setFromTriplets(t_w.begin(), t_w.end());
  return w;
}

SparseMatrix viscous_stiffness(const StaggeredMesh& mesh, const ViscosityModel& model, double t) {
  const SparseMatrix& s = mesh.strain();
  SparseMatrix st = s.transpose();
  SparseMatrix k = st * viscous_weights(mesh, model, t) * s;
  return SparseMatrix(0.5 * (k + SparseMatrix(k.transpose())));
}

VectorField viscous_apply(const ViscosityModel& model, const VectorField& u, double t) {
  const auto& mesh = *u.mesh;
  const Vector strain_u = mesh.strain() * u.values;
  const Vector stress = viscous_weights(mesh, model, t) * strain_u;
  VectorField out(u.mesh, -(mesh.strain().transpose() * stress));
  out.t = u.t;
  return out;
}

void add_convect_skew(const StaggeredMesh& mesh, const Vector& u, const Vector& v, double coeff, Vector& out) {
  const double scale = 0.5 * coeff / mesh.h();
  for (const auto& in : mesh.interfaces()) {
    double transport = 0.0;
    if (in.t0 >= 0) transport += u(in.t0);
    if (in.t1 >= 0) transport += u(in.t1);
    const double flux = 0.5 * transport * scale;
    out(in.i) += flux * v(in.j);
    out(in.j) -= flux * v(in.i);
  }
}

VectorField convect_skew(const VectorField& u, const VectorField& v) {
  VectorField out(u.mesh);
  add_convect_skew(*u.mesh, u.values, v.values, 1.0, out.values);
  out.t = u.t;
  return out;
}

VectorField korteweg_force(const ScalarField& phi, const ScalarField& mu) {
  const auto& mesh = *phi.mesh;
  VectorField out(phi.mesh, mesh.grad() * mu.values);
  for (std::size_t i = 0; i < mesh.num_faces(); ++i) {
    const auto [a, c] = mesh.face(i);
    std::size_t nb;
    mesh.grid().neighbor(c, a, 1, nb);
    const double avg = 0.5 * (phi.values(mesh.cell_dof(c)) + phi.values(mesh.cell_dof(nb)));
    out.values(static_cast<long>(i)) *= avg;
  }
  out.t = phi.t;
  return out;
}

Vector upwind_advection(const StaggeredMesh& mesh, const Vector& u, const Vector& phi) {
  Vector flux(static_cast<long>(mesh.num_faces()));
  for (std::size_t i = 0; i < mesh.num_faces(); ++i) {
    const auto [a, c] = mesh.face(i);
    std::size_t nb;
    mesh.grid().neighbor(c, a, 1, nb);
    const double vel = u(static_cast<long>(i));
    const double up = vel >= 0.0 ? phi(mesh.cell_dof(c)) : phi(mesh.cell_dof(nb));
    flux(static_cast<long>(i)) = vel * up;
  }
  return mesh.div() * flux;
}

ScalarField upwind_advection(const VectorField& u, const ScalarField& phi) {
  ScalarField out(u.mesh, upwind_advection(*u.mesh, u.values, phi.values), phi.role);
  out.t = phi.t;
  return out;
}

SparseMatrix face_tensor(const StaggeredMesh& mesh, const Eigen::Matrix3d& c) {
  std::vector<Triplet> t;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const int a = mesh.face(f).axis;
    t.emplace_back(static_cast<long>(f), static_cast<long>(f), c(a, a));
  }
  for (const auto& nb : mesh.face_neighbours()) {
    const int a = mesh.face(static_cast<std::size_t>(nb.f)).axis;
    const int b = mesh.face(static_cast<std::size_t>(nb.g)).axis;
    if (c(a, b) != 0.0) t.emplace_back(nb.f, nb.g, 0.25 * c(a, b));
  }
  const auto nf = static_cast<long>(mesh.num_faces());
  SparseMatrix m(nf, nf);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix anisotropic_laplacian(const StaggeredMesh& mesh, const Eigen::Matrix3d& c) {
  return mesh.div() * face_tensor(mesh, c) * mesh.grad();
}

Eigen::MatrixXd cell_velocity(const VectorField& u) {
  const auto& mesh = *u.mesh;
  const Vector avg = mesh.face_to_cells() * u.values;
  const auto np = static_cast<long>(mesh.num_pore());
  Eigen::MatrixXd out(mesh.dim(), np);
  for (int a = 0; a < mesh.dim(); ++a) out.row(a) = avg.segment(a * np, np).transpose();
  return out;
}

double l2_norm(const ScalarField& s) { return std::sqrt(s.mesh->dot_cells(s.values, s.values)); }
double l2_norm(const VectorField& u) { return std::sqrt(u.mesh->dot_faces(u.values, u.values)); }

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace porehom
