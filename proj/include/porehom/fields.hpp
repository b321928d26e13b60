#pragma once

#include "porehom/linear_solver.hpp"
#include "porehom/mesh.hpp"
#include "porehom/viscosity.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace porehom {

using MeshPtr = std::shared_ptr<const StaggeredMesh>;
using Point = std::array<double, 3>;

enum class ScalarRole { phase, chemical_potential, pressure, generic };

std::string to_string(ScalarRole role);

/// One value per pore cell.
struct ScalarField {
  MeshPtr mesh;
  Vector values;
  double t = 0.0;
  ScalarRole role = ScalarRole::generic;

  ScalarField() = default;
  ScalarField(MeshPtr m, ScalarRole r = ScalarRole::generic)
      : mesh(std::move(m)), values(Vector::Zero(static_cast<long>(mesh->num_pore()))), role(r) {}
  ScalarField(MeshPtr m, Vector v, ScalarRole r = ScalarRole::generic)
      : mesh(std::move(m)), values(std::move(v)), role(r) {}

  double mean() const { return values.size() ? values.mean() : 0.0; }
};

/// Normal components on open faces; closed faces (walls, obstacles) are zero.
struct VectorField {
  MeshPtr mesh;
  Vector values;
  double t = 0.0;

  VectorField() = default;
  explicit VectorField(MeshPtr m) : mesh(std::move(m)), values(Vector::Zero(static_cast<long>(mesh->num_faces()))) {}
  VectorField(MeshPtr m, Vector v) : mesh(std::move(m)), values(std::move(v)) {}
};

ScalarField sample_scalar(const MeshPtr& mesh, const std::function<double(const Point&)>& f,
                          ScalarRole role = ScalarRole::generic);
/// Samples component `axis` of f at each open face center.
VectorField sample_vector(const MeshPtr& mesh, const std::function<Point(const Point&)>& f);

/// Centered face differences; zero on closed faces (homogeneous Neumann).
VectorField grad(const ScalarField& s);
ScalarField div(const VectorField& u);

/// Solves -Laplace(s) = rhs with homogeneous Neumann conditions on every pore
/// boundary and returns the zero-mean solution.
ScalarField laplace_neumann_solve(const ScalarField& rhs, const SolverOptions& opts = {});

/// Per pore cell symmetric strain; off-diagonals are edge shears averaged to the cell.
std::vector<Eigen::Matrix3d> strain(const VectorField& u);

/// Metric weights of the viscous form a(u, v) = (S u)^T W (S v) |cell| in the
/// extended strain layout of StaggeredMesh::strain().
SparseMatrix viscous_weights(const StaggeredMesh& mesh, const ViscosityModel& model, double t);
/// S^T W S: the stiffness of -div(A D(u)) per unit cell volume.
SparseMatrix viscous_stiffness(const StaggeredMesh& mesh, const ViscosityModel& model, double t);
/// div(A D(u)) as a face field; the discrete operator is symmetric by construction.
VectorField viscous_apply(const ViscosityModel& model, const VectorField& u, double t);

/// Skew-symmetric convection 1/2[(u.grad)v + div(u (x) v)]; <C(u)v, v> = 0 exactly.
VectorField convect_skew(const VectorField& u, const VectorField& v);
/// Raw form used by steppers: result += coeff * C(u) v.
void add_convect_skew(const StaggeredMesh& mesh, const Vector& u, const Vector& v, double coeff, Vector& out);

/// (face-averaged phi) * (face gradient of mu).
VectorField korteweg_force(const ScalarField& phi, const ScalarField& mu);

/// div(u phi) with face-upwinded phi; closed faces carry no flux.
ScalarField upwind_advection(const VectorField& u, const ScalarField& phi);
Vector upwind_advection(const StaggeredMesh& mesh, const Vector& u, const Vector& phi);

/// Face operator for a constant conductivity matrix: flux_a = sum_b C_ab g_b, with
/// off-axis gradients averaged from the four neighbouring faces. Symmetric.
SparseMatrix face_tensor(const StaggeredMesh& mesh, const Eigen::Matrix3d& c);
/// div(C grad .) on pore cells with zero normal flux.
SparseMatrix anisotropic_laplacian(const StaggeredMesh& mesh, const Eigen::Matrix3d& c);

/// Cell-centered velocity (rows (axis, cell)) from face values.
Eigen::MatrixXd cell_velocity(const VectorField& u);

double l2_norm(const ScalarField& s);
double l2_norm(const VectorField& u);
bool all_finite(const Vector& v);

}  // namespace porehom
