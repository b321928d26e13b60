#include "doctest.h"

#include "porehom/cell_problems.hpp"

#include <random>

#include <numbers>

using namespace porehom;

namespace {

const UnitCell& disk_cell() {
  static const UnitCell cell = build_unit_cell(2, InclusionShape::disk, 0.25, 32);
  return cell;
}

// Mirror image of a cell dof under x_0 -> 1 - x_0.
long mirror_x(const StaggeredMesh& mesh, long p) {
  const auto& g = mesh.grid();
  auto c = g.coord(mesh.dof_cell(static_cast<std::size_t>(p)));
  c[0] = g.n() - 1 - c[0];
  return mesh.cell_dof(g.index(c));
}

}  // namespace

TEST_CASE("empty inclusion has vanishing scalar correctors and identity B") {
  const auto cell = build_unit_cell(2, InclusionShape::disk, 0.0, 16);
  const auto mesh = cell_mesh(cell);
  const auto chi = solve_scalar_correctors(mesh);
  for (const auto& c : chi) CHECK(c.values.cwiseAbs().maxCoeff() <= 1e-12);
  const auto [flux, energy] = effective_B(mesh, chi);
  CHECK((flux - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((energy - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("scalar corrector is odd under the mirror of its axis") {
  const auto mesh = cell_mesh(disk_cell());
  const auto chi = solve_scalar_corrector(mesh, 0);
  double worst = 0.0;
  for (long p = 0; p < chi.values.size(); ++p) {
    // Cell centers x and 1 - x map to each other, and chi^1 changes sign.
    worst = std::max(worst, std::abs(chi.values(p) + chi.values(mirror_x(*mesh, p))));
  }
  CHECK(worst <= 1e-9);
  CHECK(chi.values.cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("scalar corrector satisfies the weak orthogonality") {
  const auto mesh = cell_mesh(disk_cell());
  for (int a = 0; a < 2; ++a) {
    const auto chi = solve_scalar_corrector(mesh, a);
    const Vector g = mesh->grad() * chi.values;
    const double ortho = (unit_face_field(*mesh, a) + g).dot(g) * mesh->cell_volume();
    CHECK(std::abs(ortho) <= 1e-10);
  }
}

TEST_CASE("B and C agree and lie in the variational bounds") {
  const auto e = compute_effective_tensors(disk_cell(), ViscosityModel::isotropic(2, 1.0), 0.0);
  CHECK((e.b_hom - e.c_hom).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((e.b_hom - e.b_energy).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(std::abs(e.b_hom(0, 1)) <= 1e-10);
  CHECK(e.b_hom(0, 0) == doctest::Approx(e.b_hom(1, 1)).epsilon(1e-10));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.b_hom);
  CHECK(eig.eigenvalues().maxCoeff() <= 1.0);
  // Harmonic-mean lower bound with a non-conducting inclusion is 0; a solid
  // disk of area fraction f gives the two-dimensional Hashin–Shtrikman value
  // (1 - f) / (1 + f) relative to the pore-normalized flux.
  const double f = 1.0 - e.porosity;
  CHECK(eig.eigenvalues().minCoeff() > 0.5 * (1.0 - f) / (1.0 + f));
}

TEST_CASE("empty inclusion reproduces the viscosity tensor") {
  const auto cell = build_unit_cell(2, InclusionShape::disk, 0.0, 16);
  for (const auto& model : {ViscosityModel::isotropic(2, 1.3), ViscosityModel::oscillating(2, 1.0, 0.0, 0.0)}) {
    CorrectorSet set;
    const auto e = compute_effective_tensors(cell, model, 0.0, {}, &set);
    CHECK((e.a_hom - model.mandel(0.0, {0.5, 0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-10);
    for (const auto& c : set.chi1) {
      CHECK(c.chi.values.cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(c.pi.values.cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("Stokes correctors are divergence free and orthogonal") {
  const auto mesh = cell_mesh(disk_cell());
  const auto model = ViscosityModel::isotropic(2, 1.0);
  const auto set = solve_correctors(mesh, model, 0.0);
  const SparseMatrix w = viscous_weights(*mesh, model, 0.0);
  for (int i = 0; i < 3; ++i) {
    const auto& c = set.chi1[i];
    CHECK(c.div_residual <= 1e-10);
    CHECK(std::abs(c.pi.mean()) <= 1e-12);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
    m(i) = 1.0;
    const Vector total = constant_strain(*mesh, m) + mesh->strain() * c.chi.values;
    const Vector sc = mesh->strain() * c.chi.values;
    CHECK(std::abs(strain_energy(*mesh, w, total, sc)) <= 1e-8);
  }
}

TEST_CASE("A_hom is symmetric, square symmetric, coercive and below the Voigt bound") {
  const auto model = ViscosityModel::isotropic(2, 1.0);
  const auto e = compute_effective_tensors(disk_cell(), model, 0.0);
  CHECK(e.a_asymmetry <= 1e-8);
  CHECK(e.a_hom(0, 0) == doctest::Approx(e.a_hom(1, 1)).epsilon(1e-8));
  CHECK(std::abs(e.a_hom(0, 2)) <= 1e-8);
  CHECK(sampled_asymmetry(e.a_hom, 2, 100, 3) <= 1e-12);
  CHECK(sampled_coercivity(e.a_hom, 2, 100, 4) >= 0.1 * model.kappa1());
  // Constant-strain competitor: a(M, M)/|Yp| <= A M : M pointwise.
  const auto mesh = cell_mesh(disk_cell());
  const SparseMatrix w = viscous_weights(*mesh, model, 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 20; ++s) {
    Eigen::VectorXd m(3);
    m << nd(rng), nd(rng), nd(rng);
    const Vector sm = constant_strain(*mesh, m);
    const double voigt = strain_energy(*mesh, w, sm, sm);
    CHECK(m.dot(e.a_hom * m) <= voigt + 1e-12);
    CHECK(voigt <= m.dot(model.mandel(0, {}) * m) + 1e-12);
  }
}

TEST_CASE("reconstruction of an arbitrary strain matches the tensor contraction") {
  const auto mesh = cell_mesh(disk_cell());
  const auto model = ViscosityModel::oscillating(2, 1.0, 0.3, 0.0);
  const auto set = solve_correctors(mesh, model, 0.0);
  const auto a = effective_A(set, model);
  Eigen::VectorXd m(3);
  m << 0.4, -1.1, 0.7;
  Vector chi = Vector::Zero(static_cast<long>(mesh->num_faces()));
  for (int i = 0; i < 3; ++i) chi += m(i) * set.chi1[i].chi.values;
  const Vector total = constant_strain(*mesh, m) + mesh->strain() * chi;
  const SparseMatrix w = viscous_weights(*mesh, model, 0.0);
  CHECK(strain_energy(*mesh, w, total, total) == doctest::Approx(m.dot(a * m)).epsilon(1e-9));
}

TEST_CASE("B is Cauchy under cell refinement") {
  std::vector<double> b;
  for (int n : {16, 32, 64}) {
    const auto cell = build_unit_cell(2, InclusionShape::disk, 0.25, n);
    const auto mesh = cell_mesh(cell);
    b.push_back(effective_B(mesh, solve_scalar_correctors(mesh)).first(0, 0));
  }
  MESSAGE("B_11 at n_y = 16, 32, 64: " << b[0] << " " << b[1] << " " << b[2]);
  CHECK(std::abs(b[2] - b[1]) < std::abs(b[1] - b[0]));
}
