#include "doctest.h"

#include "porehom/macro_solver.hpp"
#include "porehom/micro_nsch.hpp"

#include <cmath>

using namespace porehom;

namespace {

PerforatedDomain small_domain(double r = 0.25, int n_y = 16, int m = 2) {
  return tile_domain(build_unit_cell(2, InclusionShape::disk, r, n_y), m);
}

PhaseInit random_phase(double mean, double amp, std::uint64_t seed) {
  PhaseInit p;
  p.kind = PhaseInit::Kind::random_fourier;
  p.mean = mean;
  p.amplitude = amp;
  p.modes = 3;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("zero data with a vanishing source is a fixed point") {
  MicroParams p;
  p.dt = 1e-3;
  p.t_end = 5e-3;
  MicroSolver s(small_domain(), p);
  s.run();
  CHECK(s.state().u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.state().phi.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.state().p.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.trace().records.size() == 6);
}

TEST_CASE("energy of the zero and well states") {
  MicroParams p;
  p.lambda_eps = 0.3;
  MicroSolver s(small_domain(), p);
  const auto dom = small_domain();
  const double pore_area = porosity(dom);
  CHECK(s.trace().records[0].total == doctest::Approx(0.3 * 0.25 * pore_area).epsilon(1e-12));
  p.phi0.mean = 1.0;
  MicroSolver w(small_domain(), p);
  CHECK(std::abs(w.trace().records[0].total) <= 1e-15);
}

TEST_CASE("uniform phase decays like the source ODE and stays uniform") {
  MicroParams p;
  p.phi0.mean = 1.0;
  p.dt = 1e-2;
  p.t_end = 0.2;
  MicroSolver s(small_domain(), p);
  s.run();
  const auto& phi = s.state().phi.values;
  CHECK(phi.maxCoeff() - phi.minCoeff() <= 1e-10);
  const auto& mu = s.state().mu.values;
  CHECK(mu.maxCoeff() - mu.minCoeff() <= 1e-10);
  // Explicit Euler for phi' = -phi.
  CHECK(phi(0) == doctest::Approx(std::pow(1.0 - p.dt, 20)).epsilon(1e-9));
}

TEST_CASE("mean evolves by the mean source exactly") {
  MicroParams p;
  p.phi0 = random_phase(0.3, 0.2, 11);
  p.source = SourceModel::tanh_blend(0.5, 2.0);
  p.u0.kind = VelocityInit::Kind::vortex;
  p.u0.amplitude = 1.0;
  p.dt = 2e-3;
  p.t_end = 0.02;
  MicroSolver s(small_domain(), p);
  for (int n = 0; n < 10; ++n) {
    const Vector g = s.state().phi.values.unaryExpr([&](double v) { return p.source(v); });
    const double before = s.state().phi.mean();
    s.step();
    CHECK(std::abs((s.state().phi.mean() - before) / p.dt + g.mean()) <= 1e-9);
  }
}

TEST_CASE("projection leaves a divergence-free velocity with zero-mean pressure") {
  MicroParams p;
  p.phi0 = random_phase(0.0, 0.3, 3);
  p.force.kind = ForceModel::Kind::sinusoidal;
  p.force.amplitude = Eigen::Vector3d(1.0, 0.5, 0.0);
  p.dt = 2e-3;
  p.t_end = 0.01;
  MicroSolver s(small_domain(), p);
  s.run();
  for (const auto& r : s.trace().records) CHECK(r.div_residual <= 1e-9);
  CHECK(std::abs(s.state().p.mean()) <= 1e-12);
  CHECK(s.state().u.values.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("energy decays without forcing and convection does no work") {
  MicroParams p;
  p.phi0 = random_phase(0.0, 0.1, 5);
  p.u0.kind = VelocityInit::Kind::vortex;
  p.u0.amplitude = 1.0;
  p.dt = 2e-3;
  p.t_end = 0.1;
  MicroSolver s(small_domain(), p);
  s.run();
  const auto& r = s.trace().records;
  for (std::size_t n = 1; n < r.size(); ++n) {
    CHECK(r[n].total <= r[n - 1].total + 1e-10 * r[0].total);
    CHECK(std::abs(r[n].convection_work) <= 1e-12);
  }
}

TEST_CASE("lambda = 0 macro branch contains no transport") {
  MacroParams p;
  p.lambda = 0.0;
  p.tensors = EffectiveTensors::identity(2, ViscosityModel::isotropic(2, 1.0).mandel(0, {}));
  p.n = 16;
  p.phi0 = random_phase(0.0, 0.2, 7);
  p.u0.kind = VelocityInit::Kind::vortex;
  p.u0.amplitude = 1.0;
  MacroSolver a(p);
  p.u0.amplitude = 2.0;
  MacroSolver b(p);
  CHECK(!a.has_transport());
  a.step();
  b.step();
  CHECK(a.stepper().transport_evaluations() == 0);
  // Transport absent: the phase update is independent of the velocity scale.
  CHECK((a.state().phi.values - b.state().phi.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("macro energy with identity tensors equals the micro density") {
  MacroParams p;
  p.tensors = EffectiveTensors::identity(2, ViscosityModel::isotropic(2, 1.0).mandel(0, {}));
  p.n = 32;
  p.phi0 = random_phase(0.1, 0.3, 9);
  MacroSolver macro(p);
  MicroParams q;
  q.phi0 = p.phi0;
  MicroSolver micro(tile_domain(build_unit_cell(2, InclusionShape::disk, 0.0, 16), 2), q);
  CHECK(macro.trace().records[0].total == doctest::Approx(micro.trace().records[0].total).epsilon(1e-12));
  p.phi0 = PhaseInit{};
  p.phi0.mean = 1.0;
  CHECK(std::abs(MacroSolver(p).trace().records[0].total) <= 1e-15);
}

TEST_CASE("diagonal mobility acts on a one-dimensional profile with c11") {
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const auto mesh = box_mesh(2, n);
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    c(0, 0) = 0.7;
    c(1, 1) = 0.3;
    const SparseMatrix l = anisotropic_laplacian(*mesh, c);
    const auto mu = sample_scalar(mesh, [](const Point& x) { return std::cos(M_PI * x[0]); });
    const Vector got = l * mu.values;
    const auto want = sample_scalar(mesh, [](const Point& x) { return -0.7 * M_PI * M_PI * std::cos(M_PI * x[0]); });
    err.push_back((got - want.values).cwiseAbs().maxCoeff());
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}

TEST_CASE("micro on an open box matches macro with identity tensors") {
  MicroParams q;
  q.phi0 = random_phase(0.0, 0.4, 13);
  q.u0.kind = VelocityInit::Kind::vortex;
  q.u0.amplitude = 1.0;
  q.force.kind = ForceModel::Kind::sinusoidal;
  q.force.amplitude = Eigen::Vector3d(1.0, -1.0, 0.0);
  q.dt = 2e-3;
  q.t_end = 0.04;
  MicroSolver micro(tile_domain(build_unit_cell(2, InclusionShape::disk, 0.0, 16), 2), q);
  MacroParams p;
  p.tensors = EffectiveTensors::identity(2, q.viscosity.mandel(0, {}));
  p.n = 32;
  p.phi0 = q.phi0;
  p.u0 = q.u0;
  p.force = q.force;
  p.dt = q.dt;
  p.t_end = q.t_end;
  MacroSolver macro(p);
  micro.run();
  macro.run();
  CHECK((micro.state().phi.values - macro.state().phi.values).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((micro.state().u.values - macro.state().u.values).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("parameter validation") {
  MicroParams p;
  p.dt = 0.6;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.dt = 1e-3;
  p.s0 = 0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.s0 = 2.0;
  p.lambda_eps = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
