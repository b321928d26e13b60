#include "doctest.h"

#include "porehom/unfolding.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace porehom;
using testing_support::random_vector;

namespace {

PerforatedDomain domain(double r, int n_y, int m) { return tile_domain(build_unit_cell(2, InclusionShape::disk, r, n_y), m); }

MeshPtr mesh_of(const PerforatedDomain& d) { return std::make_shared<StaggeredMesh>(d.grid, d.m); }

ScalarField pore_field(const PerforatedDomain& d, const std::function<double(const Point&)>& f) {
  return sample_scalar(mesh_of(d), f);
}

}  // namespace

TEST_CASE("unfolding visits every voxel once") {
  const auto d = domain(0.25, 8, 4);
  std::set<std::size_t> seen;
  const std::size_t cells = 16, size = 64;
  for (std::size_t k = 0; k < cells; ++k)
    for (std::size_t y = 0; y < size; ++y) seen.insert(global_voxel(d, k, y));
  CHECK(seen.size() == d.grid.num_cells());
}

TEST_CASE("unfolding of a constant and of the coordinate") {
  const auto d = domain(0.25, 8, 4);
  const auto c = unfold(d, pore_field(d, [](const Point&) { return 2.5; }));
  const auto x = unfold(d, pore_field(d, [](const Point& p) { return p[0]; }));
  std::size_t present = 0;
  for (std::size_t k = 0; k < c.num_cells(); ++k)
    for (std::size_t y = 0; y < c.cell_size(); ++y) {
      CHECK(c.has(k, y) == d.cell.grid.is_pore(y));
      if (!c.has(k, y)) {
        CHECK(std::isnan(c.at(k, y)));
        continue;
      }
      ++present;
      CHECK(c.at(k, y) == 2.5);
      const double expect = d.eps * static_cast<double>(k % 4) + d.eps * (static_cast<double>(y % 8) + 0.5) / 8.0;
      CHECK(x.at(k, y) == doctest::Approx(expect).epsilon(1e-14));
    }
  CHECK(present == d.grid.num_pore());
}

TEST_CASE("unfolding separates the oscillation on an open grid") {
  const auto d = domain(0.0, 16, 4);
  const double pi = std::numbers::pi;
  const auto u = unfold(d, pore_field(d, [&](const Point& p) { return std::sin(2 * pi * p[0] / d.eps); }));
  double worst = 0.0;
  for (std::size_t k = 0; k < u.num_cells(); ++k)
    for (std::size_t y = 0; y < u.cell_size(); ++y)
      worst = std::max(worst, std::abs(u.at(k, y) - std::sin(2 * pi * (static_cast<double>(y % 16) + 0.5) / 16.0)));
  CHECK(worst < 1e-12);
}

TEST_CASE("unfolding preserves integrals and the L2 norm") {
  for (int m : {2, 4}) {
    const auto d = domain(0.25, 16, m);
    const Vector v = random_vector(static_cast<long>(d.grid.num_cells()), 100u + static_cast<unsigned>(m));
    double direct = 0.0, squares = 0.0;
    for (std::size_t c = 0; c < d.grid.num_cells(); ++c)
      if (d.grid.is_pore(c)) {
        direct += v(static_cast<long>(c)) * d.grid.cell_volume();
        squares += v(static_cast<long>(c)) * v(static_cast<long>(c));
      }
    const auto u = unfold(d, v);
    CHECK(std::abs(u.integral() - direct) <= 1e-14 * std::max(1.0, std::abs(direct)) * 10);
    CHECK(std::abs(u.sum_squares() - squares) <= 1e-13 * squares);
  }
}

TEST_CASE("unfold rejects a field from another grid") {
  const auto d = domain(0.25, 8, 2);
  CHECK_THROWS_AS(unfold(d, Vector::Zero(10)), std::invalid_argument);
  const auto other = domain(0.25, 8, 4);
  CHECK_THROWS_AS(unfold(d, pore_field(other, [](const Point&) { return 1.0; })), std::invalid_argument);
}

TEST_CASE("extension keeps pore values and constants") {
  const auto d = domain(0.25, 16, 2);
  const auto f = pore_field(d, [](const Point& p) { return std::cos(3 * p[0]) + p[1]; });
  const auto c = pore_field(d, [](const Point&) { return -0.75; });
  for (auto mode : {ExtendMode::cell_mean, ExtendMode::harmonic}) {
    const Vector e = extend(d, f, mode);
    for (std::size_t k = 0; k < f.mesh->num_pore(); ++k)
      CHECK(e(static_cast<long>(f.mesh->dof_cell(k))) == f.values(static_cast<long>(k)));
    const Vector ec = extend(d, c, mode);
    CHECK(ec.cwiseAbs().minCoeff() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ec.cwiseAbs().maxCoeff() == doctest::Approx(0.75).epsilon(1e-12));
  }
  const auto open = domain(0.0, 8, 2);
  const auto g = pore_field(open, [](const Point& p) { return p[0] * p[1]; });
  CHECK((extend(open, g, ExtendMode::harmonic) - g.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(parse_extend_mode("nearest"), std::invalid_argument);
  CHECK(parse_extend_mode(to_string(ExtendMode::harmonic)) == ExtendMode::harmonic);
}

TEST_CASE("harmonic in-fill obeys the maximum principle") {
  const auto d = domain(0.3, 16, 2);
  const auto f = pore_field(d, [](const Point& p) { return 2 * p[0] - p[1]; });
  const Vector e = extend(d, f, ExtendMode::harmonic);
  const auto& grid = d.grid;
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    if (grid.is_pore(c)) continue;
    // Bound by the pore values on the rim of the inclusion's cell.
    const auto cc = grid.coord(c);
    const int k0 = cc[0] / 16, k1 = cc[1] / 16;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        const std::size_t g = grid.index({k0 * 16 + i, k1 * 16 + j, 0});
        if (!grid.is_pore(g)) continue;
        lo = std::min(lo, e(static_cast<long>(g)));
        hi = std::max(hi, e(static_cast<long>(g)));
      }
    CHECK(e(static_cast<long>(c)) <= hi + 1e-12);
    CHECK(e(static_cast<long>(c)) >= lo - 1e-12);
  }
}

TEST_CASE("gradient of well-prepared data averages to B grad phi") {
  // Unfolded cell-averaged gradient, Y_p mean per cell, against B_hom grad phi0.
  const auto cell = build_unit_cell(2, InclusionShape::disk, 0.25, 16);
  auto set = std::make_shared<CorrectorSet>();
  const auto tensors = compute_effective_tensors(cell, ViscosityModel::isotropic(2, 1.0), 0.0, {}, set.get());
  PhaseInit phi0;
  phi0.kind = PhaseInit::Kind::random_fourier;
  phi0.amplitude = 0.5;
  phi0.seed = 5;
  std::vector<double> errs;
  for (int m : {4, 8}) {
    const auto d = tile_domain(cell, m);
    MicroParams p;
    p.t_end = 0.0;
    p.phi0 = phi0;
    p.phase_correctors = set;
    MicroSolver s(d, p);
    const auto g = cell_velocity(grad(s.state().phi));
    p.phi0.prepare(2);
    double worst = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      Vector full = Vector::Zero(static_cast<long>(d.grid.num_cells()));
      for (std::size_t k = 0; k < s.mesh()->num_pore(); ++k)
        full(static_cast<long>(s.mesh()->dof_cell(k))) = g(axis, static_cast<long>(k));
      const auto u = unfold(d, full);
      for (std::size_t k = 0; k < u.num_cells(); ++k) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t y = 0; y < u.cell_size(); ++y)
          if (u.has(k, y)) sum += u.at(k, y), ++n;
        const Point xc{(static_cast<double>(k % m) + 0.5) / m, (static_cast<double>(k / m) + 0.5) / m, 0.0};
        const Point gp = p.phi0.gradient(xc);
        const double expect = tensors.b_hom(axis, 0) * gp[0] + tensors.b_hom(axis, 1) * gp[1];
        worst = std::max(worst, std::abs(sum / static_cast<double>(n) - expect));
      }
    }
    errs.push_back(worst);
  }
  CHECK(errs[1] < 0.6 * errs[0]);
}

TEST_CASE("micro/macro comparison of zero data and of equal fields") {
  const auto d = domain(0.25, 8, 2);
  MicroParams mp;
  mp.t_end = 0.0;
  MicroSolver micro(d, mp);
  MacroParams Mp;
  Mp.t_end = 0.0;
  Mp.n = 16;
  Mp.tensors = EffectiveTensors::identity(2, ViscosityModel::isotropic(2, 1.0).mandel(0.0, {0, 0, 0}));
  MacroSolver macro(Mp);
  auto e = compare_micro_macro(micro.state(), 1.0, macro.state());
  CHECK(e.phi_error == 0.0);
  CHECK(e.u_error == 0.0);

  // The same smooth field on a 16^2 box sampled at its own cell centers.
  const auto open = domain(0.0, 8, 2);
  MicroParams op;
  op.t_end = 0.0;
  op.phi0.mean = 0.3;
  op.phi0.kind = PhaseInit::Kind::random_fourier;
  op.phi0.amplitude = 0.2;
  op.phi0.seed = 4;
  Mp.phi0 = op.phi0;
  MicroSolver m2(open, op);
  MacroSolver M2(Mp);
  e = compare_micro_macro(m2.state(), 1.0, M2.state());
  CHECK(e.phi_error < 1e-14);

  FlowState later = macro.state();
  later.t = 0.5;
  CHECK_THROWS_AS(compare_micro_macro(micro.state(), 1.0, later), std::invalid_argument);
  CHECK_THROWS_AS(compare_micro_macro(micro.state(), 0.0, macro.state()), std::invalid_argument);
}

TEST_CASE("energy convergence of zero data is the F(0) floor") {
  const auto d = domain(0.25, 16, 2);
  MicroParams mp;
  mp.lambda_eps = 0.7;
  mp.dt = 1e-2;
  mp.t_end = 0.05;
  MicroSolver micro(d, mp);
  micro.run();
  MacroParams Mp;
  Mp.dt = 1e-2;
  Mp.t_end = 0.05;
  Mp.n = 32;
  Mp.tensors = EffectiveTensors::identity(2, ViscosityModel::isotropic(2, 1.0).mandel(0.0, {0, 0, 0}));
  MacroSolver macro(Mp);
  macro.run();
  CHECK(macro.trace().records[0].total == doctest::Approx(0.25));
  const auto dev = energy_convergence(micro.trace(), 0.7, macro.trace(), d.cell.porosity);
  CHECK(dev.d.size() == 6);
  CHECK(dev.sup < 1e-14);

  EnergyTrace shifted = macro.trace();
  shifted.records[2].t += 1e-3;
  CHECK_THROWS_AS(energy_convergence(micro.trace(), 0.7, shifted, d.cell.porosity), std::invalid_argument);
  shifted.records.pop_back();
  CHECK_THROWS_AS(energy_convergence(micro.trace(), 0.7, shifted, d.cell.porosity), std::invalid_argument);
}

TEST_CASE("monotonicity verdict") {
  CHECK(non_increasing({3.0, 2.0, 1.0}, 0.0));
  CHECK(non_increasing({1.0, 1.05, 1.1}, 0.1));
  CHECK_FALSE(non_increasing({1.0, 1.2}, 0.1));
  CHECK(non_increasing({1e-12, 5e-12}, 0.1, 1e-10));
  CHECK(non_increasing({}, 0.1));
}

TEST_CASE("study configuration is validated") {
  StudyConfig c;
  c.m_list.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.m_list = {4, 2};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.m_list = {2, 2};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.m_list = {2, 4};
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("single eps study on an open cell has near-zero errors") {
  StudyConfig c;
  c.radius = 0.0;
  c.n_y = 8;
  c.m_list = {2};
  c.macro_n = 16;
  c.dt = 1e-2;
  c.t_end = 0.1;
  c.compare_every = 2;
  const auto r = run_study(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.passed());
  CHECK(r.rows[0].phi_error_sup < 1e-6);  // lambda_eps = lambda + eps still differs
  CHECK(r.rows[0].energy.sup < 1e-6);
  CHECK(r.rows[0].history.size() == 6);
}
