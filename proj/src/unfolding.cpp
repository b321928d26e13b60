#include "porehom/unfolding.hpp"

#include <Eigen/SparseCholesky>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace porehom {

namespace {

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int k = 0; k < e; ++k) r *= static_cast<std::size_t>(base);
  return r;
}

CellCoord split(std::size_t idx, int n, int dim) {
  CellCoord c{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    c[a] = static_cast<int>(idx % static_cast<std::size_t>(n));
    idx /= static_cast<std::size_t>(n);
  }
  return c;
}

void check_domain(const PerforatedDomain& domain) {
  if (domain.grid.n() != domain.m * domain.cell.n_y || domain.grid.dim() != domain.cell.dim)
    throw std::invalid_argument("domain grid is not an exact tiling of its cell");
}

}  // namespace

std::size_t UnfoldedField::num_cells() const { return ipow(m, dim); }
std::size_t UnfoldedField::cell_size() const { return ipow(n_y, dim); }

double UnfoldedField::integral() const {
  const double w = std::pow(eps / n_y, dim);
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (present[k]) s += values[k] * w;
  return s;
}

double UnfoldedField::sum_squares() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (present[k]) s += values[k] * values[k];
  return s;
}

std::size_t global_voxel(const PerforatedDomain& domain, std::size_t kappa, std::size_t y) {
  const int dim = domain.grid.dim();
  const CellCoord ck = split(kappa, domain.m, dim);
  const CellCoord cy = split(y, domain.cell.n_y, dim);
  CellCoord c{0, 0, 0};
  for (int a = 0; a < dim; ++a) c[a] = ck[a] * domain.cell.n_y + cy[a];
  return domain.grid.index(c);
}

UnfoldedField unfold(const PerforatedDomain& domain, const Vector& grid_values) {
  check_domain(domain);
  if (static_cast<std::size_t>(grid_values.size()) != domain.grid.num_cells())
    throw std::invalid_argument("field size does not match the domain grid");
  UnfoldedField out;
  out.dim = domain.grid.dim();
  out.m = domain.m;
  out.n_y = domain.cell.n_y;
  out.eps = domain.eps;
  const std::size_t nk = out.num_cells(), ny = out.cell_size();
  out.values.assign(nk * ny, std::numeric_limits<double>::quiet_NaN());
  out.present.assign(nk * ny, 0);
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t g = global_voxel(domain, k, y);
      if (!domain.grid.is_pore(g)) continue;
      out.values[k * ny + y] = grid_values(static_cast<long>(g));
      out.present[k * ny + y] = 1;
    }
  return out;
}

UnfoldedField unfold(const PerforatedDomain& domain, const ScalarField& field) {
  const auto& mesh = *field.mesh;
  if (mesh.grid().n() != domain.grid.n() || mesh.grid().mask() != domain.grid.mask())
    throw std::invalid_argument("field does not live on the domain grid");
  Vector full = Vector::Zero(static_cast<long>(domain.grid.num_cells()));
  for (std::size_t d = 0; d < mesh.num_pore(); ++d) full(static_cast<long>(mesh.dof_cell(d))) = field.values(static_cast<long>(d));
  return unfold(domain, full);
}

ExtendMode parse_extend_mode(const std::string& name) {
  if (name == "cell_mean") return ExtendMode::cell_mean;
  if (name == "harmonic") return ExtendMode::harmonic;
  throw std::invalid_argument("unknown extension mode '" + name + "'");
}

std::string to_string(ExtendMode mode) { return mode == ExtendMode::cell_mean ? "cell_mean" : "harmonic"; }

Vector extend(const PerforatedDomain& domain, const ScalarField& field, ExtendMode mode) {
  check_domain(domain);
  const auto& mesh = *field.mesh;
  const auto& grid = domain.grid;
  if (mesh.grid().mask() != grid.mask()) throw std::invalid_argument("field does not live on the domain grid");
  const auto n = static_cast<long>(grid.num_cells());
  Vector out = Vector::Zero(n);
  for (std::size_t d = 0; d < mesh.num_pore(); ++d) out(static_cast<long>(mesh.dof_cell(d))) = field.values(static_cast<long>(d));
  if (grid.num_pore() == grid.num_cells()) return out;

  if (mode == ExtendMode::cell_mean) {
    const UnfoldedField u = unfold(domain, out);
    const std::size_t ny = u.cell_size();
    for (std::size_t k = 0; k < u.num_cells(); ++k) {
      double s = 0.0;
      std::size_t c = 0;
      for (std::size_t y = 0; y < ny; ++y)
        if (u.has(k, y)) s += u.at(k, y), ++c;
      const double mean = c ? s / static_cast<double>(c) : field.mean();
      for (std::size_t y = 0; y < ny; ++y)
        if (!u.has(k, y)) out(static_cast<long>(global_voxel(domain, k, y))) = mean;
    }
    return out;
  }

  // Harmonic in-fill: graph Laplacian on solid voxels, pore neighbours as data.
  std::vector<long> id(grid.num_cells(), -1);
  long ns = 0;
  for (std::size_t c = 0; c < grid.num_cells(); ++c)
    if (!grid.is_pore(c)) id[c] = ns++;
  std::vector<Eigen::Triplet<double>> trip;
  Vector rhs = Vector::Zero(ns);
  for (std::size_t c = 0; c < grid.num_cells(); ++c) {
    if (id[c] < 0) continue;
    double deg = 0.0;
    for (int a = 0; a < grid.dim(); ++a)
      for (int s : {-1, 1}) {
        std::size_t nb;
        if (!grid.neighbor(c, a, s, nb)) continue;
        deg += 1.0;
        if (id[nb] >= 0)
          trip.emplace_back(id[c], id[nb], -1.0);
        else
          rhs(id[c]) += out(static_cast<long>(nb));
      }
    trip.emplace_back(id[c], id[c], deg);
  }
  SparseMatrix a(ns, ns);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("harmonic extension: solid region not attached to pore");
  const Vector x = ldlt.solve(rhs);
  for (std::size_t c = 0; c < grid.num_cells(); ++c)
    if (id[c] >= 0) out(static_cast<long>(c)) = x(id[c]);
  return out;
}

ErrorRow compare_micro_macro(const FlowState& micro, double lambda_eps, const FlowState& macro, double time_tol) {
  if (!(lambda_eps > 0.0)) throw std::invalid_argument("lambda_eps must be positive");
  if (std::abs(micro.t - macro.t) > time_tol * std::max(1.0, std::abs(micro.t)))
    throw std::invalid_argument("micro and macro states are at different times");
  const auto& mm = *micro.phi.mesh;
  const auto& box = *macro.phi.mesh;
  if (mm.dim() != box.dim()) throw std::invalid_argument("micro and macro dimensions differ");
  const double vol = mm.cell_volume();
  const double scale = 1.0 / std::sqrt(lambda_eps);
  const Eigen::MatrixXd um = cell_velocity(micro.u);
  const Eigen::MatrixXd ub = cell_velocity(macro.u);
  std::vector<Vector> ub_rows(static_cast<std::size_t>(box.dim()));
  for (int a = 0; a < box.dim(); ++a) ub_rows[static_cast<std::size_t>(a)] = ub.row(a).transpose();

  ErrorRow row;
  row.t = micro.t;
  double ep = 0.0, eu = 0.0, np = 0.0, nu = 0.0;
  for (std::size_t d = 0; d < mm.num_pore(); ++d) {
    const Point x = mm.cell_center(d);
    const double phi = sample_cell_field(box, macro.phi.values, x);
    const double dp = micro.phi.values(static_cast<long>(d)) - phi;
    ep += dp * dp;
    np += phi * phi;
    for (int a = 0; a < mm.dim(); ++a) {
      const double ua = sample_cell_field(box, ub_rows[static_cast<std::size_t>(a)], x);
      const double du = um(a, static_cast<long>(d)) * scale - ua;
      eu += du * du;
      nu += ua * ua;
    }
  }
  row.phi_error = std::sqrt(ep * vol);
  row.u_error = std::sqrt(eu * vol);
  row.phi_norm = std::sqrt(np * vol);
  row.u_norm = std::sqrt(nu * vol);
  return row;
}

EnergyDeviation energy_convergence(const EnergyTrace& micro, double lambda_eps, const EnergyTrace& macro,
                                   double pore_fraction, double time_tol) {
  if (!(lambda_eps > 0.0)) throw std::invalid_argument("lambda_eps must be positive");
  if (micro.records.size() != macro.records.size() || micro.records.empty())
    throw std::invalid_argument("energy traces have different lengths");
  EnergyDeviation out;
  for (std::size_t k = 0; k < micro.records.size(); ++k) {
    const auto& a = micro.records[k];
    const auto& b = macro.records[k];
    if (std::abs(a.t - b.t) > time_tol * std::max(1.0, std::abs(a.t)))
      throw std::invalid_argument("energy traces are not on the same time grid");
    const double d = std::abs(a.total / lambda_eps - pore_fraction * b.total);
    out.t.push_back(a.t);
    out.d.push_back(d);
    out.sup = std::max(out.sup, d);
  }
  out.at_end = out.d.back();
  return out;
}

bool non_increasing(const std::vector<double>& values, double slack, double floor) {
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] <= std::max((1.0 + slack) * values[k - 1], floor))) return false;
  return true;
}

void StudyConfig::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("study dim must be 2 or 3");
  if (m_list.empty()) throw std::invalid_argument("study needs at least one eps");
  for (std::size_t k = 0; k < m_list.size(); ++k) {
    if (m_list[k] < 1) throw std::invalid_argument("eps must be 1/m with m >= 1");
    if (k > 0 && m_list[k] <= m_list[k - 1]) throw std::invalid_argument("eps values must be strictly decreasing");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (macro_n < 2) throw std::invalid_argument("macro grid needs at least 2 cells per side");
  if (!(slack >= 0.0)) throw std::invalid_argument("slack must be non-negative");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (compare_every < 1) throw std::invalid_argument("compare_every must be at least 1");
  if (!(phi_floor >= 0.0)) throw std::invalid_argument("phi_floor must be non-negative");
}

PhaseInit StudyConfig::default_phase() {
  PhaseInit p;
  p.kind = PhaseInit::Kind::random_fourier;
  p.mean = 0.5;
  p.amplitude = 0.4;
  p.seed = 1;
  return p;
}

std::string StudyReport::rows_csv(bool with_runtime) const {
  std::ostringstream os;
  os << "eps,lambda_eps,u_error,phi_error,u_error_sup,phi_error_sup,energy_sup,energy_end"
     << (with_runtime ? ",runtime\n" : "\n");
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.eps, r.lambda_eps,
                  r.error.u_error, r.error.phi_error, r.u_error_sup, r.phi_error_sup, r.energy.sup, r.energy.at_end);
    os << buf;
    if (with_runtime) {
      std::snprintf(buf, sizeof buf, ",%.6f", r.runtime);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.config = config;
  const UnitCell cell = build_unit_cell(config.dim, InclusionShape::disk, config.radius, config.n_y);
  const ViscosityModel visc = ViscosityModel::isotropic(config.dim, 1.0);
  auto correctors = std::make_shared<CorrectorSet>();
  report.tensors = compute_effective_tensors(cell, visc, 0.0, config.cell, correctors.get());

  MacroParams mp;
  mp.lambda = config.lambda;
  mp.tensors = report.tensors;
  mp.source = config.source;
  mp.force = config.force;
  mp.dt = config.dt;
  mp.t_end = config.t_end;
  mp.s0 = config.s0;
  mp.phi_cap = config.phi_cap;
  mp.u0 = config.u0;
  mp.phi0 = config.phi0;
  mp.solver = config.solver;
  mp.n = config.macro_n;
  mp.dim = config.dim;
  const auto t0 = std::chrono::steady_clock::now();
  MacroSolver macro(mp);
  std::vector<FlowState> snapshots;
  auto keep = [&](const FlowState& s) {
    if (s.step % config.compare_every != 0) return;
    FlowState light;
    light.u = s.u;
    light.phi = s.phi;
    light.t = s.t;
    light.step = s.step;
    snapshots.push_back(std::move(light));
  };
  keep(macro.state());
  macro.run(keep);
  report.macro_runtime = seconds_since(t0);
  report.macro_trace = macro.trace();

  report.rows.resize(config.m_list.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < config.m_list.size(); k = next++) {
      try {
        StudyRow& row = report.rows[k];
        row.m = config.m_list[k];
        row.eps = 1.0 / row.m;
        row.lambda_eps = config.lambda + row.eps;
        MicroParams p;
        p.lambda_eps = row.lambda_eps;
        p.viscosity = visc;
        p.source = config.source;
        p.force = config.force;
        p.dt = config.dt;
        p.t_end = config.t_end;
        p.s0 = config.s0;
        p.phi_cap = config.phi_cap;
        p.u0 = config.u0;
        p.phi0 = config.phi0;
        if (config.well_prepared) p.phase_correctors = correctors;
        p.solver = config.solver;
        const auto start = std::chrono::steady_clock::now();
        MicroSolver micro(tile_domain(cell, row.m), p);
        std::size_t snap = 0;
        auto check = [&](const FlowState& s) {
          if (s.step % config.compare_every != 0) return;
          const ErrorRow e = compare_micro_macro(s, row.lambda_eps, snapshots.at(snap++));
          row.phi_error_sup = std::max(row.phi_error_sup, e.phi_error);
          row.u_error_sup = std::max(row.u_error_sup, e.u_error);
          row.history.push_back(e);
        };
        check(micro.state());
        micro.run(check);
        row.runtime = seconds_since(start);
        row.error = compare_micro_macro(micro.state(), row.lambda_eps, macro.state());
        row.energy = energy_convergence(micro.trace(), row.lambda_eps, macro.trace(), cell.porosity);
        row.trace = micro.trace();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(config.threads, static_cast<int>(config.m_list.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < nthreads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<double> phi_err, phi_sup, energy_dev;
  double phi_scale = 0.0;
  for (const auto& r : report.rows) {
    phi_err.push_back(r.error.phi_error);
    phi_sup.push_back(r.phi_error_sup);
    energy_dev.push_back(r.energy.sup);
    phi_scale = std::max(phi_scale, r.error.phi_norm);
  }
  report.phi_monotone = non_increasing(phi_err, config.slack, config.phi_floor * phi_scale);
  report.phi_sup_monotone = non_increasing(phi_sup, config.slack);
  report.energy_monotone = non_increasing(energy_dev, config.slack);
  return report;
}

}  // namespace porehom
