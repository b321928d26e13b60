#include "output.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#ifndef POREHOM_VERSION
#define POREHOM_VERSION "0.0.0"
#endif

namespace porehom::app {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");

const char* version_string() { return "porehom " POREHOM_VERSION; }

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_json(const std::string& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

namespace {

std::string raw_bytes(const std::vector<double>& v) {
  std::string s(v.size() * sizeof(double), '\0');
  std::memcpy(s.data(), v.data(), s.size());
  return s;
}

json sidecar(const StaggeredMesh& mesh, const std::string& role, double t, double eps, int components) {
  std::vector<int> shape(static_cast<std::size_t>(mesh.dim()), mesh.grid().n());
  return {{"role", role},
          {"shape", shape},
          {"components", components},
          {"h", mesh.h()},
          {"t", t},
          {"eps", eps},
          {"dtype", "float64"},
          {"endian", "little"},
          {"order", "axis0_fastest"},
          {"solid", "nan"}};
}

std::vector<double> to_grid(const StaggeredMesh& mesh, const Vector& pore_values) {
  std::vector<double> full(mesh.grid().num_cells(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t d = 0; d < mesh.num_pore(); ++d) full[mesh.dof_cell(d)] = pore_values(static_cast<long>(d));
  return full;
}

}  // namespace

void write_scalar_snapshot(const std::string& stem, const ScalarField& field, double eps) {
  const auto& mesh = *field.mesh;
  write_atomic(stem + ".raw", raw_bytes(to_grid(mesh, field.values)));
  write_json(stem + ".json", sidecar(mesh, to_string(field.role), field.t, eps, 1));
}

void write_velocity_snapshot(const std::string& stem, const VectorField& u, double eps) {
  const auto& mesh = *u.mesh;
  const Eigen::MatrixXd cu = cell_velocity(u);
  std::vector<double> all;
  for (int a = 0; a < mesh.dim(); ++a) {
    const auto block = to_grid(mesh, cu.row(a).transpose());
    all.insert(all.end(), block.begin(), block.end());
  }
  write_atomic(stem + ".raw", raw_bytes(all));
  write_json(stem + ".json", sidecar(mesh, "velocity", u.t, eps, mesh.dim()));
}

void write_state_snapshots(const std::string& dir, const std::string& tag, const FlowState& s, double eps) {
  write_scalar_snapshot(dir + "/phi_" + tag, s.phi, eps);
  write_scalar_snapshot(dir + "/mu_" + tag, s.mu, eps);
  write_scalar_snapshot(dir + "/p_" + tag, s.p, eps);
  VectorField u = s.u;
  u.t = s.t;
  write_velocity_snapshot(dir + "/u_" + tag, u, eps);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (long k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return rows;
}

json tensors_json(const EffectiveTensors& e) {
  return {{"dim", e.dim},
          {"t", e.t},
          {"porosity", e.porosity},
          {"a_hom_voigt", matrix_json(mandel_to_voigt(e.a_hom, e.dim))},
          {"a_hom_mandel", matrix_json(e.a_hom)},
          {"b_hom", matrix_json(e.b_hom)},
          {"c_hom", matrix_json(e.c_hom)},
          {"b_energy", matrix_json(e.b_energy)},
          {"a_asymmetry", e.a_asymmetry}};
}

json checks_json(const std::vector<TensorCheck>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
  return out;
}

json trace_summary(const EnergyTrace& trace, double slack_per_step) {
  const auto& r = trace.records;
  double max_rise = 0.0, max_diss = -std::numeric_limits<double>::infinity(), max_div = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    max_rise = std::max(max_rise, r[k].total - r[k - 1].total);
    max_diss = std::max(max_diss, r[k].diss_residual);
    max_div = std::max(max_div, r[k].div_residual);
  }
  const double scale = r.empty() ? 0.0 : std::abs(r.front().total);
  json j = {{"steps", r.empty() ? 0 : r.size() - 1},
            {"energy_initial", r.empty() ? 0.0 : r.front().total},
            {"energy_final", r.empty() ? 0.0 : r.back().total},
            {"max_energy_rise", max_rise},
            {"energy_nonincreasing", max_rise <= slack_per_step * scale},
            {"max_div_residual", max_div}};
  j["max_diss_residual"] = r.size() > 1 ? json(max_diss) : json(nullptr);
  return j;
}

}  // namespace porehom::app
