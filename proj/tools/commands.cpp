#include "commands.hpp"

#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>

namespace porehom::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json header(const RunConfig& c, const std::string& command) {
  return {{"version", version_string()}, {"config_hash", config_hash(c)}, {"command", command}, {"config", c.canonical}};
}

std::string out_dir(const RunConfig& c) {
  fs::create_directories(c.output_dir);
  return c.output_dir;
}

std::string step_tag(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08ld", step);
  return buf;
}

/// Energy slack per step relative to T(0) used in run reports.
constexpr double kEnergySlack = 1e-10;

template <class Solver>
void run_with_snapshots(Solver& solver, const RunConfig& c, const std::string& dir, double eps) {
  const int every = c.numerics.snapshot_every;
  const std::string snap = dir + "/snapshots";
  if (every > 0) write_state_snapshots(snap, step_tag(0), solver.state(), eps);
  solver.run([&](const FlowState& s) {
    if (every > 0 && s.step % every == 0) write_state_snapshots(snap, step_tag(s.step), s, eps);
  });
  write_state_snapshots(snap, "final", solver.state(), eps);
}

}  // namespace

RunConfig prepare_config(const CommandOptions& opts) {
  RunConfig c = load_config(opts.config_path);
  if (opts.seed) override_seed(c, *opts.seed);
  if (opts.out_dir) c.output_dir = *opts.out_dir;
  if (opts.threads < 1) throw ConfigError("--threads must be at least 1");
  c.validate();
  return c;
}

int run_cell(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const UnitCell cell = c.cell();
  CorrectorSet set;
  const auto tensors =
      compute_effective_tensors(cell, c.physics.viscosity.build(c.geometry.dim), 0.0, c.cell_options(), &set);
  const auto checks = tensor_invariants(tensors, 100, c.physics.seed);
  bool pass = true;
  for (const auto& k : checks) pass = pass && k.pass;
  json j = header(c, "cell");
  j["tensors"] = tensors_json(tensors);
  j["invariants"] = checks_json(checks);
  j["scalar_residual"] = set.scalar_residual;
  double div = 0.0;
  int iterations = 0;
  for (const auto& s : set.chi1) {
    div = std::max(div, s.div_residual);
    iterations = std::max(iterations, s.iterations);
  }
  j["stokes_div_residual"] = div;
  j["stokes_iterations"] = iterations;
  j["passed"] = pass;
  write_json(out_dir(c) + "/cell_report.json", j);
  log << "cell: porosity " << tensors.porosity << ", invariants " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kPass : kGateFailure;
}

int run_micro(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const auto domain = c.domain();
  MicroSolver solver(domain, c.micro_params());
  const std::string dir = out_dir(c);
  run_with_snapshots(solver, c, dir, domain.eps);
  write_atomic(dir + "/trace.csv", solver.trace().to_csv());
  json j = header(c, "micro");
  j["eps"] = domain.eps;
  j["lambda_eps"] = c.micro_lambda();
  j["porosity"] = domain.cell.porosity;
  j["summary"] = trace_summary(solver.trace(), kEnergySlack);
  write_json(dir + "/micro_report.json", j);
  log << "micro: " << solver.state().step << " steps, T = " << solver.trace().records.back().total << "\n";
  return kPass;
}

int run_macro(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const auto tensors =
      compute_effective_tensors(c.cell(), c.physics.viscosity.build(c.geometry.dim), 0.0, c.cell_options());
  MacroSolver solver(c.macro_params(tensors));
  const std::string dir = out_dir(c);
  run_with_snapshots(solver, c, dir, 0.0);
  write_atomic(dir + "/trace.csv", solver.trace().to_csv());
  json j = header(c, "macro");
  j["lambda"] = c.physics.lambda;
  j["transport"] = solver.has_transport();
  j["tensors"] = tensors_json(tensors);
  j["summary"] = trace_summary(solver.trace(), kEnergySlack);
  write_json(dir + "/macro_report.json", j);
  log << "macro: " << solver.state().step << " steps, T = " << solver.trace().records.back().total << "\n";
  return kPass;
}

int run_study(const RunConfig& c, const CommandOptions& opts, std::ostream& log) {
  const StudyReport r = porehom::run_study(c.study_config(opts.threads));
  const std::string dir = out_dir(c);
  json rows = json::array();
  for (const auto& row : r.rows) {
    json hist = json::array();
    for (const auto& e : row.history)
      hist.push_back({{"t", e.t}, {"phi_error", e.phi_error}, {"u_error", e.u_error}});
    const std::string trace_file = "trace_m" + std::to_string(row.m) + ".csv";
    write_atomic(dir + "/" + trace_file, row.trace.to_csv());
    json jr = {{"eps", row.eps},
               {"m", row.m},
               {"lambda_eps", row.lambda_eps},
               {"phi_error", row.error.phi_error},
               {"u_error", row.error.u_error},
               {"phi_norm", row.error.phi_norm},
               {"u_norm", row.error.u_norm},
               {"phi_error_sup", row.phi_error_sup},
               {"u_error_sup", row.u_error_sup},
               {"energy_sup", row.energy.sup},
               {"energy_end", row.energy.at_end},
               {"history", hist},
               {"trace", trace_file}};
    if (opts.timings) jr["runtime_s"] = row.runtime;
    rows.push_back(jr);
  }
  write_atomic(dir + "/macro_trace.csv", r.macro_trace.to_csv());
  write_atomic(dir + "/study.csv", r.rows_csv(opts.timings));
  json j = header(c, "study");
  j["tensors"] = tensors_json(r.tensors);
  j["rows"] = rows;
  j["macro_trace"] = "macro_trace.csv";
  if (opts.timings) j["macro_runtime_s"] = r.macro_runtime;
  j["verdicts"] = {{"phi_error_at_t_end_nonincreasing", r.phi_monotone},
                   {"phi_error_sup_nonincreasing", r.phi_sup_monotone},
                   {"energy_deviation_nonincreasing", r.energy_monotone},
                   {"slack", c.study.slack},
                   {"phi_floor", c.study.phi_floor}};
  j["passed"] = r.passed();
  write_json(dir + "/study_report.json", j);
  for (const auto& row : r.rows)
    log << "eps " << row.eps << ": phi error " << row.error.phi_error << " (sup " << row.phi_error_sup
        << "), energy deviation " << row.energy.sup << "\n";
  log << "study: " << (r.passed() ? "pass" : "FAIL") << "\n";
  return r.passed() ? kPass : kGateFailure;
}

int run_unfold(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const auto domain = c.domain();
  MicroSolver solver(domain, c.micro_params());
  solver.run();
  const auto& s = solver.state();
  const ScalarField& field = c.unfold.field == "phi" ? s.phi : c.unfold.field == "mu" ? s.mu : s.p;
  const UnfoldedField u = unfold(domain, field);
  const Vector ext = extend(domain, field, c.unfold.extend);

  const std::string dir = out_dir(c);
  std::string bytes(u.values.size() * sizeof(double), '\0');
  std::memcpy(bytes.data(), u.values.data(), bytes.size());
  write_atomic(dir + "/unfolded_" + c.unfold.field + ".raw", bytes);
  write_json(dir + "/unfolded_" + c.unfold.field + ".json",
             {{"role", to_string(field.role)},
              {"dim", u.dim},
              {"m", u.m},
              {"n_y", u.n_y},
              {"eps", u.eps},
              {"t", s.t},
              {"shape", {u.num_cells(), u.cell_size()}},
              {"order", "kappa_major_axis0_fastest"},
              {"dtype", "float64"},
              {"endian", "little"},
              {"solid", "nan"}});
  std::string ebytes(static_cast<std::size_t>(ext.size()) * sizeof(double), '\0');
  std::memcpy(ebytes.data(), ext.data(), ebytes.size());
  write_atomic(dir + "/extended_" + c.unfold.field + ".raw", ebytes);

  double direct = 0.0, squares = 0.0;
  for (long k = 0; k < field.values.size(); ++k) {
    direct += field.values(k) * field.mesh->cell_volume();
    squares += field.values(k) * field.values(k);
  }
  const double integral_err = std::abs(u.integral() - direct) / std::max(1.0, std::abs(direct));
  const double isometry_err = std::abs(u.sum_squares() - squares) / std::max(1.0, squares);
  const bool pass = integral_err <= 1e-12 && isometry_err <= 1e-12;
  json j = header(c, "unfold");
  j["field"] = c.unfold.field;
  j["extend"] = to_string(c.unfold.extend);
  j["t"] = s.t;
  j["integral_direct"] = direct;
  j["integral_unfolded"] = u.integral();
  j["integral_rel_error"] = integral_err;
  j["isometry_rel_error"] = isometry_err;
  j["passed"] = pass;
  write_json(dir + "/unfold_report.json", j);
  log << "unfold: integral error " << integral_err << ", isometry error " << isometry_err << "\n";
  return pass ? kPass : kGateFailure;
}

int run_geometry_dump(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const auto domain = c.domain();
  const std::string dir = out_dir(c);
  write_mask_pgm(domain.grid, dir + "/mask.pgm");
  write_mask_csv(domain.grid, dir + "/mask.csv");
  const auto faces = count_faces(domain.grid);
  json j = header(c, "geometry dump");
  j["n"] = domain.n();
  j["eps"] = domain.eps;
  j["porosity"] = porosity(domain);
  j["cell_porosity"] = domain.cell.porosity;
  j["connected"] = pore_connected(domain.grid);
  j["faces"] = {{"interior_pore", faces.interior_pore},
                {"outer_wall", faces.outer_wall},
                {"obstacle_interface", faces.obstacle_interface},
                {"solid", faces.solid}};
  write_json(dir + "/geometry.json", j);
  log << "geometry: " << domain.n() << "^" << domain.grid.dim() << " grid, porosity " << porosity(domain) << "\n";
  return kPass;
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log) {
  static const std::map<std::string, std::function<int(const RunConfig&, const CommandOptions&, std::ostream&)>>
      table = {{"cell", run_cell},   {"micro", run_micro},   {"macro", run_macro},
               {"study", run_study}, {"unfold", run_unfold}, {"geometry dump", run_geometry_dump}};
  const auto it = table.find(name);
  if (it == table.end()) {
    log << "error: unknown command " << name << "\n";
    return kConfigError;
  }
  RunConfig c;
  try {
    c = prepare_config(opts);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    return it->second(c, opts, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    log << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace porehom::app
