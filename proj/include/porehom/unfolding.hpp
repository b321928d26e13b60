#pragma once

#include "porehom/cell_problems.hpp"
#include "porehom/macro_solver.hpp"
#include "porehom/micro_nsch.hpp"

#include <limits>
#include <string>
#include <vector>

namespace porehom {

/// Values indexed by (macro cell kappa, micro voxel y). Solid voxels hold NaN
/// and are flagged absent.
struct UnfoldedField {
  int dim = 2;
  int m = 1;    // cells per side, eps = 1/m
  int n_y = 1;  // voxels per cell side
  double eps = 1.0;
  std::vector<double> values;  // kappa-major: values[kappa * cell_size + y]
  std::vector<std::uint8_t> present;

  std::size_t num_cells() const;
  std::size_t cell_size() const;
  double at(std::size_t kappa, std::size_t y) const { return values[kappa * cell_size() + y]; }
  bool has(std::size_t kappa, std::size_t y) const { return present[kappa * cell_size() + y] != 0; }

  /// sum over (kappa, y) of value * eps^dim * (1/n_y)^dim, skipping absent voxels.
  double integral() const;
  double sum_squares() const;
};

/// Global voxel of (kappa, y) on the domain grid.
std::size_t global_voxel(const PerforatedDomain& domain, std::size_t kappa, std::size_t y);

/// Unfolds a full-grid field (one value per grid cell; solid entries ignored).
UnfoldedField unfold(const PerforatedDomain& domain, const Vector& grid_values);
/// Unfolds a pore field whose mesh lives on the domain grid.
UnfoldedField unfold(const PerforatedDomain& domain, const ScalarField& field);

enum class ExtendMode { cell_mean, harmonic };

ExtendMode parse_extend_mode(const std::string& name);
std::string to_string(ExtendMode mode);

/// Fills solid voxels; pore voxels keep their values. Result has one entry per grid cell.
///  cell_mean: each solid voxel takes the pore mean of its own periodic cell.
///  harmonic: discrete Laplace in-fill with the pore values as Dirichlet data.
Vector extend(const PerforatedDomain& domain, const ScalarField& field, ExtendMode mode = ExtendMode::cell_mean);

struct ErrorRow {
  double t = 0.0;
  double phi_error = 0.0;  // L2(Omega_p) norm of phi_eps - phi
  double u_error = 0.0;    // L2(Omega_p) norm of u_eps / sqrt(lambda_eps) - u
  double phi_norm = 0.0;   // L2(Omega_p) norm of the sampled macro phi
  double u_norm = 0.0;
};

/// Samples the macro fields bilinearly at micro cell centers and measures the
/// pore L2 errors. Velocities are compared at cell centers.
ErrorRow compare_micro_macro(const FlowState& micro, double lambda_eps, const FlowState& macro,
                             double time_tol = 1e-9);

struct EnergyDeviation {
  std::vector<double> t;
  std::vector<double> d;  // |T_eps / lambda_eps - |Y_p| T|
  double sup = 0.0;
  double at_end = 0.0;
};

/// Throws std::invalid_argument when the traces are not on the same time grid.
EnergyDeviation energy_convergence(const EnergyTrace& micro, double lambda_eps, const EnergyTrace& macro,
                                   double pore_fraction, double time_tol = 1e-9);

/// b_{k+1} <= max((1 + slack) b_k, floor) for a sequence ordered by decreasing eps.
bool non_increasing(const std::vector<double>& values, double slack, double floor = 0.0);

struct StudyConfig {
  int dim = 2;
  double radius = 0.25;
  int n_y = 32;
  std::vector<int> m_list{2, 4, 8};  // eps = 1/m, strictly increasing m
  double lambda = 1.0;               // lambda_eps = lambda + eps
  SourceModel source = SourceModel::linear(1.0);
  ForceModel force;
  VelocityInit u0;
  PhaseInit phi0 = default_phase();
  bool well_prepared = true;  // corrector-adjusted micro phi0
  double dt = 2e-3;
  double t_end = 0.5;
  double s0 = 2.0;
  double phi_cap = 1.0;
  int macro_n = 256;
  double slack = 0.1;
  double phi_floor = 1e-8;  // phi errors below phi_floor * |phi| count as converged
  int compare_every = 10;   // steps between micro/macro comparisons
  SolverOptions solver;
  CellSolveOptions cell;
  int threads = 1;

  void validate() const;
  static PhaseInit default_phase();
};

struct StudyRow {
  int m = 0;
  double eps = 0.0;
  double lambda_eps = 0.0;
  ErrorRow error;                 // at t_end
  std::vector<ErrorRow> history;  // every compare_every steps, t = 0 included
  double phi_error_sup = 0.0;
  double u_error_sup = 0.0;
  EnergyDeviation energy;
  double runtime = 0.0;  // seconds
  EnergyTrace trace;
};

struct StudyReport {
  StudyConfig config;
  EffectiveTensors tensors;
  EnergyTrace macro_trace;
  double macro_runtime = 0.0;
  std::vector<StudyRow> rows;  // eps strictly decreasing
  bool phi_monotone = false;      // phi error at t_end
  bool phi_sup_monotone = false;  // sup over the comparison times
  bool energy_monotone = false;

  bool passed() const { return phi_monotone && phi_sup_monotone && energy_monotone; }
  /// One line per eps; the runtime column is optional because it is not reproducible.
  std::string rows_csv(bool with_runtime = false) const;
};

/// Cell solve, one macro run, one micro run per eps (in parallel up to
/// `threads`), then the comparisons and verdicts.
StudyReport run_study(const StudyConfig& config);

}  // namespace porehom
