#pragma once

#include "porehom/unfolding.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace porehom::app {

/// Any problem with the configuration file or command-line overrides.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

struct GeometryConfig {
  int dim = 2;
  std::string shape = "disk";
  double radius = 0.25;
  int n_y = 32;
  int m = 4;
};

struct ViscosityConfig {
  std::string kind = "isotropic";  // isotropic | constant | oscillating
  double nu = 1.0;
  Eigen::MatrixXd mandel;  // constant
  double nu0 = 1.0, amplitude = 0.0, rate = 0.0;  // oscillating

  ViscosityModel build(int dim) const;
};

struct PhysicsConfig {
  double lambda = 1.0;
  std::optional<double> lambda_eps;  // micro runs; defaults to lambda + eps
  ViscosityConfig viscosity;
  double c1 = 1.0, c2 = 1.0;
  ForceModel force;
  VelocityInit u0;
  PhaseInit phi0 = StudyConfig::default_phase();
  std::uint64_t seed = phi0.seed;
};

struct NumericsConfig {
  double dt = 1e-3;
  double t_end = 0.1;
  double s0 = 2.0;
  double phi_cap = 1.0;
  SolverOptions solver;
  double cell_tol = 1e-10;
  int cell_max_iter = 200;
  int snapshot_every = 0;  // steps; 0 writes the final state only
  int macro_n = 64;
};

struct StudyBlock {
  std::vector<int> m_list{2, 4, 8};
  double slack = 0.1;
  double phi_floor = 1e-8;
  bool well_prepared = true;
  int compare_every = 10;
};

struct UnfoldBlock {
  std::string field = "phi";  // phi | mu | p
  ExtendMode extend = ExtendMode::cell_mean;
};

struct RunConfig {
  int version = kConfigVersion;
  GeometryConfig geometry;
  PhysicsConfig physics;
  NumericsConfig numerics;
  StudyBlock study;
  UnfoldBlock unfold;
  std::string output_dir = "out";
  nlohmann::json canonical;  // normalized input, the basis of the hash

  SourceModel source() const;
  double eps() const { return 1.0 / geometry.m; }
  double micro_lambda() const { return physics.lambda_eps.value_or(physics.lambda + eps()); }
  UnitCell cell() const;
  PerforatedDomain domain() const;
  MicroParams micro_params() const;
  MacroParams macro_params(const EffectiveTensors& tensors) const;
  StudyConfig study_config(int threads) const;
  CellSolveOptions cell_options() const;

  /// Checks every precondition of the modules the config drives; throws ConfigError.
  void validate() const;
};

/// Parses a version-1 config; unknown keys and wrong types are ConfigErrors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Applies --seed: replaces physics.seed and the phase-field seed.
void override_seed(RunConfig& c, std::uint64_t seed);

std::string sha256_hex(const std::string& data);
std::string config_hash(const RunConfig& c);

}  // namespace porehom::app
