#pragma once

#include "porehom/unfolding.hpp"

#include <json.hpp>

#include <string>

namespace porehom::app {

const char* version_string();

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

/// Full-grid little-endian float64 dump (axis-0 fastest, NaN on solid voxels)
/// with a JSON sidecar <stem>.json describing role, shape, h, t and eps.
void write_scalar_snapshot(const std::string& stem, const ScalarField& field, double eps);
/// Cell-centered velocity: dim consecutive full-grid blocks, one per component.
void write_velocity_snapshot(const std::string& stem, const VectorField& u, double eps);
void write_state_snapshots(const std::string& dir, const std::string& tag, const FlowState& s, double eps);

nlohmann::json matrix_json(const Eigen::MatrixXd& m);
nlohmann::json tensors_json(const EffectiveTensors& e);
nlohmann::json checks_json(const std::vector<TensorCheck>& checks);
nlohmann::json trace_summary(const EnergyTrace& trace, double slack_per_step);

}  // namespace porehom::app
