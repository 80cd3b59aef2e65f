#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "monodiss/config.hpp"
#include "monodiss/evolution.hpp"

namespace monodiss {

/// Creates parent directories; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

/// Metadata of a trajectory: resolved config, sample times, step and
/// rejection counts. Wall time is left out so output is reproducible.
nlohmann::json trajectory_metadata(const ExperimentConfig& config, const Trajectory& t);

/// Serialized states at the requested times (nearest sample at or after
/// each); empty `times` selects every sample.
nlohmann::json trajectory_snapshots(const Trajectory& t, const std::vector<double>& times = {});

}  // namespace monodiss
