#include "monodiss/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace monodiss {

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

nlohmann::json trajectory_metadata(const ExperimentConfig& config, const Trajectory& t) {
  return {{"config", config},
          {"times", t.times},
          {"samples", t.times.size()},
          {"steps", t.steps},
          {"rejections", t.rejections},
          {"final_l2", t.states.empty() ? 0.0 : l2_norm(t.states.back())}};
}

nlohmann::json trajectory_snapshots(const Trajectory& t, const std::vector<double>& times) {
  nlohmann::json out = nlohmann::json::array();
  if (times.empty()) {
    for (std::size_t i = 0; i < t.states.size(); ++i) out.push_back({{"t", t.times[i]}, {"state", t.states[i]}});
    return out;
  }
  for (double want : times) {
    const auto it = std::lower_bound(t.times.begin(), t.times.end(), want);
    if (it == t.times.end()) continue;
    const std::size_t i = static_cast<std::size_t>(it - t.times.begin());
    out.push_back({{"t", t.times[i]}, {"state", t.states[i]}});
  }
  return out;
}

}  // namespace monodiss
