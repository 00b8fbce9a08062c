#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "tsal/foveation.hpp"
#include "tsal/geometry.hpp"
#include "tsal/session.hpp"

namespace tsal::io {

// Every experiment parameter in one place. Defaults reproduce the
// laboratory protocol: 200 px window, Gaussian blur sigma 15 px, 10 s clips at
// 25 fps, 100-frame round budget, 25-frame click cap, 5 rounds, 1280x720 at
// 38.2 degrees / 50 cm, fixation maps blurred with sigma 33 px.
struct ExperimentConfig {
  session::ProtocolParams protocol;
  foveation::WindowSpec window;
  double blur_sigma_px = 15.0;
  geometry::ViewingGeometry geometry = geometry::reference_geometry();
  double fixation_sigma_px = 33.0;
  // Cell size of spatial analysis grids, in stimulus pixels.
  int spatial_downsample = 4;
};

void validate(const ExperimentConfig& config);

// 16 hex digits, FNV-1a over the protocol, window and blur parameters.
// Geometry and analysis settings do not enter the hash.
std::string config_hash(const ExperimentConfig& config);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Missing keys take their defaults. Geometry accepts either screen_width_cm
// or full_width_deg. Throws ParseError / InvalidConfig.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

// FNV-1a 64-bit, used for config and manifest fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace tsal::io
