#include "tsal/config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "tsal/error.hpp"

namespace tsal::io {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

void validate(const ExperimentConfig& config) {
  session::validate(config.protocol);
  geometry::validate(config.geometry);
  if (!(config.window.radius_px > 0.0) || !(config.window.feather_px >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "window radius must be positive, feather non-negative");
  }
  if (!(config.blur_sigma_px >= 0.0)) throw Error(ErrorCode::InvalidConfig, "blur sigma must be >= 0");
  if (!(config.fixation_sigma_px > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "fixation sigma must be positive");
  }
  if (config.spatial_downsample < 1) {
    throw Error(ErrorCode::InvalidConfig, "spatial downsample must be >= 1");
  }
}

std::string config_hash(const ExperimentConfig& config) {
  const auto& p = config.protocol;
  const std::string canonical = fmt::format(
      "fps={};duration={};rounds={};budget={};cap={};radius={};feather={};blur={}", p.fps,
      p.duration_frames, p.rounds, p.round_budget_frames, p.click_cap_frames,
      config.window.radius_px, config.window.feather_px, config.blur_sigma_px);
  return hex64(fnv1a64(canonical));
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["protocol"] = {{"fps", c.protocol.fps},
                   {"duration_frames", c.protocol.duration_frames},
                   {"rounds", c.protocol.rounds},
                   {"round_budget_frames", c.protocol.round_budget_frames},
                   {"click_cap_frames", c.protocol.click_cap_frames}};
  j["window"] = {{"radius_px", c.window.radius_px}, {"feather_px", c.window.feather_px}};
  j["blur_sigma_px"] = c.blur_sigma_px;
  j["geometry"] = {{"width_px", c.geometry.resolution_px.width},
                   {"height_px", c.geometry.resolution_px.height},
                   {"distance_cm", c.geometry.distance_cm},
                   {"screen_width_cm", c.geometry.screen_width_cm}};
  j["fixation_sigma_px"] = c.fixation_sigma_px;
  j["spatial_downsample"] = c.spatial_downsample;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
    if (j.contains("protocol")) {
      const auto& p = j.at("protocol");
      c.protocol.fps = p.value("fps", c.protocol.fps);
      c.protocol.duration_frames = p.value("duration_frames", c.protocol.duration_frames);
      c.protocol.rounds = p.value("rounds", c.protocol.rounds);
      c.protocol.round_budget_frames = p.value("round_budget_frames", c.protocol.round_budget_frames);
      c.protocol.click_cap_frames = p.value("click_cap_frames", c.protocol.click_cap_frames);
    }
    if (j.contains("window")) {
      c.window.radius_px = j.at("window").value("radius_px", c.window.radius_px);
      c.window.feather_px = j.at("window").value("feather_px", c.window.feather_px);
    }
    c.blur_sigma_px = j.value("blur_sigma_px", c.blur_sigma_px);
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      const geometry::Resolution res{g.value("width_px", 1280), g.value("height_px", 720)};
      const double distance = g.value("distance_cm", 50.0);
      if (g.contains("screen_width_cm")) {
        c.geometry = {res, distance, g.at("screen_width_cm").get<double>()};
      } else {
        c.geometry = geometry::geometry_from_extent(res, g.value("full_width_deg", 38.2), distance);
      }
    }
    c.fixation_sigma_px = j.value("fixation_sigma_px", c.fixation_sigma_px);
    c.spatial_downsample = j.value("spatial_downsample", c.spatial_downsample);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write config " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace tsal::io
