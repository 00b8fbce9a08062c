#include "tsal/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tsal/config.hpp"
#include "tsal/error.hpp"
#include "tsal/image.hpp"

namespace tsal::io {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

Frame VideoAsset::load_frame(int index) const {
  if (index < 0 || index >= duration_frames()) {
    throw Error(ErrorCode::NotFound, fmt::format("frame {} outside 0..{}", index, duration_frames() - 1));
  }
  Frame f = read_image(frame_paths[index]);
  if (f.width != resolution.width || f.height != resolution.height) {
    throw Error(ErrorCode::AssetError, "frame size changed on disk: " + frame_paths[index].string());
  }
  return f;
}

VideoAsset load_frame_sequence(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::ManifestError, "manifest not found: " + manifest_path.string());
  }
  const std::string text = read_text(manifest_path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ManifestError, manifest_path.string() + ": " + e.what());
  }
  VideoAsset asset;
  try {
    asset.video_id = j.at("video_id").get<std::string>();
    asset.fps = j.value("fps", 25);
    const fs::path base = manifest_path.parent_path();
    for (const auto& entry : j.at("frames")) asset.frame_paths.push_back(base / entry.get<std::string>());
    if (j.contains("width")) {
      asset.resolution = {j.at("width").get<int>(), j.at("height").get<int>()};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestError, manifest_path.string() + ": " + e.what());
  }
  if (asset.frame_paths.empty()) {
    throw Error(ErrorCode::ManifestError, "manifest lists no frames: " + manifest_path.string());
  }
  if (asset.fps <= 0) throw Error(ErrorCode::ManifestError, "fps must be positive");
  for (const fs::path& p : asset.frame_paths) {
    if (!fs::exists(p)) throw Error(ErrorCode::ManifestError, "missing frame " + p.string());
  }
  for (const fs::path& p : asset.frame_paths) {
    const geometry::Resolution r = image_size(p);
    if (asset.resolution.width == 0) asset.resolution = r;
    if (!(r == asset.resolution)) {
      throw Error(ErrorCode::AssetError,
                  fmt::format("frame {} is {}x{}, expected {}x{}", p.string(), r.width, r.height,
                              asset.resolution.width, asset.resolution.height));
    }
  }
  asset.manifest_hash = hex64(fnv1a64(text));
  return asset;
}

void write_manifest(const fs::path& manifest_path, const std::string& video_id, int fps,
                    geometry::Resolution resolution, const std::vector<fs::path>& frame_paths) {
  ordered_json j;
  j["video_id"] = video_id;
  j["fps"] = fps;
  j["width"] = resolution.width;
  j["height"] = resolution.height;
  j["frames"] = json::array();
  const fs::path base = manifest_path.parent_path();
  for (const fs::path& p : frame_paths) {
    j["frames"].push_back(p.is_absolute() ? fs::relative(p, base).generic_string() : p.generic_string());
  }
  write_text(manifest_path, j.dump(2) + "\n");
}

std::string log_header_line(const session::SessionLog& log, int duration_frames) {
  ordered_json j;
  j["type"] = "header";
  j["format"] = "tsal-log/1";
  j["observer_id"] = log.observer_id;
  j["video_id"] = log.video_id;
  j["config_hash"] = log.config_hash;
  j["duration_frames"] = duration_frames;
  return j.dump() + "\n";
}

std::string round_lines(const session::RoundLog& events, int round_index) {
  std::string out;
  for (const auto& e : events) {
    ordered_json j;
    j["round"] = round_index;
    j["frame"] = e.frame_index;
    j["x"] = e.cursor_x;
    j["y"] = e.cursor_y;
    j["deblurred"] = e.deblurred;
    j["hold"] = e.hold;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_log(const session::SessionLog& log) {
  const int duration = log.rounds.empty() ? 0 : static_cast<int>(log.rounds.front().size());
  std::string out = log_header_line(log, duration);
  for (std::size_t r = 0; r < log.rounds.size(); ++r) out += round_lines(log.rounds[r], static_cast<int>(r));
  return out;
}

session::SessionLog parse_log(const std::string& text) {
  session::SessionLog log;
  int duration = -1;
  int line_no = 0;
  std::size_t pos = 0;
  auto fail = [&line_no](const std::string& why) {
    throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, why));
  };

  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? text.size() : nl;
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) fail("empty line");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    try {
      if (line_no == 1) {
        if (j.value("type", "") != "header") fail("first line must be the header");
        log.observer_id = j.at("observer_id").get<std::string>();
        log.video_id = j.at("video_id").get<std::string>();
        log.config_hash = j.at("config_hash").get<std::string>();
        duration = j.at("duration_frames").get<int>();
        if (duration < 0) fail("negative duration");
        continue;
      }
      session::FrameEvent e;
      const int round = j.at("round").get<int>();
      e.frame_index = j.at("frame").get<int>();
      e.cursor_x = j.at("x").get<double>();
      e.cursor_y = j.at("y").get<double>();
      e.deblurred = j.at("deblurred").get<bool>();
      e.hold = j.at("hold").get<int>();

      const bool round_open = !log.rounds.empty() && static_cast<int>(log.rounds.back().size()) < duration;
      if (round_open) {
        if (round != static_cast<int>(log.rounds.size()) - 1) fail("round changed before it was complete");
      } else {
        if (round != static_cast<int>(log.rounds.size())) fail(fmt::format("expected round {}", log.rounds.size()));
        log.rounds.emplace_back();
      }
      if (e.frame_index != static_cast<int>(log.rounds.back().size())) {
        fail(fmt::format("expected frame {}", log.rounds.back().size()));
      }
      log.rounds.back().push_back(e);
    } catch (const json::exception& e) {
      fail(e.what());
    }
  }
  if (line_no == 0) {
    line_no = 1;
    fail("empty log");
  }
  if (!log.rounds.empty() && static_cast<int>(log.rounds.back().size()) < duration) {
    ++line_no;
    fail(fmt::format("log ends inside round {} after {} of {} frames", log.rounds.size() - 1,
                     log.rounds.back().size(), duration));
  }
  return log;
}

session::SessionLog read_log(const fs::path& path) {
  try {
    return parse_log(read_text(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_log(const fs::path& path, const session::SessionLog& log) {
  write_text(path, serialize_log(log));
}

std::vector<session::SessionLog> read_logs_dir(const fs::path& dir,
                                               const std::optional<std::string>& video_id) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::NoData, "no log directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<session::SessionLog> logs;
  for (const fs::path& f : files) {
    session::SessionLog log = read_log(f);
    if (!video_id || log.video_id == *video_id) logs.push_back(std::move(log));
  }
  return logs;
}

std::string temporal_csv(const std::vector<aggregate::TemporalSaliencyMap>& maps) {
  std::string out = "frame_index";
  std::size_t frames = 0;
  for (const auto& m : maps) {
    out += "," + m.spec.name();
    if (frames != 0 && m.scores.size() != frames) {
      throw Error(ErrorCode::DurationMismatch, "maps differ in length");
    }
    frames = m.scores.size();
  }
  out += '\n';
  for (std::size_t f = 0; f < frames; ++f) {
    out += std::to_string(f);
    for (const auto& m : maps) out += fmt::format(",{}", m.scores[f]);
    out += '\n';
  }
  return out;
}

std::string metrics_csv(const std::vector<spatial::FrameScores>& scores) {
  std::string out = "frame_index,auc,nss\n";
  for (std::size_t f = 0; f < scores.size(); ++f) {
    out += std::to_string(f) + ",";
    if (scores[f].auc) out += fmt::format("{}", *scores[f].auc);
    out += ",";
    if (scores[f].nss) out += fmt::format("{}", *scores[f].nss);
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<double>>> parse_csv_columns(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line_no == 1) {
      for (const auto& c : cells) cols.push_back({c, {}});
      continue;
    }
    if (cells.size() != cols.size()) {
      throw Error(ErrorCode::ParseError, fmt::format("csv line {}: expected {} cells", line_no, cols.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        cols[i].second.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, fmt::format("csv line {}: bad number '{}'", line_no, cells[i]));
      }
    }
  }
  return cols;
}

ordered_json to_json(const aggregate::AggregationSpec& spec) {
  ordered_json j;
  j["name"] = spec.name();
  j["rounds"] = spec.rounds_used;
  j["weights"] = spec.weights;
  return j;
}

ordered_json to_json(const aggregate::TemporalSaliencyMap& map) {
  ordered_json j;
  j["video_id"] = map.video_id;
  j["spec"] = to_json(map.spec);
  j["n_observers"] = map.n_observers;
  j["normalized"] = map.normalized;
  j["scores"] = map.scores;
  return j;
}

ordered_json to_json(const consistency::ConsistencyReport& r) {
  ordered_json j;
  j["video_id"] = r.video_id;
  j["spec"] = to_json(r.spec);
  j["group_size"] = r.group_size;
  j["n_splits"] = r.n_splits;
  j["seed"] = r.seed;
  j["pcc_mean"] = r.pcc_mean;
  j["pcc_std"] = r.pcc_std;
  j["ks_p_mean"] = r.ks_p_mean;
  j["degenerate_pcc_splits"] = r.degenerate_pcc_splits;
  j["degenerate_ks_splits"] = r.degenerate_ks_splits;
  j["pcc_per_split"] = r.pcc_per_split;
  j["ks_p_per_split"] = r.ks_p_per_split;
  return j;
}

simulate::GroundTruth ground_truth_from_json(const json& j) {
  try {
    const std::string video_id = j.value("video_id", "synthetic");
    const geometry::Resolution res{j.value("width", 1280), j.value("height", 720)};
    const int duration = j.value("duration_frames", 250);
    if (j.contains("preset")) {
      const std::string preset = j.at("preset").get<std::string>();
      if (preset == "three-peak") return simulate::three_peak_ground_truth(video_id, duration, res);
      if (preset == "flat") return simulate::flat_ground_truth(video_id, duration, res);
      throw Error(ErrorCode::InvalidConfig, "unknown ground truth preset '" + preset + "'");
    }
    if (j.contains("peaks")) {
      std::vector<simulate::PeakSpec> peaks;
      for (const auto& p : j.at("peaks")) {
        simulate::PeakSpec spec;
        spec.center_frame = p.at("center").get<double>();
        spec.width_frames = p.value("width", spec.width_frames);
        spec.weight = p.value("weight", spec.weight);
        const std::string shape = p.value("shape", "gaussian");
        if (shape == "box") {
          spec.shape = simulate::PeakShape::Box;
        } else if (shape != "gaussian") {
          throw Error(ErrorCode::InvalidConfig, "unknown peak shape '" + shape + "'");
        }
        spec.location = {p.value("x", res.width / 2.0), p.value("y", res.height / 2.0)};
        peaks.push_back(spec);
      }
      return simulate::ground_truth_from_peaks(video_id, duration, res, peaks, j.value("baseline", 0.0));
    }
    simulate::GroundTruth gt;
    gt.video_id = video_id;
    gt.resolution = res;
    gt.temporal_density = j.at("density").get<std::vector<double>>();
    double total = 0.0;
    for (double d : gt.temporal_density) total += d;
    if (total > 0.0) {
      for (double& d : gt.temporal_density) d /= total;
    }
    if (j.contains("centers")) {
      for (const auto& c : j.at("centers")) gt.spatial_centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    } else {
      gt.spatial_centers.assign(gt.temporal_density.size(), {res.width / 2.0, res.height / 2.0});
    }
    simulate::validate(gt);
    return gt;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ground truth: ") + e.what());
  }
}

simulate::GroundTruth load_ground_truth(const fs::path& path) {
  try {
    return ground_truth_from_json(json::parse(read_text(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace tsal::io
