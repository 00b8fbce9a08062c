#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsal/aggregate.hpp"
#include "tsal/consistency.hpp"
#include "tsal/frame.hpp"
#include "tsal/geometry.hpp"
#include "tsal/session.hpp"
#include "tsal/simulate.hpp"
#include "tsal/spatial.hpp"

namespace tsal::io {

// A numbered image sequence described by a JSON manifest:
//   {"video_id": "...", "fps": 25, "width": 1280, "height": 720,
//    "frames": ["frames/00000.ppm", ...]}
// Frame paths are relative to the manifest's directory. Frames are decoded
// on demand.
struct VideoAsset {
  std::string video_id;
  std::vector<std::filesystem::path> frame_paths;
  int fps = 25;
  geometry::Resolution resolution;
  std::string manifest_hash;

  int duration_frames() const { return static_cast<int>(frame_paths.size()); }
  Frame load_frame(int index) const;
};

// Verifies that every frame exists and has the declared resolution (or the
// first frame's when the manifest omits it). Throws ManifestError for a
// missing or empty manifest or a missing frame, AssetError naming the first
// frame with the wrong size.
VideoAsset load_frame_sequence(const std::filesystem::path& manifest_path);

// Writes a manifest whose frame entries are relative to manifest_path's directory.
void write_manifest(const std::filesystem::path& manifest_path, const std::string& video_id,
                    int fps, geometry::Resolution resolution,
                    const std::vector<std::filesystem::path>& frame_paths);

// Session logs are line-delimited JSON. Line 1 is a header,
//   {"type":"header","format":"tsal-log/1","observer_id":..,"video_id":..,
//    "config_hash":..,"duration_frames":N}
// and every further line one frame event,
//   {"round":r,"frame":f,"x":..,"y":..,"deblurred":b,"hold":h}
// with rounds stored complete and in order.
std::string log_header_line(const session::SessionLog& log, int duration_frames);
std::string round_lines(const session::RoundLog& events, int round_index);
std::string serialize_log(const session::SessionLog& log);

// Throws ParseError carrying the 1-based line number of the first bad line;
// a log that ends inside a round reports the line after the last one.
session::SessionLog parse_log(const std::string& text);

session::SessionLog read_log(const std::filesystem::path& path);
void write_log(const std::filesystem::path& path, const session::SessionLog& log);

// All *.jsonl files of a directory in file-name order, optionally keeping
// only one video.
std::vector<session::SessionLog> read_logs_dir(const std::filesystem::path& dir,
                                               const std::optional<std::string>& video_id = {});

// frame_index followed by one column per map, headed by the spec name.
std::string temporal_csv(const std::vector<aggregate::TemporalSaliencyMap>& maps);
// frame_index,auc,nss; undefined scores are left empty.
std::string metrics_csv(const std::vector<spatial::FrameScores>& scores);

// Inverse of temporal_csv: column name -> values.
std::vector<std::pair<std::string, std::vector<double>>> parse_csv_columns(const std::string& text);

nlohmann::ordered_json to_json(const aggregate::AggregationSpec& spec);
nlohmann::ordered_json to_json(const aggregate::TemporalSaliencyMap& map);
nlohmann::ordered_json to_json(const consistency::ConsistencyReport& report);

// Ground truth document. Either a preset,
//   {"preset": "three-peak" | "flat", "video_id": .., "duration_frames": ..,
//    "width": .., "height": ..}
// a named peak list,
//   {"peaks": [{"center": 50, "width": 6, "weight": 1, "shape": "gaussian",
//               "x": 384, "y": 288}, ...], "baseline": 0, ...}
// or an explicit density with optional per-frame centres,
//   {"density": [...], "centers": [[x, y], ...]}.
simulate::GroundTruth ground_truth_from_json(const nlohmann::json& j);
simulate::GroundTruth load_ground_truth(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tsal::io
