#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsal/config.hpp"
#include "tsal/io.hpp"
#include "tsal/report.hpp"
#include "tsal/session.hpp"

namespace httplib {
class Server;
}

namespace tsal::service {

struct SessionTicket {
  std::string session_id;
  std::string observer_id;
  std::string video_id;
  session::ProtocolParams protocol;
  foveation::WindowSpec window;
  std::string config_hash;
  std::string issued_at;  // UTC, ISO 8601
};

nlohmann::ordered_json to_json(const SessionTicket& ticket);

struct ServiceOptions {
  io::ExperimentConfig config;
  // One prepared video per subdirectory: <id>/manifest.json and
  // <id>/blurred/manifest.json (written by `tsal prepare`).
  std::filesystem::path assets_dir;
  // Append-only session logs: <data_dir>/<video_id>/<session_id>.jsonl.
  std::filesystem::path data_dir;
};

struct UploadResult {
  bool accepted = false;
  session::ValidationReport report;
};

nlohmann::ordered_json to_json(const session::ValidationReport& report);

// Experiment session service. Clients composite and keep budget accounting
// locally; every uploaded round is re-validated here before it is persisted.
// Thread-safe.
class ExperimentService {
 public:
  explicit ExperimentService(ServiceOptions options);
  ~ExperimentService();

  const io::ExperimentConfig& config() const { return options_.config; }

  // Throws NotFound for an unknown video, NotReady if it has no blurred frames.
  SessionTicket create_session(const std::string& observer_id, const std::string& video_id);

  // Throws NotFound for an unknown session, Conflict for a round that was
  // already accepted. Rounds must arrive in order; anything else is rejected
  // with a report.
  UploadResult upload_round(const std::string& session_id, int round_index,
                            const session::RoundLog& events);

  // Serialized results_document for all complete sessions of a video.
  // Cached per (video, spec, split options) until the next accepted upload.
  // Throws NoData when no session is complete.
  std::string results(const std::string& video_id, const aggregate::AggregationSpec& spec,
                      const report::SplitOptions& split);

  nlohmann::ordered_json manifest(const std::string& video_id);
  // Path of frame n of the sharp or blurred sequence.
  std::filesystem::path frame_path(const std::string& video_id, int frame_index, bool blurred);

  std::vector<session::SessionLog> complete_logs(const std::string& video_id);

 private:
  struct Video {
    io::VideoAsset sharp;
    std::optional<io::VideoAsset> blurred;
  };
  struct OpenSession {
    SessionTicket ticket;
    std::filesystem::path log_path;
    int next_round = 0;
    std::mutex upload_mutex;
  };

  const Video& video(const std::string& video_id);
  void restore_sessions();
  std::string new_session_id();

  ServiceOptions options_;
  std::string config_hash_;
  std::mutex mutex_;
  std::map<std::string, Video> videos_;
  std::map<std::string, std::unique_ptr<OpenSession>> sessions_;
  std::map<std::string, std::uint64_t> video_versions_;
  std::map<std::string, std::pair<std::uint64_t, std::string>> results_cache_;
  std::mutex results_mutex_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

// Routes:
//   POST /sessions                       {"observer_id", "video_id"} -> ticket
//   GET  /videos/{id}/manifest
//   GET  /videos/{id}/frames/{n}?variant=blurred|sharp
//   POST /sessions/{id}/rounds/{n}       {"events": [...]} -> validation report
//   GET  /videos/{id}/results?spec=C1-5W&group_size=15&splits=100&seed=0
std::unique_ptr<httplib::Server> make_http_server(ExperimentService& service);

// Blocks until the server stops.
void serve(ExperimentService& service, const std::string& host, int port);

// Frame event list as used in upload bodies: [{"frame","x","y","deblurred","hold"}].
session::RoundLog events_from_json(const nlohmann::json& j);
nlohmann::json events_to_json(const session::RoundLog& events);

}  // namespace tsal::service
