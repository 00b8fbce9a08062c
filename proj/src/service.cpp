#include "tsal/service.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <httplib.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include "tsal/error.hpp"
#include "tsal/random.hpp"

namespace tsal::service {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const SessionTicket& t) {
  ordered_json j;
  j["session_id"] = t.session_id;
  j["observer_id"] = t.observer_id;
  j["video_id"] = t.video_id;
  j["config"] = {{"protocol",
                  {{"fps", t.protocol.fps},
                   {"duration_frames", t.protocol.duration_frames},
                   {"rounds", t.protocol.rounds},
                   {"round_budget_frames", t.protocol.round_budget_frames},
                   {"click_cap_frames", t.protocol.click_cap_frames}}},
                 {"window", {{"radius_px", t.window.radius_px}, {"feather_px", t.window.feather_px}}}};
  j["config_hash"] = t.config_hash;
  j["issued_at"] = t.issued_at;
  return j;
}

ordered_json to_json(const session::ValidationReport& report) {
  ordered_json j;
  j["accepted"] = report.accepted();
  j["violations"] = json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back(
        {{"kind", session::to_string(v.kind)}, {"round", v.round}, {"frame", v.frame}, {"detail", v.detail}});
  }
  return j;
}

session::RoundLog events_from_json(const json& j) {
  session::RoundLog events;
  try {
    for (const auto& e : j) {
      events.push_back({e.at("frame").get<int>(), e.at("x").get<double>(), e.at("y").get<double>(),
                        e.at("deblurred").get<bool>(), e.value("hold", 0)});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("events: ") + e.what());
  }
  return events;
}

json events_to_json(const session::RoundLog& events) {
  json out = json::array();
  for (const auto& e : events) {
    out.push_back({{"frame", e.frame_index}, {"x", e.cursor_x}, {"y", e.cursor_y},
                   {"deblurred", e.deblurred}, {"hold", e.hold}});
  }
  return out;
}

ExperimentService::ExperimentService(ServiceOptions options)
    : options_(std::move(options)), config_hash_(io::config_hash(options_.config)) {
  io::validate(options_.config);
  id_salt_ = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  fs::create_directories(options_.data_dir);
  restore_sessions();
}

ExperimentService::~ExperimentService() = default;

void ExperimentService::restore_sessions() {
  for (const auto& dir : fs::directory_iterator(options_.data_dir)) {
    if (!dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(dir.path())) {
      if (file.path().extension() != ".jsonl") continue;
      try {
        const session::SessionLog log = io::read_log(file.path());
        if (log.config_hash != config_hash_) continue;
        auto open = std::make_unique<OpenSession>();
        open->ticket = {file.path().stem().string(), log.observer_id, log.video_id,
                        options_.config.protocol, options_.config.window, config_hash_, ""};
        open->log_path = file.path();
        open->next_round = static_cast<int>(log.rounds.size());
        sessions_.emplace(open->ticket.session_id, std::move(open));
      } catch (const Error& e) {
        std::cerr << "skipping unreadable session log: " << e.what() << '\n';
      }
    }
  }
}

const ExperimentService::Video& ExperimentService::video(const std::string& video_id) {
  if (auto it = videos_.find(video_id); it != videos_.end()) return it->second;
  if (video_id.empty() || video_id.find('/') != std::string::npos || video_id.find("..") != std::string::npos) {
    throw Error(ErrorCode::NotFound, "unknown video '" + video_id + "'");
  }
  const fs::path dir = options_.assets_dir / video_id;
  if (!fs::exists(dir / "manifest.json")) throw Error(ErrorCode::NotFound, "unknown video '" + video_id + "'");
  Video v{io::load_frame_sequence(dir / "manifest.json"), std::nullopt};
  if (fs::exists(dir / "blurred" / "manifest.json")) {
    v.blurred = io::load_frame_sequence(dir / "blurred" / "manifest.json");
    if (v.blurred->duration_frames() != v.sharp.duration_frames()) v.blurred.reset();
  }
  return videos_.emplace(video_id, std::move(v)).first->second;
}

std::string ExperimentService::new_session_id() {
  std::string id;
  do {
    id = fmt::format("{:016x}", derive_seed(id_salt_, id_counter_++));
  } while (sessions_.contains(id));
  return id;
}

SessionTicket ExperimentService::create_session(const std::string& observer_id, const std::string& video_id) {
  if (observer_id.empty()) throw Error(ErrorCode::InvalidConfig, "observer_id is required");
  std::lock_guard lock(mutex_);
  const Video& v = video(video_id);
  if (!v.blurred) throw Error(ErrorCode::NotReady, "video '" + video_id + "' has no prepared blurred frames");
  if (v.sharp.duration_frames() != options_.config.protocol.duration_frames) {
    throw Error(ErrorCode::NotReady,
                fmt::format("video '{}' has {} frames, protocol expects {}", video_id,
                            v.sharp.duration_frames(), options_.config.protocol.duration_frames));
  }

  auto open = std::make_unique<OpenSession>();
  open->ticket.session_id = new_session_id();
  open->ticket.observer_id = observer_id;
  open->ticket.video_id = video_id;
  open->ticket.protocol = options_.config.protocol;
  open->ticket.window = options_.config.window;
  open->ticket.config_hash = config_hash_;
  open->ticket.issued_at =
      fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now())));
  open->log_path = options_.data_dir / video_id / (open->ticket.session_id + ".jsonl");

  fs::create_directories(open->log_path.parent_path());
  session::SessionLog header{observer_id, video_id, config_hash_, {}};
  io::write_text(open->log_path, io::log_header_line(header, options_.config.protocol.duration_frames));

  SessionTicket ticket = open->ticket;
  sessions_.emplace(ticket.session_id, std::move(open));
  return ticket;
}

UploadResult ExperimentService::upload_round(const std::string& session_id, int round_index,
                                             const session::RoundLog& events) {
  OpenSession* open = nullptr;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + session_id + "'");
    open = it->second.get();
  }
  std::lock_guard upload_lock(open->upload_mutex);
  const auto& p = options_.config.protocol;
  if (round_index < open->next_round) {
    throw Error(ErrorCode::Conflict, fmt::format("round {} of session {} was already accepted", round_index, session_id));
  }
  UploadResult result;
  if (round_index != open->next_round || round_index >= p.rounds) {
    result.report.violations.push_back(
        {session::ViolationKind::RoundCount, round_index, -1,
         fmt::format("expected round {} of {}", open->next_round, p.rounds)});
    return result;
  }
  result.report.violations = session::validate_round(events, round_index, p);
  if (!result.report.accepted()) return result;

  std::ofstream out(open->log_path, std::ios::binary | std::ios::app);
  out << io::round_lines(events, round_index);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "failed to persist round to " + open->log_path.string());
  ++open->next_round;
  result.accepted = true;
  {
    std::lock_guard lock(mutex_);
    ++video_versions_[open->ticket.video_id];
  }
  return result;
}

std::vector<session::SessionLog> ExperimentService::complete_logs(const std::string& video_id) {
  const fs::path dir = options_.data_dir / video_id;
  if (!fs::is_directory(dir)) return {};
  return report::complete_cohort(io::read_logs_dir(dir, video_id), options_.config);
}

std::string ExperimentService::results(const std::string& video_id, const aggregate::AggregationSpec& spec,
                                       const report::SplitOptions& split) {
  aggregate::validate(spec, options_.config.protocol.rounds);
  const std::string key = fmt::format("{}|{}|{}|{}|{}", video_id, io::to_json(spec).dump(), split.group_size,
                                      split.n_splits, split.seed);
  std::lock_guard results_lock(results_mutex_);
  std::uint64_t version = 0;
  {
    std::lock_guard lock(mutex_);
    version = video_versions_[video_id];
    if (auto it = results_cache_.find(key); it != results_cache_.end() && it->second.first == version) {
      return it->second.second;
    }
  }
  const auto logs = complete_logs(video_id);
  if (logs.empty()) throw Error(ErrorCode::NoData, "no complete sessions for video '" + video_id + "'");
  std::string body = report::results_document(logs, video_id, spec, split).dump() + "\n";
  std::lock_guard lock(mutex_);
  results_cache_[key] = {version, body};
  return body;
}

ordered_json ExperimentService::manifest(const std::string& video_id) {
  std::lock_guard lock(mutex_);
  const Video& v = video(video_id);
  ordered_json j;
  j["video_id"] = video_id;
  j["fps"] = v.sharp.fps;
  j["width"] = v.sharp.resolution.width;
  j["height"] = v.sharp.resolution.height;
  j["duration_frames"] = v.sharp.duration_frames();
  j["prepared"] = v.blurred.has_value();
  j["frame_url"] = fmt::format("/videos/{}/frames/{{n}}?variant={{blurred|sharp}}", video_id);
  return j;
}

fs::path ExperimentService::frame_path(const std::string& video_id, int frame_index, bool blurred) {
  std::lock_guard lock(mutex_);
  const Video& v = video(video_id);
  const io::VideoAsset* asset = &v.sharp;
  if (blurred) {
    if (!v.blurred) throw Error(ErrorCode::NotReady, "video '" + video_id + "' is not prepared");
    asset = &*v.blurred;
  }
  if (frame_index < 0 || frame_index >= asset->duration_frames()) {
    throw Error(ErrorCode::NotFound, fmt::format("no frame {}", frame_index));
  }
  return asset->frame_paths[frame_index];
}

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::NoData: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::NotReady: return 503;
    case ErrorCode::Rejected: return 422;
    case ErrorCode::ParseError:
    case ErrorCode::InvalidConfig: return 400;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

template <typename Handler>
auto guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      ordered_json j{{"error", to_string(e.code())}, {"message", e.what()}};
      send_json(res, status_for(e.code()), j.dump());
    } catch (const json::exception& e) {
      send_json(res, 400, ordered_json{{"error", "ParseError"}, {"message", e.what()}}.dump());
    }
  };
}

int int_param(const httplib::Request& req, const std::string& name, int fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return std::stoi(req.get_param_value(name));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad integer for '" + name + "'");
  }
}

}  // namespace

std::unique_ptr<httplib::Server> make_http_server(ExperimentService& service) {
  auto server = std::make_unique<httplib::Server>();

  server->Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const SessionTicket ticket =
        service.create_session(body.at("observer_id").get<std::string>(), body.at("video_id").get<std::string>());
    send_json(res, 201, to_json(ticket).dump());
  }));

  server->Get(R"(/videos/([^/]+)/manifest)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, service.manifest(req.matches[1]).dump());
  }));

  server->Get(R"(/videos/([^/]+)/frames/(\d+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const std::string variant = req.has_param("variant") ? req.get_param_value("variant") : "blurred";
    if (variant != "blurred" && variant != "sharp") {
      throw Error(ErrorCode::InvalidConfig, "variant must be blurred or sharp");
    }
    const fs::path path = service.frame_path(req.matches[1], std::stoi(req.matches[2]), variant == "blurred");
    const std::string type = path.extension() == ".png" ? "image/png" : "image/x-portable-pixmap";
    res.status = 200;
    res.set_content(io::read_text(path), type);
  }));

  server->Post(R"(/sessions/([^/]+)/rounds/(\d+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const auto events = events_from_json(body.at("events"));
    const UploadResult result = service.upload_round(req.matches[1], std::stoi(req.matches[2]), events);
    send_json(res, result.accepted ? 200 : 422, to_json(result.report).dump());
  }));

  server->Get(R"(/videos/([^/]+)/results)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
    const auto spec = aggregate::AggregationSpec::named(req.has_param("spec") ? req.get_param_value("spec") : "C1-5W");
    report::SplitOptions split;
    split.group_size = int_param(req, "group_size", split.group_size);
    split.n_splits = int_param(req, "splits", split.n_splits);
    split.seed = static_cast<std::uint64_t>(int_param(req, "seed", 0));
    send_json(res, 200, service.results(req.matches[1], spec, split));
  }));

  return server;
}

void serve(ExperimentService& service, const std::string& host, int port) {
  auto server = make_http_server(service);
  if (!server->listen(host, port)) {
    throw Error(ErrorCode::IoError, fmt::format("cannot listen on {}:{}", host, port));
  }
}

}  // namespace tsal::service
