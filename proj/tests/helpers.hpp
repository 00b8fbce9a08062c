#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "tsal/error.hpp"
#include "tsal/image.hpp"
#include "tsal/io.hpp"
#include "tsal/random.hpp"
#include "tsal/session.hpp"

namespace testing {

template <typename Fn>
std::optional<tsal::ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const tsal::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define CHECK_ERROR(expr, expected) \
  CHECK(::testing::error_code_of([&] { (void)(expr); }) == std::optional{expected})

// Random pointer input: presses and releases at random moments, occasionally
// repeated, with cursor moves in between ticks.
inline std::vector<tsal::session::InputEvent> random_events(const tsal::session::ProtocolParams& p,
                                                            tsal::Rng& rng, double press_rate = 0.08,
                                                            double release_rate = 0.05) {
  using namespace tsal::session;
  std::vector<InputEvent> events;
  const int ticks = p.rounds * p.duration_frames;
  for (int t = 0; t < ticks; ++t) {
    const double u = rng.uniform();
    if (u < press_rate) {
      events.emplace_back(Press{});
    } else if (u < press_rate + release_rate) {
      events.emplace_back(Release{});
    }
    if (rng.bernoulli(0.7)) {
      events.emplace_back(CursorMove{rng.uniform() * 1280.0, rng.uniform() * 720.0});
    }
    events.emplace_back(FrameTick{});
  }
  return events;
}

// Round in which the listed frames are deblurred, one ordinal per
// contiguous run.
inline tsal::session::RoundLog round_with(int duration, const std::vector<std::pair<int, int>>& runs) {
  tsal::session::RoundLog r(duration);
  for (int f = 0; f < duration; ++f) r[f] = {f, 640.0, 360.0, false, 0};
  int hold = 0;
  for (auto [start, end] : runs) {
    ++hold;
    for (int f = start; f < end; ++f) {
      r[f].deblurred = true;
      r[f].hold = hold;
    }
  }
  return r;
}

inline tsal::session::SessionLog log_with(const std::string& observer, const std::string& video,
                                          std::vector<tsal::session::RoundLog> rounds) {
  return {observer, video, "", std::move(rounds)};
}

// Writes n frames of a moving gradient plus a manifest; returns the manifest path.
inline std::filesystem::path make_sequence(const std::filesystem::path& dir, const std::string& video_id,
                                           int n, int w, int h, const std::string& ext = ".ppm") {
  std::vector<std::filesystem::path> paths;
  std::filesystem::create_directories(dir / "frames");
  for (int i = 0; i < n; ++i) {
    tsal::Frame f(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        f.at(x, y, 0) = static_cast<float>((x + i) % w) / w;
        f.at(x, y, 1) = static_cast<float>(y) / h;
        f.at(x, y, 2) = static_cast<float>(((x / 4 + y / 4 + i) % 2));
      }
    }
    paths.push_back(dir / "frames" / (std::to_string(10000 + i) + ext));
    tsal::io::write_image(paths.back(), f);
  }
  const auto manifest = dir / "manifest.json";
  tsal::io::write_manifest(manifest, video_id, 25, {w, h}, paths);
  return manifest;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() /
           ("tsal_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testing

namespace testing {

// assets/<id>/manifest.json plus a blurred/ variant pointing at the same
// frames, as `tsal prepare` lays them out.
inline void make_prepared_video(const std::filesystem::path& assets, const std::string& video_id, int n,
                                int w = 32, int h = 18) {
  const auto manifest = make_sequence(assets / video_id, video_id, n, w, h);
  const auto asset = tsal::io::load_frame_sequence(manifest);
  tsal::io::write_manifest(assets / video_id / "blurred" / "manifest.json", video_id, 25, {w, h},
                           asset.frame_paths);
}

}  // namespace testing
