#include "doctest.h"

#include <fstream>

#include "json.hpp"

#include "helpers.hpp"
#include "tsal/config.hpp"
#include "tsal/image.hpp"
#include "tsal/io.hpp"
#include "tsal/simulate.hpp"

using namespace tsal;
using namespace tsal::io;
namespace fs = std::filesystem;

TEST_CASE("byte quantization") {
  CHECK(to_byte(0.0f) == 0);
  CHECK(to_byte(1.0f) == 255);
  CHECK(to_byte(0.5f) == 128);
  CHECK(to_byte(-3.0f) == 0);
  CHECK(to_byte(7.0f) == 255);
  for (int b = 0; b < 256; ++b) CHECK(to_byte(from_byte(static_cast<std::uint8_t>(b))) == b);
}

TEST_CASE("images round trip through PPM and PNG") {
  testing::TempDir tmp("img");
  Frame f(13, 7);
  Rng rng(1);
  for (float& v : f.pixels) v = from_byte(static_cast<std::uint8_t>(rng.below(256)));
  for (const char* ext : {".ppm", ".png"}) {
    const auto path = tmp.path / (std::string("a") + ext);
    write_image(path, f);
    CHECK(read_image(path) == f);
    CHECK(image_size(path) == geometry::Resolution{13, 7});
  }
  CHECK_ERROR(read_image(tmp.path / "missing.ppm"), ErrorCode::AssetError);
  write_text(tmp.path / "junk.ppm", "P3\n1 1\n255\n0 0 0\n");
  CHECK_ERROR(read_image(tmp.path / "junk.ppm"), ErrorCode::AssetError);
}

TEST_CASE("grayscale export scales the maximum to white") {
  testing::TempDir tmp("gray");
  spatial::SaliencyGrid g(3, 1);
  g.values = {0.0, 0.5, 2.0};
  write_grayscale(tmp.path / "m.pgm", g);
  const std::string bytes = read_text(tmp.path / "m.pgm");
  REQUIRE(bytes.size() >= 3);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 3]) == 0);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 64);
  CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 255);
}

TEST_CASE("frame sequences") {
  testing::TempDir tmp("seq");
  const auto manifest = testing::make_sequence(tmp.path / "clip", "clip", 250, 32, 18);
  const VideoAsset asset = load_frame_sequence(manifest);
  CHECK(asset.video_id == "clip");
  CHECK(asset.duration_frames() == 250);
  CHECK(asset.fps == 25);
  CHECK(asset.resolution == geometry::Resolution{32, 18});
  CHECK(asset.manifest_hash.size() == 16);
  CHECK(asset.load_frame(3).width == 32);

  SUBCASE("empty manifest") {
    write_text(tmp.path / "empty.json", R"({"video_id": "e", "frames": []})");
    CHECK_ERROR(load_frame_sequence(tmp.path / "empty.json"), ErrorCode::ManifestError);
    write_text(tmp.path / "blank.json", "");
    CHECK_ERROR(load_frame_sequence(tmp.path / "blank.json"), ErrorCode::ManifestError);
    CHECK_ERROR(load_frame_sequence(tmp.path / "nothing.json"), ErrorCode::ManifestError);
  }
  SUBCASE("missing frame") {
    fs::remove(asset.frame_paths[10]);
    CHECK_ERROR(load_frame_sequence(manifest), ErrorCode::ManifestError);
  }
  SUBCASE("wrong size frame is named") {
    write_image(asset.frame_paths[17], Frame(31, 18));
    try {
      load_frame_sequence(manifest);
      FAIL("expected AssetError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AssetError);
      CHECK(std::string(e.what()).find(asset.frame_paths[17].filename().string()) != std::string::npos);
    }
  }
}

TEST_CASE("config files") {
  testing::TempDir tmp("cfg");
  ExperimentConfig c;
  c.protocol.rounds = 3;
  c.window.feather_px = 8.0;
  c.fixation_sigma_px = 30.0;
  save_config(tmp.path / "c.json", c);
  const ExperimentConfig back = load_config(tmp.path / "c.json");
  CHECK(back.protocol == c.protocol);
  CHECK(back.window.feather_px == 8.0);
  CHECK(back.fixation_sigma_px == 30.0);
  CHECK(back.geometry.screen_width_cm == c.geometry.screen_width_cm);
  CHECK(config_hash(back) == config_hash(c));

  const auto partial = config_from_json(nlohmann::json::parse(
      R"({"protocol": {"rounds": 2}, "geometry": {"width_px": 1920, "height_px": 1080, "full_width_deg": 45, "distance_cm": 60}})"));
  CHECK(partial.protocol.rounds == 2);
  CHECK(partial.protocol.round_budget_frames == 100);
  CHECK(partial.geometry.screen_width_cm == doctest::Approx(49.7056).epsilon(1e-5));
  CHECK_ERROR(config_from_json(nlohmann::json::parse(R"({"protocol": {"click_cap_frames": 500}})")),
              ErrorCode::InvalidConfig);
  write_text(tmp.path / "bad.json", "{nope");
  CHECK_ERROR(load_config(tmp.path / "bad.json"), ErrorCode::ParseError);
}

TEST_CASE("config hash tracks the protocol") {
  const ExperimentConfig base;
  const std::string h = config_hash(base);
  CHECK(h.size() == 16);
  std::vector<ExperimentConfig> changed(7, base);
  changed[0].protocol.fps = 30;
  changed[1].protocol.duration_frames = 300;
  changed[2].protocol.rounds = 4;
  changed[3].protocol.round_budget_frames = 90;
  changed[4].protocol.click_cap_frames = 20;
  changed[5].window.radius_px = 150;
  changed[6].blur_sigma_px = 10;
  for (const auto& c : changed) CHECK(config_hash(c) != h);
  ExperimentConfig analysis = base;
  analysis.fixation_sigma_px = 20;
  analysis.spatial_downsample = 2;
  CHECK(config_hash(analysis) == h);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("session logs round trip") {
  const auto gt = simulate::three_peak_ground_truth("clip", 250, {1280, 720});
  const auto log = simulate::synth_observer(gt, {}, {}, 4, "sim-004", "0123456789abcdef");
  const std::string text = serialize_log(log);
  CHECK(parse_log(text) == log);
  CHECK(serialize_log(parse_log(text)) == text);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 5 * 250);
  const auto header = nlohmann::json::parse(text.substr(0, text.find('\n')));
  CHECK(header["type"] == "header");
  CHECK(header["format"] == "tsal-log/1");
  CHECK(header["config_hash"] == "0123456789abcdef");
  CHECK(header["duration_frames"] == 250);

  testing::TempDir tmp("log");
  write_log(tmp.path / "a.jsonl", log);
  CHECK(read_log(tmp.path / "a.jsonl") == log);
}

TEST_CASE("hand-written minimal log") {
  const std::string text =
      R"({"type":"header","format":"tsal-log/1","observer_id":"p1","video_id":"v","config_hash":"","duration_frames":3})"
      "\n"
      R"({"round":0,"frame":0,"x":1.5,"y":2,"deblurred":false,"hold":0})"
      "\n"
      R"({"round":0,"frame":1,"x":1.5,"y":2,"deblurred":true,"hold":1})"
      "\n"
      R"({"round":0,"frame":2,"x":3,"y":4,"deblurred":true,"hold":1})"
      "\n";
  const auto log = parse_log(text);
  CHECK(log.observer_id == "p1");
  REQUIRE(log.rounds.size() == 1);
  REQUIRE(log.rounds[0].size() == 3);
  CHECK(std::count_if(log.rounds[0].begin(), log.rounds[0].end(), [](auto& e) { return e.deblurred; }) == 2);
  CHECK(log.rounds[0][2].cursor_x == 3.0);
}

TEST_CASE("malformed logs report the line") {
  const auto gt = simulate::three_peak_ground_truth("clip", 250, {1280, 720});
  const std::string text = serialize_log(simulate::synth_observer(gt, {}, {}, 4));
  auto message = [](const std::string& t) -> std::string {
    try {
      parse_log(t);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return e.what();
    }
    return "";
  };
  std::size_t cut = 0;
  for (int i = 0; i < 101; ++i) cut = text.find('\n', cut) + 1;
  CHECK(message(text.substr(0, cut)).find("line 102") != std::string::npos);
  CHECK(message(text.substr(0, cut - 10)).find("line 101") != std::string::npos);
  std::string bad = text;
  bad.replace(bad.find("\"frame\":7,"), 10, "\"frame\":9,");
  CHECK(message(bad).find("line 9") != std::string::npos);
  CHECK(message("").find("line 1") != std::string::npos);
  CHECK(message("{\"round\":0}\n").find("line 1") != std::string::npos);
}

TEST_CASE("log directories") {
  testing::TempDir tmp("logs");
  const auto gt = simulate::three_peak_ground_truth("a", 250, {1280, 720});
  auto gt_b = gt;
  gt_b.video_id = "b";
  write_log(tmp.path / "z.jsonl", simulate::synth_observer(gt, {}, {}, 1, "z"));
  write_log(tmp.path / "m.jsonl", simulate::synth_observer(gt_b, {}, {}, 2, "m"));
  write_log(tmp.path / "a.jsonl", simulate::synth_observer(gt, {}, {}, 3, "a"));
  write_text(tmp.path / "notes.txt", "ignored");
  const auto all = read_logs_dir(tmp.path);
  REQUIRE(all.size() == 3);
  CHECK(all[0].observer_id == "a");
  CHECK(all[1].observer_id == "m");
  CHECK(all[2].observer_id == "z");
  CHECK(read_logs_dir(tmp.path, std::string("a")).size() == 2);
}

TEST_CASE("temporal csv round trip") {
  aggregate::TemporalSaliencyMap a{"v", {0.0, 0.25, 1.0 / 3.0}, 3, aggregate::AggregationSpec::named("C1"), true};
  aggregate::TemporalSaliencyMap b{"v", {0.1, 0.2, 0.3}, 3, aggregate::AggregationSpec{}, true};
  const std::string csv = temporal_csv({a, b});
  CHECK(csv.substr(0, csv.find('\n')) == "frame_index,C1,C1-5W");
  const auto cols = parse_csv_columns(csv);
  REQUIRE(cols.size() == 3);
  CHECK(cols[0].first == "frame_index");
  CHECK(cols[1].second == a.scores);
  CHECK(cols[2].second == b.scores);
}

TEST_CASE("metrics csv leaves undefined cells empty") {
  std::vector<spatial::FrameScores> s(2);
  s[0] = {0.75, 1.5};
  CHECK(metrics_csv(s) == "frame_index,auc,nss\n0,0.75,1.5\n1,,\n");
}

TEST_CASE("ground truth documents") {
  const auto preset = ground_truth_from_json(nlohmann::json::parse(R"({"preset": "three-peak", "video_id": "x", "duration_frames": 200})"));
  CHECK(preset.video_id == "x");
  CHECK(preset.temporal_density.size() == 200);
  const auto peaks = ground_truth_from_json(nlohmann::json::parse(
      R"({"peaks": [{"center": 50, "width": 10, "weight": 1, "shape": "box", "x": 100, "y": 80}], "duration_frames": 100, "baseline": 0})"));
  CHECK(peaks.temporal_density[50] == doctest::Approx(0.1));
  CHECK(peaks.temporal_density[20] == 0.0);
  CHECK(peaks.spatial_centers[50].x == 100.0);
  const auto dense = ground_truth_from_json(nlohmann::json::parse(R"({"density": [1, 3, 0, 0]})"));
  CHECK(dense.temporal_density == std::vector<double>{0.25, 0.75, 0.0, 0.0});
  CHECK_ERROR(ground_truth_from_json(nlohmann::json::parse(R"({"preset": "zigzag"})")), ErrorCode::InvalidConfig);
  CHECK_ERROR(ground_truth_from_json(nlohmann::json::parse(R"({"density": [0, 0]})")), ErrorCode::InvalidConfig);
}
