#include "tsal/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>

#include "tsal/config.hpp"
#include "tsal/error.hpp"
#include "tsal/foveation.hpp"
#include "tsal/image.hpp"
#include "tsal/io.hpp"
#include "tsal/parallel.hpp"
#include "tsal/render.hpp"
#include "tsal/report.hpp"
#include "tsal/service.hpp"
#include "tsal/simulate.hpp"

namespace tsal::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string video;
  std::string logs_dir;
  std::string out;
  std::uint64_t seed = 0;
  int rounds = 0;
  std::vector<double> weights;
  int splits = 100;
  int group_size = 15;
  double sigma_deg = 0.0;
  // prepare
  double blur_sigma_px = -1.0;
  // serve
  std::string assets;
  std::string data;
  std::string host = "127.0.0.1";
  int port = 8080;
  // simulate
  std::string ground_truth = "three-peak";
  int observers = 30;
  std::string model;
  // analyze-spatial / render
  std::string reference;
  bool write_maps = false;
  std::string kind = "temporal";
};

io::ExperimentConfig load_config(const Options& o) {
  return o.config.empty() ? io::ExperimentConfig{} : io::load_config(o.config);
}

std::optional<aggregate::AggregationSpec> custom_spec(const Options& o, int max_round) {
  if (o.rounds == 0 && o.weights.empty()) return std::nullopt;
  const int n = o.rounds > 0 ? o.rounds : static_cast<int>(o.weights.size());
  aggregate::AggregationSpec spec = aggregate::AggregationSpec::first_rounds(n);
  if (!o.weights.empty()) {
    if (static_cast<int>(o.weights.size()) != n) {
      throw CLI::ValidationError("--weights", fmt::format("expected {} weights, got {}", n, o.weights.size()));
    }
    spec.weights = o.weights;
  }
  try {
    aggregate::validate(spec, max_round);
  } catch (const Error& e) {
    throw CLI::ValidationError("--rounds/--weights", e.what());
  }
  return spec;
}

std::vector<aggregate::AggregationSpec> specs_for(const Options& o, const io::ExperimentConfig& config) {
  if (auto spec = custom_spec(o, config.protocol.rounds)) return {*spec};
  return report::standard_specs(config.protocol.rounds);
}

std::vector<session::SessionLog> load_cohort(const Options& o, const io::ExperimentConfig& config,
                                             std::string& video_id) {
  auto logs = io::read_logs_dir(o.logs_dir);
  if (logs.empty()) throw Error(ErrorCode::NoData, "no session logs in " + o.logs_dir);
  video_id = o.video;
  if (video_id.empty()) {
    std::set<std::string> ids;
    for (const auto& log : logs) ids.insert(log.video_id);
    if (ids.size() != 1) {
      throw CLI::ValidationError("--video", "logs cover several videos; pick one with --video");
    }
    video_id = *ids.begin();
  }
  std::erase_if(logs, [&](const session::SessionLog& l) { return l.video_id != video_id; });
  const std::size_t before = logs.size();
  logs = report::complete_cohort(std::move(logs), config);
  if (logs.size() != before) {
    std::cerr << fmt::format("warning: skipped {} incomplete or invalid log(s)\n", before - logs.size());
  }
  if (logs.empty()) throw Error(ErrorCode::NoData, "no complete logs for video '" + video_id + "'");
  return logs;
}

double fixation_sigma(const Options& o, const io::ExperimentConfig& config) {
  if (o.sigma_deg > 0.0) return std::round(geometry::deg_to_px(o.sigma_deg, config.geometry));
  return config.fixation_sigma_px;
}

void cmd_prepare(const Options& o) {
  io::ExperimentConfig config = load_config(o);
  if (o.blur_sigma_px >= 0.0) config.blur_sigma_px = o.blur_sigma_px;
  const io::VideoAsset asset = io::load_frame_sequence(o.video);
  const fs::path dir = fs::path(o.out) / asset.video_id;
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "blurred");
  std::vector<fs::path> sharp(asset.duration_frames()), blurred(asset.duration_frames());
  parallel_for(sharp.size(), [&](std::size_t i) {
    const std::string ext = asset.frame_paths[i].extension().string();
    const std::string name = fmt::format("{:05d}{}", i, ext);
    sharp[i] = dir / "frames" / name;
    blurred[i] = dir / "blurred" / name;
    fs::copy_file(asset.frame_paths[i], sharp[i], fs::copy_options::overwrite_existing);
    io::write_image(blurred[i], foveation::gaussian_blur(asset.load_frame(static_cast<int>(i)), config.blur_sigma_px));
  });
  io::write_manifest(dir / "manifest.json", asset.video_id, asset.fps, asset.resolution, sharp);
  io::write_manifest(dir / "blurred" / "manifest.json", asset.video_id, asset.fps, asset.resolution, blurred);
  std::cout << fmt::format("prepared {} frames of '{}' (blur sigma {} px) in {}\n", asset.duration_frames(),
                           asset.video_id, config.blur_sigma_px, dir.string());
}

void cmd_serve(const Options& o) {
  service::ServiceOptions options{load_config(o), o.assets, o.data};
  service::ExperimentService svc(std::move(options));
  std::cout << fmt::format("listening on http://{}:{}\n", o.host, o.port) << std::flush;
  service::serve(svc, o.host, o.port);
}

simulate::ObserverModel load_model(const std::string& path) {
  simulate::ObserverModel m;
  if (path.empty()) return m;
  try {
    const auto j = nlohmann::json::parse(io::read_text(path));
    m.attentiveness = j.value("attentiveness", m.attentiveness);
    m.latency_frames = j.value("latency_frames", m.latency_frames);
    m.hold_min_frames = j.value("hold_min_frames", m.hold_min_frames);
    m.hold_max_frames = j.value("hold_max_frames", m.hold_max_frames);
    m.spatial_jitter_px = j.value("spatial_jitter_px", m.spatial_jitter_px);
    m.exploration_rate = j.value("exploration_rate", m.exploration_rate);
    m.exploration_slope = j.value("exploration_slope", m.exploration_slope);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  simulate::validate(m);
  return m;
}

void cmd_simulate(const Options& o) {
  const io::ExperimentConfig config = load_config(o);
  const int duration = config.protocol.duration_frames;
  const geometry::Resolution res = config.geometry.resolution_px;
  const std::string video_id = o.video.empty() ? "synthetic" : o.video;
  simulate::GroundTruth gt;
  if (o.ground_truth == "three-peak") {
    gt = simulate::three_peak_ground_truth(video_id, duration, res);
  } else if (o.ground_truth == "flat") {
    gt = simulate::flat_ground_truth(video_id, duration, res);
  } else {
    gt = io::load_ground_truth(o.ground_truth);
    if (!o.video.empty()) gt.video_id = o.video;
  }
  const std::vector<simulate::ObserverModel> models(o.observers, load_model(o.model));
  const auto cohort = simulate::synth_cohort(gt, models, config.protocol, o.seed, io::config_hash(config));
  fs::create_directories(o.out);
  for (const auto& log : cohort) io::write_log(fs::path(o.out) / (log.observer_id + ".jsonl"), log);
  std::cout << fmt::format("wrote {} logs for '{}' to {}\n", cohort.size(), gt.video_id, o.out);
}

void cmd_analyze_temporal(const Options& o) {
  const io::ExperimentConfig config = load_config(o);
  const auto specs = specs_for(o, config);
  std::string video_id;
  const auto logs = load_cohort(o, config, video_id);
  std::vector<aggregate::TemporalSaliencyMap> maps;
  for (const auto& spec : specs) maps.push_back(aggregate::temporal_map(logs, video_id, spec));
  io::write_text(o.out, io::temporal_csv(maps));
  std::cout << fmt::format("temporal maps for '{}' ({} observers) -> {}\n", video_id, logs.size(), o.out);
}

void cmd_analyze_consistency(const Options& o) {
  const io::ExperimentConfig config = load_config(o);
  const auto specs = specs_for(o, config);
  std::string video_id;
  const auto logs = load_cohort(o, config, video_id);
  std::vector<consistency::ConsistencyReport> reports;
  nlohmann::ordered_json doc = nlohmann::json::array();
  for (const auto& spec : specs) {
    reports.push_back(consistency::split_consistency(logs, video_id, spec, o.group_size, o.splits, o.seed));
    doc.push_back(io::to_json(reports.back()));
  }
  io::write_text(o.out, doc.dump(2) + "\n");
  const std::string table = report::consistency_table(reports);
  io::write_text(fs::path(o.out).replace_extension(".txt"), table);
  std::cout << table;
}

void cmd_analyze_spatial(const Options& o) {
  io::ExperimentConfig config = load_config(o);
  config.fixation_sigma_px = fixation_sigma(o, config);
  std::string video_id;
  const auto logs = load_cohort(o, config, video_id);
  std::optional<spatial::FixationSet> reference;
  if (!o.reference.empty()) reference = report::read_fixation_csv(o.reference, config.protocol.duration_frames);
  const auto summary = report::spatial_evaluation(logs, config, o.seed, reference ? &*reference : nullptr);
  const fs::path out(o.out);
  fs::create_directories(out);
  io::write_text(out / "metrics.csv", io::metrics_csv(summary.frames));
  const std::string table = report::spatial_table(video_id, summary);
  io::write_text(out / "summary.txt", table);
  if (o.write_maps) {
    const auto fixations = spatial::fixations_from_cohort(logs, config.geometry.resolution_px);
    const auto maps = spatial::fixation_density_map(fixations, config.fixation_sigma_px,
                                                    config.geometry.resolution_px, config.spatial_downsample);
    fs::create_directories(out / "maps");
    for (std::size_t f = 0; f < maps.frames.size(); ++f) {
      io::write_grayscale(out / "maps" / fmt::format("{:05d}.pgm", f), maps.frames[f]);
    }
  }
  std::cout << table;
}

void cmd_render(const Options& o) {
  io::ExperimentConfig config = load_config(o);
  config.fixation_sigma_px = fixation_sigma(o, config);
  if (o.kind != "temporal" && o.kind != "spatial") {
    throw CLI::ValidationError("--kind", "must be temporal or spatial");
  }
  const io::VideoAsset asset = io::load_frame_sequence(o.video);
  Options cohort_options = o;
  cohort_options.video = asset.video_id;
  std::string video_id;
  const auto logs = load_cohort(cohort_options, config, video_id);
  std::vector<fs::path> written;
  if (o.kind == "temporal") {
    const auto spec = custom_spec(o, config.protocol.rounds)
                          .value_or(aggregate::AggregationSpec::first_rounds(config.protocol.rounds));
    written = render::render_temporal_overlay(asset, aggregate::temporal_map(logs, video_id, spec), o.out);
  } else {
    const auto fixations = spatial::fixations_from_cohort(logs, asset.resolution);
    const auto maps = spatial::fixation_density_map(fixations, config.fixation_sigma_px, asset.resolution,
                                                    config.spatial_downsample);
    written = render::render_spatial_overlay(asset, maps, &fixations, o.out);
  }
  std::cout << fmt::format("rendered {} frames to {}\n", written.size(), o.out);
}

void cmd_report(const Options& o) {
  const io::ExperimentConfig config = load_config(o);
  std::string video_id;
  const auto logs = load_cohort(o, config, video_id);
  const auto bundle = report::build_report(logs, video_id, config, {o.group_size, o.splits, o.seed});
  const fs::path dir = report::write_report(bundle, o.out);
  std::cout << bundle.consistency_txt << '\n' << bundle.spatial_txt;
  std::cout << "report written to " << dir.string() << '\n';
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Temporal and spatial video saliency from mouse-contingent deblurring"};
  app.name("tsal");
  app.require_subcommand(1);
  Options o;
  std::function<void(const Options&)> action;

  auto common = [&o](CLI::App* sub, bool logs) {
    sub->add_option("--config", o.config, "Experiment config JSON (defaults to the laboratory protocol)")
        ->check(CLI::ExistingFile);
    if (logs) {
      sub->add_option("--logs-dir", o.logs_dir, "Directory of session logs (*.jsonl)")
          ->required()
          ->check(CLI::ExistingDirectory);
      sub->add_option("--video", o.video, "Video id to analyze (optional when the logs cover one video)");
    }
  };
  auto aggregation = [&o](CLI::App* sub) {
    sub->add_option("--rounds", o.rounds, "Use the first N rounds")->check(CLI::PositiveNumber);
    sub->add_option("--weights", o.weights, "Per-round weights, comma separated")->delimiter(',');
  };
  auto splits = [&o](CLI::App* sub) {
    sub->add_option("--splits", o.splits, "Number of random half splits")->check(CLI::PositiveNumber);
    sub->add_option("--group-size", o.group_size, "Observers per group")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Random seed");
  };

  auto* prepare = app.add_subcommand("prepare", "Blur a frame sequence for the experiment");
  common(prepare, false);
  prepare->add_option("--video", o.video, "Frame-sequence manifest")->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", o.out, "Assets directory")->required();
  prepare->add_option("--sigma-px", o.blur_sigma_px, "Override the blur sigma in pixels")->check(CLI::NonNegativeNumber);
  prepare->callback([&] { action = cmd_prepare; });

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  common(serve, false);
  serve->add_option("--assets", o.assets, "Prepared assets directory")->required()->check(CLI::ExistingDirectory);
  serve->add_option("--data", o.data, "Session log directory")->required();
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port")->check(CLI::Range(1, 65535));
  serve->callback([&] { action = cmd_serve; });

  auto* sim = app.add_subcommand("simulate", "Generate synthetic observer logs");
  common(sim, false);
  sim->add_option("--ground-truth", o.ground_truth, "'three-peak', 'flat' or a ground-truth JSON file");
  sim->add_option("--observers", o.observers, "Cohort size")->check(CLI::PositiveNumber);
  sim->add_option("--model", o.model, "Observer model JSON")->check(CLI::ExistingFile);
  sim->add_option("--video", o.video, "Video id written into the logs");
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--out", o.out, "Output log directory")->required();
  sim->callback([&] { action = cmd_simulate; });

  auto* temporal = app.add_subcommand("analyze-temporal", "Temporal saliency maps as CSV");
  common(temporal, true);
  aggregation(temporal);
  temporal->add_option("--out", o.out, "Output CSV")->required();
  temporal->callback([&] { action = cmd_analyze_temporal; });

  auto* consistency = app.add_subcommand("analyze-consistency", "Split-half inter-observer consistency");
  common(consistency, true);
  aggregation(consistency);
  splits(consistency);
  consistency->add_option("--out", o.out, "Output JSON (a .txt table is written alongside)")->required();
  consistency->callback([&] { action = cmd_analyze_consistency; });

  auto* spatial_cmd = app.add_subcommand("analyze-spatial", "Fixation maps with AUC and NSS per frame");
  common(spatial_cmd, true);
  spatial_cmd->add_option("--sigma-deg", o.sigma_deg, "Fixation blur in degrees of visual angle")
      ->check(CLI::PositiveNumber);
  spatial_cmd->add_option("--reference", o.reference, "Reference fixations CSV (frame_index,x,y)")
      ->check(CLI::ExistingFile);
  spatial_cmd->add_option("--seed", o.seed, "Random seed for the split-half reference");
  spatial_cmd->add_flag("--maps", o.write_maps, "Also write per-frame grayscale maps");
  spatial_cmd->add_option("--out", o.out, "Output directory")->required();
  spatial_cmd->callback([&] { action = cmd_analyze_spatial; });

  auto* render_cmd = app.add_subcommand("render", "Overlay saliency on the video frames");
  common(render_cmd, false);
  render_cmd->add_option("--video", o.video, "Frame-sequence manifest")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--logs-dir", o.logs_dir, "Directory of session logs")->required()->check(CLI::ExistingDirectory);
  render_cmd->add_option("--kind", o.kind, "temporal or spatial");
  aggregation(render_cmd);
  render_cmd->add_option("--sigma-deg", o.sigma_deg, "Fixation blur in degrees")->check(CLI::PositiveNumber);
  render_cmd->add_option("--out", o.out, "Output directory")->required();
  render_cmd->callback([&] { action = cmd_render; });

  auto* report_cmd = app.add_subcommand("report", "Curves, consistency and spatial tables for one video");
  common(report_cmd, true);
  splits(report_cmd);
  report_cmd->add_option("--out", o.out, "Report root directory")->required();
  report_cmd->callback([&] { action = cmd_report; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    action(o);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tsal::cli
