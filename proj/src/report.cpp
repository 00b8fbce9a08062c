#include "tsal/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tsal/error.hpp"
#include "tsal/io.hpp"

namespace tsal::report {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<aggregate::AggregationSpec> standard_specs(int rounds) {
  std::vector<aggregate::AggregationSpec> specs;
  auto add = [&specs](aggregate::AggregationSpec s) {
    if (std::find(specs.begin(), specs.end(), s) == specs.end()) specs.push_back(std::move(s));
  };
  add(aggregate::AggregationSpec::first_rounds(1));
  add(aggregate::AggregationSpec::first_rounds(std::min(2, rounds)));
  add(aggregate::AggregationSpec::first_rounds(rounds));
  add(aggregate::AggregationSpec::weighted_rounds(rounds));
  return specs;
}

std::vector<session::SessionLog> complete_cohort(std::vector<session::SessionLog> logs,
                                                 const io::ExperimentConfig& config) {
  const std::string hash = io::config_hash(config);
  std::erase_if(logs, [&](const session::SessionLog& log) {
    if (!log.config_hash.empty() && log.config_hash != hash) return true;
    return !session::validate_log(log, config.protocol).accepted();
  });
  return logs;
}

ordered_json results_document(aggregate::Cohort logs, const std::string& video_id,
                              const aggregate::AggregationSpec& spec, const SplitOptions& split) {
  if (logs.empty()) throw Error(ErrorCode::NoData, "no complete logs for video '" + video_id + "'");
  const auto map = aggregate::temporal_map(logs, video_id, spec);
  ordered_json j;
  j["video_id"] = video_id;
  j["spec"] = io::to_json(spec);
  j["n_observers"] = map.n_observers;
  j["scores"] = map.scores;
  if (logs.size() >= 2 * static_cast<std::size_t>(split.group_size)) {
    j["consistency"] = io::to_json(consistency::split_consistency(
        logs, video_id, spec, split.group_size, split.n_splits, split.seed));
  } else {
    j["consistency"] = nullptr;
  }
  return j;
}

std::string consistency_table(const std::vector<consistency::ConsistencyReport>& reports) {
  if (reports.empty()) return "";
  std::string out;
  const auto& first = reports.front();
  out += fmt::format("Inter-observer consistency of temporal saliency maps ({} vs {} observers, {} splits, seed {})\n\n",
                     first.group_size, first.group_size, first.n_splits, first.seed);
  constexpr int kLabel = 24;
  out += fmt::format("{:<{}}", "", kLabel);
  out += fmt::format("{:<{}}", "Pearson correlation, mean (std)", 16 * static_cast<int>(reports.size()));
  out += "KS test, mean p-value\n";
  out += fmt::format("{:<{}}", "video", kLabel);
  for (const auto& r : reports) out += fmt::format("{:<16}", r.spec.name());
  for (const auto& r : reports) out += fmt::format("{:<8}", r.spec.name());
  out += '\n';
  out += fmt::format("{:<{}}", first.video_id, kLabel);
  for (const auto& r : reports) out += fmt::format("{:<16}", fmt::format("{:.3f} ({:.3f})", r.pcc_mean, r.pcc_std));
  for (const auto& r : reports) out += fmt::format("{:<8}", fmt::format("{:.3f}", r.ks_p_mean));
  out += '\n';
  int degenerate = 0;
  for (const auto& r : reports) degenerate += r.degenerate_pcc_splits;
  if (degenerate > 0) out += fmt::format("\n{} split(s) had a constant group map (scored PCC = 0)\n", degenerate);
  return out;
}

SpatialSummary spatial_evaluation(aggregate::Cohort logs, const io::ExperimentConfig& config,
                                  std::uint64_t seed, const spatial::FixationSet* reference) {
  if (logs.empty()) throw Error(ErrorCode::NoData, "no logs for spatial evaluation");
  const geometry::Resolution res = config.geometry.resolution_px;
  SpatialSummary summary;
  spatial::FixationSet map_fixations;
  spatial::FixationSet reference_fixations;
  if (reference) {
    map_fixations = spatial::fixations_from_cohort(logs, res);
    reference_fixations = *reference;
    summary.reference = "file";
  } else if (logs.size() >= 2) {
    const auto canonical = consistency::canonical_order(logs);
    const int half = static_cast<int>(logs.size() / 2);
    const auto split = consistency::draw_split(canonical, half, seed, 0);
    std::vector<session::SessionLog> a, b;
    for (auto i : split.group_a) a.push_back(logs[i]);
    for (auto i : split.group_b) b.push_back(logs[i]);
    map_fixations = spatial::fixations_from_cohort(a, res);
    reference_fixations = spatial::fixations_from_cohort(b, res);
    summary.reference = fmt::format("split-half ({} vs {} observers)", half, half);
  } else {
    map_fixations = spatial::fixations_from_cohort(logs, res);
    reference_fixations = map_fixations;
    summary.reference = "self (single observer)";
  }
  const auto maps = spatial::fixation_density_map(map_fixations, config.fixation_sigma_px, res,
                                                  config.spatial_downsample);
  summary.frames = spatial::score_frames(maps, reference_fixations);
  std::vector<std::optional<double>> auc, nss;
  for (const auto& f : summary.frames) {
    auc.push_back(f.auc);
    nss.push_back(f.nss);
  }
  try {
    summary.auc = spatial::per_frame_metric_stats(auc);
    summary.nss = spatial::per_frame_metric_stats(nss);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoData) throw;
  }
  return summary;
}

std::string spatial_table(const std::string& video_id, const SpatialSummary& s) {
  auto cell = [](const std::optional<spatial::MetricStats>& m, int precision) {
    if (!m) return std::string("n/a");
    return fmt::format("{:.{}f} ({:.{}f})", m->mean, precision, m->std, precision);
  };
  std::string out = fmt::format("Spatial saliency maps vs reference fixations [{}]\n\n", s.reference);
  out += fmt::format("{:<24}{:<20}{:<20}{}\n", "video", "AUC, mean (std)", "NSS, mean (std)", "frames");
  out += fmt::format("{:<24}{:<20}{:<20}{}\n", video_id, cell(s.auc, 3), cell(s.nss, 2),
                     s.auc ? s.auc->n_frames : 0);
  return out;
}

spatial::FixationSet read_fixation_csv(const fs::path& path, int duration_frames) {
  const auto columns = io::parse_csv_columns(io::read_text(path));
  if (columns.size() != 3) throw Error(ErrorCode::ParseError, path.string() + ": expected frame_index,x,y");
  spatial::FixationSet set;
  set.frames.resize(duration_frames);
  for (std::size_t i = 0; i < columns[0].second.size(); ++i) {
    const int f = static_cast<int>(columns[0].second[i]);
    if (f < 0 || f >= duration_frames) continue;
    set.frames[f].push_back({columns[1].second[i], columns[2].second[i]});
  }
  return set;
}

ReportBundle build_report(aggregate::Cohort logs, const std::string& video_id,
                          const io::ExperimentConfig& config, const SplitOptions& split) {
  if (logs.empty()) throw Error(ErrorCode::NoData, "no logs for video '" + video_id + "'");
  for (const auto& log : logs) {
    const auto validation = session::validate_log(log, config.protocol);
    if (!validation.accepted()) {
      throw Error(ErrorCode::Rejected, fmt::format("log of '{}' fails validation: {}", log.observer_id,
                                                   validation.violations.front().detail));
    }
  }
  const int rounds = config.protocol.rounds;
  ReportBundle bundle;
  bundle.video_id = video_id;

  const auto curve_specs = std::vector<aggregate::AggregationSpec>{
      aggregate::AggregationSpec::first_rounds(1), aggregate::AggregationSpec::first_rounds(rounds),
      aggregate::AggregationSpec::weighted_rounds(rounds)};
  std::vector<std::vector<double>> curves;
  for (const auto& spec : curve_specs) curves.push_back(aggregate::temporal_map(logs, video_id, spec).scores);
  bundle.temporal_csv = fmt::format("frame,c1,c1{0},c1{0}w\n", rounds);
  for (std::size_t f = 0; f < curves.front().size(); ++f) {
    bundle.temporal_csv += fmt::format("{},{},{},{}\n", f, curves[0][f], curves[1][f], curves[2][f]);
  }

  std::vector<consistency::ConsistencyReport> reports;
  for (const auto& spec : standard_specs(rounds)) {
    reports.push_back(consistency::split_consistency(logs, video_id, spec, split.group_size,
                                                     split.n_splits, split.seed));
  }
  bundle.consistency_txt = consistency_table(reports);

  const SpatialSummary spatial_summary = spatial_evaluation(logs, config, split.seed);
  bundle.spatial_csv = io::metrics_csv(spatial_summary.frames);
  bundle.spatial_txt = spatial_table(video_id, spatial_summary);

  ordered_json prov;
  prov["video_id"] = video_id;
  prov["seed"] = split.seed;
  prov["config_hash"] = io::config_hash(config);
  prov["config"] = io::to_json(config);
  prov["cohort_size"] = logs.size();
  prov["group_size"] = split.group_size;
  prov["n_splits"] = split.n_splits;
  prov["specs"] = nlohmann::json::array();
  for (const auto& spec : standard_specs(rounds)) prov["specs"].push_back(io::to_json(spec));
  prov["spatial_reference"] = spatial_summary.reference;
  prov["fixation_sigma_px"] = config.fixation_sigma_px;
  prov["inputs"] = nlohmann::json::array();
  for (std::size_t i : consistency::canonical_order(logs)) {
    prov["inputs"].push_back({{"observer_id", logs[i].observer_id},
                              {"log_hash", io::hex64(io::fnv1a64(io::serialize_log(logs[i])))}});
  }
  bundle.provenance_json = prov.dump(2) + "\n";
  return bundle;
}

fs::path write_report(const ReportBundle& bundle, const fs::path& out_dir) {
  const fs::path dir = out_dir / bundle.video_id;
  fs::create_directories(dir);
  io::write_text(dir / "temporal.csv", bundle.temporal_csv);
  io::write_text(dir / "consistency.txt", bundle.consistency_txt);
  io::write_text(dir / "spatial.csv", bundle.spatial_csv);
  io::write_text(dir / "spatial.txt", bundle.spatial_txt);
  io::write_text(dir / "provenance.json", bundle.provenance_json);
  return dir;
}

}  // namespace tsal::report
