#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsal/aggregate.hpp"
#include "tsal/config.hpp"
#include "tsal/consistency.hpp"
#include "tsal/spatial.hpp"

namespace tsal::report {

// The four aggregations plotted and tabulated per video: C1, C1-2, C1-R and
// C1-RW for R = protocol rounds (duplicates removed when R < 3).
std::vector<aggregate::AggregationSpec> standard_specs(int rounds);

// Logs with every protocol round present that pass validation and carry
// this config's hash (or none), i.e. the sessions that count towards results.
std::vector<session::SessionLog> complete_cohort(std::vector<session::SessionLog> logs,
                                                 const io::ExperimentConfig& config);

struct SplitOptions {
  int group_size = 15;
  int n_splits = 100;
  std::uint64_t seed = 0;
};

// {"video_id", "spec", "n_observers", "scores", "consistency"}; consistency
// is null when the cohort is smaller than two groups. Shared by the offline
// pipeline and the HTTP service so both emit the same bytes.
nlohmann::ordered_json results_document(aggregate::Cohort logs, const std::string& video_id,
                                        const aggregate::AggregationSpec& spec,
                                        const SplitOptions& split);

// Text table with one row per report: PCC "mean (std)" per spec followed by
// mean KS p-value per spec.
std::string consistency_table(const std::vector<consistency::ConsistencyReport>& reports);

struct SpatialSummary {
  std::vector<spatial::FrameScores> frames;
  std::optional<spatial::MetricStats> auc;
  std::optional<spatial::MetricStats> nss;
  std::string reference;  // how the reference fixations were obtained
};

// Per-frame AUC/NSS evaluation of cursor-derived maps. With `reference`
// fixations the map is built from the whole cohort and scored against them;
// otherwise the cohort is split in half (split 0 of `seed`) and the map of one
// half is scored against the fixations of the other.
SpatialSummary spatial_evaluation(aggregate::Cohort logs, const io::ExperimentConfig& config,
                                  std::uint64_t seed,
                                  const spatial::FixationSet* reference = nullptr);

std::string spatial_table(const std::string& video_id, const SpatialSummary& summary);

// Reference fixations as CSV rows frame_index,x,y (header required).
spatial::FixationSet read_fixation_csv(const std::filesystem::path& path, int duration_frames);

struct ReportBundle {
  std::string video_id;
  std::string temporal_csv;      // frame,c1,c15,c15w
  std::string consistency_txt;
  std::string spatial_csv;       // frame_index,auc,nss
  std::string spatial_txt;
  std::string provenance_json;
};

// Deterministic in (logs, config, seed). Throws NoData for an empty cohort,
// InsufficientCohort when it cannot be split into two groups.
ReportBundle build_report(aggregate::Cohort logs, const std::string& video_id,
                          const io::ExperimentConfig& config, const SplitOptions& split);

// Writes out_dir/{video_id}/temporal.csv, consistency.txt, spatial.csv,
// spatial.txt and provenance.json.
std::filesystem::path write_report(const ReportBundle& bundle, const std::filesystem::path& out_dir);

}  // namespace tsal::report
