#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsal/foveation.hpp"
#include "tsal/geometry.hpp"
#include "tsal/session.hpp"

namespace tsal::simulate {

using foveation::Point;

// Behavioural stand-in for a human observer.
struct ObserverModel {
  // Probability of responding to the tallest ground-truth peak; smaller peaks
  // are answered proportionally less often.
  double attentiveness = 0.7;
  int latency_frames = 3;
  // Hold lengths are drawn uniformly from [hold_min_frames, hold_max_frames]
  // and clipped to the click cap.
  int hold_min_frames = 8;
  int hold_max_frames = 25;
  double spatial_jitter_px = 20.0;
  // Probability that a response is spent off-peak in round r (0-based):
  // exploration_rate + exploration_slope * r, clamped to [0, 1].
  double exploration_rate = 0.05;
  double exploration_slope = 0.05;
};

// Throws Error(InvalidConfig) if a field is outside its documented range.
void validate(const ObserverModel& m);

struct GroundTruth {
  std::string video_id = "synthetic";
  geometry::Resolution resolution{1280, 720};
  // Unit-sum attention density over frames.
  std::vector<double> temporal_density;
  // Where the interesting content is on each frame.
  std::vector<Point> spatial_centers;
};

void validate(const GroundTruth& gt);

enum class PeakShape { Gaussian, Box };

struct PeakSpec {
  double center_frame = 0.0;
  // Standard deviation for Gaussian peaks, full width for box peaks.
  double width_frames = 6.0;
  double weight = 1.0;
  PeakShape shape = PeakShape::Gaussian;
  Point location{640.0, 360.0};
};

// Density = baseline + sum of peaks, normalized to unit sum. Each frame's
// spatial centre is the location of the peak contributing most there, or
// the frame centre where only the baseline contributes.
GroundTruth ground_truth_from_peaks(const std::string& video_id, int duration_frames,
                                    geometry::Resolution resolution,
                                    std::span<const PeakSpec> peaks, double baseline = 0.0);

GroundTruth flat_ground_truth(const std::string& video_id, int duration_frames,
                              geometry::Resolution resolution);

// Three Gaussian peaks at 20%, 50% and 80% of the duration with distinct
// screen locations.
GroundTruth three_peak_ground_truth(const std::string& video_id, int duration_frames,
                                    geometry::Resolution resolution);

// Half-maximum window around a local maximum of the density.
struct PeakWindow {
  int start = 0;  // inclusive
  int end = 0;    // inclusive
  int apex = 0;
  double height = 0.0;
};

// Local-maximum plateaus, each extended while the density keeps descending
// and stays at or above half the plateau height.
std::vector<PeakWindow> density_peaks(std::span<const double> density);

// Drives session::handle_event with synthetic pointer input, so the result
// always satisfies the protocol. Deterministic in `seed`.
session::SessionLog synth_observer(const GroundTruth& gt, const ObserverModel& model,
                                   const session::ProtocolParams& p, std::uint64_t seed,
                                   const std::string& observer_id = "sim-000",
                                   const std::string& config_hash = "");

// One log per model; observer i uses derive_seed(master_seed, i) and id
// "sim-NNN".
std::vector<session::SessionLog> synth_cohort(const GroundTruth& gt,
                                              std::span<const ObserverModel> models,
                                              const session::ProtocolParams& p,
                                              std::uint64_t master_seed,
                                              const std::string& config_hash = "");

}  // namespace tsal::simulate
