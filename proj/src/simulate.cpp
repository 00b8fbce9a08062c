#include "tsal/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsal/error.hpp"
#include "tsal/parallel.hpp"
#include "tsal/random.hpp"

namespace tsal::simulate {

void validate(const ObserverModel& m) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(m.attentiveness) || !unit(m.exploration_rate)) {
    throw Error(ErrorCode::InvalidConfig, "attentiveness and exploration rate must lie in [0, 1]");
  }
  if (m.latency_frames < 0 || m.hold_min_frames < 1 || m.hold_max_frames < m.hold_min_frames) {
    throw Error(ErrorCode::InvalidConfig, "invalid latency or hold length range");
  }
  if (!(m.spatial_jitter_px >= 0.0) || !std::isfinite(m.exploration_slope)) {
    throw Error(ErrorCode::InvalidConfig, "invalid jitter or exploration slope");
  }
}

void validate(const GroundTruth& gt) {
  if (gt.temporal_density.empty()) throw Error(ErrorCode::InvalidConfig, "empty ground truth");
  if (gt.spatial_centers.size() != gt.temporal_density.size()) {
    throw Error(ErrorCode::InvalidConfig, "one spatial centre per frame is required");
  }
  double sum = 0.0;
  for (double d : gt.temporal_density) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::InvalidConfig, "density values must be non-negative");
    }
    sum += d;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("density sums to {}, not 1", sum));
  }
}

GroundTruth ground_truth_from_peaks(const std::string& video_id, int duration_frames,
                                    geometry::Resolution resolution,
                                    std::span<const PeakSpec> peaks, double baseline) {
  if (duration_frames <= 0 || baseline < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "duration must be positive and baseline non-negative");
  }
  GroundTruth gt;
  gt.video_id = video_id;
  gt.resolution = resolution;
  gt.temporal_density.assign(duration_frames, baseline);
  const Point frame_centre{resolution.width / 2.0, resolution.height / 2.0};
  gt.spatial_centers.assign(duration_frames, frame_centre);
  std::vector<double> strongest(duration_frames, 0.0);
  for (const PeakSpec& peak : peaks) {
    if (!(peak.width_frames > 0.0) || !(peak.weight > 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "peak width and weight must be positive");
    }
    for (int f = 0; f < duration_frames; ++f) {
      double v = 0.0;
      if (peak.shape == PeakShape::Gaussian) {
        const double z = (f - peak.center_frame) / peak.width_frames;
        v = peak.weight * std::exp(-0.5 * z * z);
      } else {
        const double half = peak.width_frames / 2.0;
        v = (f >= peak.center_frame - half && f < peak.center_frame + half) ? peak.weight : 0.0;
      }
      gt.temporal_density[f] += v;
      if (v > strongest[f]) {
        strongest[f] = v;
        gt.spatial_centers[f] = peak.location;
      }
    }
  }
  const double total = std::accumulate(gt.temporal_density.begin(), gt.temporal_density.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidConfig, "ground truth density is zero");
  for (double& d : gt.temporal_density) d /= total;
  return gt;
}

GroundTruth flat_ground_truth(const std::string& video_id, int duration_frames,
                              geometry::Resolution resolution) {
  return ground_truth_from_peaks(video_id, duration_frames, resolution, {}, 1.0);
}

GroundTruth three_peak_ground_truth(const std::string& video_id, int duration_frames,
                                    geometry::Resolution resolution) {
  const double w = resolution.width;
  const double h = resolution.height;
  const PeakSpec peaks[] = {
      {0.2 * duration_frames, 6.0, 1.0, PeakShape::Gaussian, {0.3 * w, 0.4 * h}},
      {0.5 * duration_frames, 6.0, 0.8, PeakShape::Gaussian, {0.6 * w, 0.5 * h}},
      {0.8 * duration_frames, 6.0, 0.9, PeakShape::Gaussian, {0.5 * w, 0.3 * h}},
  };
  return ground_truth_from_peaks(video_id, duration_frames, resolution, peaks, 0.0);
}

std::vector<PeakWindow> density_peaks(std::span<const double> density) {
  std::vector<PeakWindow> out;
  const int n = static_cast<int>(density.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && density[j + 1] == density[i]) ++j;
    const double h = density[i];
    const bool left_lower = i == 0 || density[i - 1] < h;
    const bool right_lower = j == n - 1 || density[j + 1] < h;
    if (h > 0.0 && left_lower && right_lower) {
      int start = i;
      while (start > 0 && density[start - 1] <= density[start] && density[start - 1] >= 0.5 * h) {
        --start;
      }
      int end = j;
      while (end + 1 < n && density[end + 1] <= density[end] && density[end + 1] >= 0.5 * h) {
        ++end;
      }
      out.push_back({start, end, (i + j) / 2, h});
    }
    i = j + 1;
  }
  return out;
}

namespace {

struct PlannedHold {
  int start = 0;  // first frame with the button down
  int end = 0;    // exclusive
  bool exploring = false;
  Point target;
};

std::vector<PlannedHold> plan_round(const GroundTruth& gt, const ObserverModel& m,
                                    const session::ProtocolParams& p,
                                    std::span<const PeakWindow> peaks, double max_height,
                                    int round, Rng& rng) {
  const int duration = p.duration_frames;
  const double explore =
      std::clamp(m.exploration_rate + m.exploration_slope * round, 0.0, 1.0);
  std::vector<PlannedHold> holds;
  for (const PeakWindow& peak : peaks) {
    if (!rng.bernoulli(m.attentiveness * peak.height / max_height)) continue;
    const int length = std::clamp(static_cast<int>(rng.between(m.hold_min_frames, m.hold_max_frames)),
                                  1, std::max(1, std::min(p.click_cap_frames, duration)));
    PlannedHold hold;
    if (rng.bernoulli(explore)) {
      hold.exploring = true;
      hold.start = static_cast<int>(rng.between(0, duration - length));
      hold.end = hold.start + length;
      hold.target = {rng.uniform() * (gt.resolution.width - 1),
                     rng.uniform() * (gt.resolution.height - 1)};
    } else {
      const int window = peak.end - peak.start + 1;
      const int effective = std::min(length, window);
      hold.start = peak.start + m.latency_frames +
                   static_cast<int>(rng.between(0, window - effective));
      hold.end = std::min(duration, hold.start + effective);
    }
    if (hold.start < duration) holds.push_back(hold);
  }
  std::sort(holds.begin(), holds.end(),
            [](const PlannedHold& a, const PlannedHold& b) { return a.start < b.start; });
  std::vector<PlannedHold> merged;
  for (PlannedHold h : holds) {
    if (!merged.empty()) h.start = std::max(h.start, merged.back().end);
    if (h.start < h.end) merged.push_back(h);
  }
  return merged;
}

}  // namespace

session::SessionLog synth_observer(const GroundTruth& gt, const ObserverModel& model,
                                   const session::ProtocolParams& p, std::uint64_t seed,
                                   const std::string& observer_id,
                                   const std::string& config_hash) {
  validate(gt);
  validate(model);
  session::validate(p);
  if (static_cast<int>(gt.temporal_density.size()) != p.duration_frames) {
    throw Error(ErrorCode::InvalidConfig, "ground truth length differs from the video duration");
  }
  const std::vector<PeakWindow> peaks = density_peaks(gt.temporal_density);
  double max_height = 0.0;
  for (const auto& pk : peaks) max_height = std::max(max_height, pk.height);

  Rng rng(seed);
  session::SessionState state =
      session::new_session(p, observer_id, gt.video_id, {config_hash, 200.0});
  auto feed = [&state](const session::InputEvent& e) {
    state = session::handle_event(std::move(state), e).state;
  };

  for (int round = 0; round < p.rounds; ++round) {
    const auto holds = plan_round(gt, model, p, peaks, max_height, round, rng);
    std::size_t next = 0;
    const PlannedHold* active = nullptr;
    for (int f = 0; f < p.duration_frames; ++f) {
      if (active && f == active->end) {
        feed(session::Release{});
        active = nullptr;
      }
      if (!active && next < holds.size() && holds[next].start == f) {
        active = &holds[next++];
        feed(session::Press{});
      }
      const Point base = (active && active->exploring) ? active->target : gt.spatial_centers[f];
      feed(session::CursorMove{base.x + rng.normal(0.0, model.spatial_jitter_px),
                               base.y + rng.normal(0.0, model.spatial_jitter_px)});
      feed(session::FrameTick{});
    }
  }
  return std::move(state.log);
}

std::vector<session::SessionLog> synth_cohort(const GroundTruth& gt,
                                              std::span<const ObserverModel> models,
                                              const session::ProtocolParams& p,
                                              std::uint64_t master_seed,
                                              const std::string& config_hash) {
  if (models.empty()) throw Error(ErrorCode::InvalidConfig, "cohort needs at least one model");
  std::vector<session::SessionLog> cohort(models.size());
  parallel_for(models.size(), [&](std::size_t i) {
    cohort[i] = synth_observer(gt, models[i], p, derive_seed(master_seed, i),
                               fmt::format("sim-{:03d}", i), config_hash);
  });
  return cohort;
}

}  // namespace tsal::simulate
