#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsal/aggregate.hpp"
#include "tsal/foveation.hpp"
#include "tsal/geometry.hpp"
#include "tsal/session.hpp"

namespace tsal::spatial {

using foveation::Point;
using geometry::Resolution;

// Per-frame fixation proxies: the cursor position on every deblurred frame.
struct FixationSet {
  std::vector<std::vector<Point>> frames;

  std::size_t total() const;
};

// Real-valued grid, row-major.
struct SaliencyGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  SaliencyGrid() = default;
  SaliencyGrid(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

enum class Normalization { None, UnitSum, ZScored };

struct SpatialSaliencyMap {
  std::vector<SaliencyGrid> frames;
  Normalization normalization = Normalization::UnitSum;
  // Each grid cell covers downsample x downsample stimulus pixels.
  int downsample = 1;
};

// Points are clamped into [0, width-1] x [0, height-1]. Every round of the
// log contributes; frame count equals the round length.
FixationSet fixations_from_log(const session::SessionLog& log, Resolution resolution);

// Union over observers, in cohort order.
FixationSet fixations_from_cohort(aggregate::Cohort logs, Resolution resolution);

// Stimulus pixel coordinates mapped onto a grid downsampled by `factor`.
Point to_grid(Point p, int factor);

// Sum of isotropic Gaussians (sigma in stimulus pixels) centred on the
// points, evaluated at every cell centre, then scaled to unit sum. No points
// gives an all-zero grid.
SaliencyGrid density_frame(std::span<const Point> points, double sigma_px, Resolution resolution,
                           int downsample = 1);

SpatialSaliencyMap fixation_density_map(const FixationSet& fixations, double sigma_px,
                                        Resolution resolution, int downsample = 1);

// Bilinear resampling of a (possibly downsampled) grid to full resolution.
SaliencyGrid upsample_bilinear(const SaliencyGrid& grid, Resolution resolution, int downsample);

// AUC-Judd. Fixations are sampled at their nearest grid cell. Thresholds are
// the distinct fixated values; at threshold t the true positive rate is the
// fraction of fixations with value >= t and the false positive rate the
// fraction of non-fixated cells with value >= t. The ROC runs from (0,0) to
// (1,1) and is integrated with the trapezoid rule, so a constant map scores
// exactly 0.5. Throws Undefined with no fixations or when every cell is fixated.
double auc_judd(const SaliencyGrid& map, std::span<const Point> fixations);

// Normalized scanpath saliency: mean z-score (population std) of the map at
// the fixation cells. A constant map scores 0. Throws Undefined with no fixations.
double nss(const SaliencyGrid& map, std::span<const Point> fixations);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single frame
  int n_frames = 0;
};

// Statistics over frames with a defined score; std::nullopt entries are
// skipped. Throws NoData if nothing is defined.
MetricStats per_frame_metric_stats(std::span<const std::optional<double>> scores);

struct FrameScores {
  std::optional<double> auc;
  std::optional<double> nss;
};

// Scores each map frame against the reference fixations of the same frame.
// Fixations are given in stimulus pixels and mapped through map.downsample.
std::vector<FrameScores> score_frames(const SpatialSaliencyMap& map, const FixationSet& reference);

}  // namespace tsal::spatial
