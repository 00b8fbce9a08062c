#include "tsal/spatial.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "tsal/error.hpp"
#include "tsal/parallel.hpp"

namespace tsal::spatial {
namespace {

Point clamp_point(Point p, Resolution r) {
  return {std::clamp(p.x, 0.0, static_cast<double>(r.width - 1)),
          std::clamp(p.y, 0.0, static_cast<double>(r.height - 1))};
}

std::size_t nearest_cell(const SaliencyGrid& map, Point p) {
  const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, map.width - 1);
  const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, map.height - 1);
  return static_cast<std::size_t>(y) * map.width + x;
}

int grid_extent(int pixels, int factor) { return (pixels + factor - 1) / factor; }

}  // namespace

std::size_t FixationSet::total() const {
  std::size_t n = 0;
  for (const auto& f : frames) n += f.size();
  return n;
}

FixationSet fixations_from_log(const session::SessionLog& log, Resolution resolution) {
  FixationSet out;
  for (const auto& round : log.rounds) {
    if (out.frames.size() < round.size()) out.frames.resize(round.size());
    for (const auto& e : round) {
      if (!e.deblurred || e.frame_index < 0) continue;
      if (static_cast<std::size_t>(e.frame_index) >= out.frames.size()) {
        out.frames.resize(e.frame_index + 1);
      }
      out.frames[e.frame_index].push_back(clamp_point({e.cursor_x, e.cursor_y}, resolution));
    }
  }
  return out;
}

FixationSet fixations_from_cohort(aggregate::Cohort logs, Resolution resolution) {
  FixationSet out;
  for (const auto& log : logs) {
    FixationSet one = fixations_from_log(log, resolution);
    if (out.frames.size() < one.frames.size()) out.frames.resize(one.frames.size());
    for (std::size_t f = 0; f < one.frames.size(); ++f) {
      out.frames[f].insert(out.frames[f].end(), one.frames[f].begin(), one.frames[f].end());
    }
  }
  return out;
}

Point to_grid(Point p, int factor) {
  if (factor == 1) return p;
  return {(p.x + 0.5) / factor - 0.5, (p.y + 0.5) / factor - 0.5};
}

SaliencyGrid density_frame(std::span<const Point> points, double sigma_px, Resolution resolution,
                           int downsample) {
  if (!(sigma_px > 0.0)) throw Error(ErrorCode::InvalidConfig, "fixation sigma must be positive");
  if (downsample < 1) throw Error(ErrorCode::InvalidConfig, "downsample factor must be >= 1");
  const int w = grid_extent(resolution.width, downsample);
  const int h = grid_extent(resolution.height, downsample);
  SaliencyGrid grid(w, h);
  if (points.empty()) return grid;

  // Coincident fixations (a still cursor during a hold) become one weighted centre.
  std::map<std::pair<double, double>, double> centres;
  for (const Point& p : points) centres[{p.x, p.y}] += 1.0;

  const double sigma = sigma_px / downsample;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const Eigen::Index k = static_cast<Eigen::Index>(centres.size());
  Eigen::MatrixXd gy(h, k);
  Eigen::MatrixXd gx(k, w);
  Eigen::Index col = 0;
  for (const auto& [xy, weight] : centres) {
    const Point g = to_grid({xy.first, xy.second}, downsample);
    for (int y = 0; y < h; ++y) gy(y, col) = weight * std::exp(-(y - g.y) * (y - g.y) * inv_two_var);
    for (int x = 0; x < w; ++x) gx(col, x) = std::exp(-(x - g.x) * (x - g.x) * inv_two_var);
    ++col;
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dense = gy * gx;
  const double total = dense.sum();
  std::copy(dense.data(), dense.data() + dense.size(), grid.values.begin());
  if (total > 0.0) {
    for (double& v : grid.values) v /= total;
  }
  return grid;
}

SpatialSaliencyMap fixation_density_map(const FixationSet& fixations, double sigma_px,
                                        Resolution resolution, int downsample) {
  SpatialSaliencyMap map;
  map.normalization = Normalization::UnitSum;
  map.downsample = downsample;
  map.frames.resize(fixations.frames.size());
  parallel_for(fixations.frames.size(), [&](std::size_t f) {
    map.frames[f] = density_frame(fixations.frames[f], sigma_px, resolution, downsample);
  });
  return map;
}

SaliencyGrid upsample_bilinear(const SaliencyGrid& grid, Resolution resolution, int downsample) {
  if (downsample == 1 && grid.width == resolution.width && grid.height == resolution.height) {
    return grid;
  }
  SaliencyGrid out(resolution.width, resolution.height);
  if (grid.width == 0 || grid.height == 0) return out;
  for (int y = 0; y < resolution.height; ++y) {
    const double gy = std::clamp((y + 0.5) / downsample - 0.5, 0.0, grid.height - 1.0);
    const int y0 = static_cast<int>(gy);
    const int y1 = std::min(y0 + 1, grid.height - 1);
    const double ty = gy - y0;
    for (int x = 0; x < resolution.width; ++x) {
      const double gx = std::clamp((x + 0.5) / downsample - 0.5, 0.0, grid.width - 1.0);
      const int x0 = static_cast<int>(gx);
      const int x1 = std::min(x0 + 1, grid.width - 1);
      const double tx = gx - x0;
      const double top = grid.at(x0, y0) * (1 - tx) + grid.at(x1, y0) * tx;
      const double bottom = grid.at(x0, y1) * (1 - tx) + grid.at(x1, y1) * tx;
      out.at(x, y) = top * (1 - ty) + bottom * ty;
    }
  }
  return out;
}

double auc_judd(const SaliencyGrid& map, std::span<const Point> fixations) {
  if (fixations.empty()) throw Error(ErrorCode::Undefined, "AUC undefined without fixations");
  std::vector<double> fixated_values;
  std::set<std::size_t> fixated_cells;
  fixated_values.reserve(fixations.size());
  for (const Point& p : fixations) {
    const std::size_t cell = nearest_cell(map, p);
    fixated_values.push_back(map.values[cell]);
    fixated_cells.insert(cell);
  }
  if (fixated_cells.size() >= map.values.size()) {
    throw Error(ErrorCode::Undefined, "AUC undefined when every pixel is fixated");
  }
  std::vector<double> negatives;
  negatives.reserve(map.values.size() - fixated_cells.size());
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    if (!fixated_cells.contains(i)) negatives.push_back(map.values[i]);
  }
  std::sort(negatives.begin(), negatives.end());
  std::sort(fixated_values.begin(), fixated_values.end(), std::greater<>());

  const double n_fix = static_cast<double>(fixated_values.size());
  const double n_neg = static_cast<double>(negatives.size());
  double area = 0.0;
  double prev_tp = 0.0, prev_fp = 0.0;
  std::size_t i = 0;
  while (i < fixated_values.size()) {
    const double t = fixated_values[i];
    while (i < fixated_values.size() && fixated_values[i] == t) ++i;
    const double tp = i / n_fix;
    const auto first_at_or_above = std::lower_bound(negatives.begin(), negatives.end(), t);
    const double fp = static_cast<double>(negatives.end() - first_at_or_above) / n_neg;
    area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
    prev_tp = tp;
    prev_fp = fp;
  }
  area += (1.0 - prev_fp) * (1.0 + prev_tp) / 2.0;
  return area;
}

double nss(const SaliencyGrid& map, std::span<const Point> fixations) {
  if (fixations.empty()) throw Error(ErrorCode::Undefined, "NSS undefined without fixations");
  const double n = static_cast<double>(map.values.size());
  // Shifted by the first cell so a constant map has an exact mean and sd 0.
  const double shift = map.values.front();
  double offset = 0.0;
  for (double v : map.values) offset += v - shift;
  const double mean = shift + offset / n;
  double ss = 0.0;
  for (double v : map.values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) return 0.0;
  double sum = 0.0;
  for (const Point& p : fixations) sum += (map.values[nearest_cell(map, p)] - mean) / sd;
  return sum / static_cast<double>(fixations.size());
}

MetricStats per_frame_metric_stats(std::span<const std::optional<double>> scores) {
  MetricStats stats;
  const auto first = std::find_if(scores.begin(), scores.end(), [](const auto& s) { return s.has_value(); });
  if (first == scores.end()) throw Error(ErrorCode::NoData, "no frame has a defined score");
  // Deviations are taken from the first score so that equal scores give an
  // exact mean and a zero spread.
  const double shift = **first;
  double sum = 0.0;
  for (const auto& s : scores) {
    if (!s) continue;
    sum += *s - shift;
    ++stats.n_frames;
  }
  const double offset = sum / stats.n_frames;
  stats.mean = shift + offset;
  if (stats.n_frames > 1) {
    double ss = 0.0;
    for (const auto& s : scores) {
      if (s) ss += (*s - shift - offset) * (*s - shift - offset);
    }
    stats.std = std::sqrt(ss / (stats.n_frames - 1));
  }
  return stats;
}

std::vector<FrameScores> score_frames(const SpatialSaliencyMap& map, const FixationSet& reference) {
  std::vector<FrameScores> out(map.frames.size());
  parallel_for(map.frames.size(), [&](std::size_t f) {
    if (f >= reference.frames.size() || reference.frames[f].empty()) return;
    std::vector<Point> points;
    points.reserve(reference.frames[f].size());
    for (const Point& p : reference.frames[f]) points.push_back(to_grid(p, map.downsample));
    try {
      out[f].auc = auc_judd(map.frames[f], points);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Undefined) throw;
    }
    out[f].nss = nss(map.frames[f], points);
  });
  return out;
}

}  // namespace tsal::spatial
