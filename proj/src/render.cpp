#include "tsal/render.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "tsal/error.hpp"
#include "tsal/image.hpp"
#include "tsal/parallel.hpp"

namespace tsal::render {
namespace fs = std::filesystem;

Rgb score_color(double score) {
  const float s = static_cast<float>(std::clamp(score, 0.0, 1.0));
  return {s, 0.0f, 1.0f - s};
}

namespace {

void fill_rect(Frame& f, int x0, int y0, int x1, int y1, const Rgb& color) {
  x0 = std::max(0, x0);
  y0 = std::max(0, y0);
  x1 = std::min(f.width, x1);
  y1 = std::min(f.height, y1);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      for (int c = 0; c < 3; ++c) f.at(x, y, c) = color[c];
    }
  }
}

fs::path numbered(const fs::path& dir, int index, const std::string& extension) {
  return dir / fmt::format("{:05d}{}", index, extension);
}

}  // namespace

Frame temporal_overlay_frame(const Frame& frame, double score, const TemporalOverlayStyle& style) {
  Frame out = frame;
  const Rgb color = score_color(score);
  const int b = style.border_px;
  fill_rect(out, 0, 0, out.width, b, color);
  fill_rect(out, 0, out.height - b, out.width, out.height, color);
  fill_rect(out, 0, b, b, out.height - b, color);
  fill_rect(out, out.width - b, b, out.width, out.height - b, color);
  const int track = std::max(0, out.width - 2 * b);
  const int length = static_cast<int>(std::lround(std::clamp(score, 0.0, 1.0) * track));
  fill_rect(out, b, out.height - b - style.bar_height_px, b + length, out.height - b, color);
  return out;
}

spatial::SaliencyGrid overlay_alpha(const spatial::SaliencyGrid& map, geometry::Resolution resolution,
                                    int downsample) {
  spatial::SaliencyGrid alpha = spatial::upsample_bilinear(map, resolution, downsample);
  double peak = 0.0;
  for (double v : alpha.values) peak = std::max(peak, v);
  for (double& v : alpha.values) v = peak > 0.0 ? std::max(0.0, v / peak) : 0.0;
  return alpha;
}

Frame spatial_overlay_frame(const Frame& frame, const spatial::SaliencyGrid& map, int downsample,
                            const std::vector<spatial::Point>* fixations,
                            const SpatialOverlayStyle& style) {
  Frame out = frame;
  const spatial::SaliencyGrid alpha = overlay_alpha(map, {frame.width, frame.height}, downsample);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const double a = alpha.at(x, y);
      if (a <= 0.0) continue;
      const Rgb heat = score_color(a);
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = static_cast<float>((1.0 - a) * frame.at(x, y, c) + a * heat[c]);
      }
    }
  }
  if (fixations) {
    const int r = style.dot_radius_px;
    for (const auto& p : *fixations) {
      const int cx = static_cast<int>(std::lround(p.x));
      const int cy = static_cast<int>(std::lround(p.y));
      for (int y = cy - r; y <= cy + r; ++y) {
        for (int x = cx - r; x <= cx + r; ++x) {
          if (x < 0 || y < 0 || x >= out.width || y >= out.height) continue;
          if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
          for (int c = 0; c < 3; ++c) out.at(x, y, c) = style.dot_color[c];
        }
      }
    }
  }
  return out;
}

std::vector<fs::path> render_temporal_overlay(const io::VideoAsset& asset,
                                              const aggregate::TemporalSaliencyMap& map,
                                              const fs::path& out_dir,
                                              const TemporalOverlayStyle& style,
                                              const std::string& extension) {
  if (static_cast<int>(map.scores.size()) != asset.duration_frames()) {
    throw Error(ErrorCode::DurationMismatch,
                fmt::format("map has {} frames, video has {}", map.scores.size(), asset.duration_frames()));
  }
  if (!map.normalized) throw Error(ErrorCode::InvalidConfig, "temporal overlay needs a normalized map");
  fs::create_directories(out_dir);
  std::vector<fs::path> paths(asset.duration_frames());
  parallel_for(paths.size(), [&](std::size_t i) {
    const int f = static_cast<int>(i);
    paths[i] = numbered(out_dir, f, extension);
    io::write_image(paths[i], temporal_overlay_frame(asset.load_frame(f), map.scores[i], style));
  });
  return paths;
}

std::vector<fs::path> render_spatial_overlay(const io::VideoAsset& asset,
                                             const spatial::SpatialSaliencyMap& maps,
                                             const spatial::FixationSet* fixations,
                                             const fs::path& out_dir,
                                             const SpatialOverlayStyle& style,
                                             const std::string& extension) {
  if (static_cast<int>(maps.frames.size()) != asset.duration_frames() ||
      (fixations && static_cast<int>(fixations->frames.size()) != asset.duration_frames())) {
    throw Error(ErrorCode::DurationMismatch,
                fmt::format("maps have {} frames, video has {}", maps.frames.size(), asset.duration_frames()));
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> paths(asset.duration_frames());
  parallel_for(paths.size(), [&](std::size_t i) {
    const int f = static_cast<int>(i);
    paths[i] = numbered(out_dir, f, extension);
    io::write_image(paths[i], spatial_overlay_frame(asset.load_frame(f), maps.frames[i], maps.downsample,
                                                    fixations ? &fixations->frames[i] : nullptr, style));
  });
  return paths;
}

}  // namespace tsal::render
