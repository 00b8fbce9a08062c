#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "tsal/aggregate.hpp"
#include "tsal/frame.hpp"
#include "tsal/io.hpp"
#include "tsal/spatial.hpp"

namespace tsal::render {

using Rgb = std::array<float, 3>;

// Blue -> red gradient: score_color(s) = (s, 0, 1 - s), s clamped to [0, 1].
// Written out through io::to_byte, s = 0.5 becomes (128, 0, 128).
Rgb score_color(double score);

struct TemporalOverlayStyle {
  int border_px = 12;
  int bar_height_px = 10;
};

// Paints a border of score_color(score) and, just inside the bottom border,
// a bar whose length is score * (width - 2 * border_px). Nothing else changes.
Frame temporal_overlay_frame(const Frame& frame, double score, const TemporalOverlayStyle& style = {});

struct SpatialOverlayStyle {
  int dot_radius_px = 3;
  Rgb dot_color{0.0f, 1.0f, 0.0f};
};

// Per-pixel opacity of the heat map: value / per-frame maximum, after
// bilinear upsampling to the frame resolution. All zero for a zero map.
spatial::SaliencyGrid overlay_alpha(const spatial::SaliencyGrid& map, geometry::Resolution resolution,
                                    int downsample);

// out = (1 - a) * frame + a * score_color(a), a = overlay_alpha; optional
// fixation dots drawn on top.
Frame spatial_overlay_frame(const Frame& frame, const spatial::SaliencyGrid& map, int downsample,
                            const std::vector<spatial::Point>* fixations = nullptr,
                            const SpatialOverlayStyle& style = {});

// Renders every frame of the asset to out_dir/NNNNN.<ext>. Throws
// DurationMismatch when the map length differs from the asset.
std::vector<std::filesystem::path> render_temporal_overlay(const io::VideoAsset& asset,
                                                           const aggregate::TemporalSaliencyMap& map,
                                                           const std::filesystem::path& out_dir,
                                                           const TemporalOverlayStyle& style = {},
                                                           const std::string& extension = ".ppm");

std::vector<std::filesystem::path> render_spatial_overlay(const io::VideoAsset& asset,
                                                          const spatial::SpatialSaliencyMap& maps,
                                                          const spatial::FixationSet* fixations,
                                                          const std::filesystem::path& out_dir,
                                                          const SpatialOverlayStyle& style = {},
                                                          const std::string& extension = ".ppm");

}  // namespace tsal::render
