#include "tsal/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsal/error.hpp"

namespace tsal::geometry {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ViewingGeometry& g) {
  if (g.resolution_px.width <= 0 || g.resolution_px.height <= 0) {
    throw Error(ErrorCode::InvalidGeometry, "resolution must be positive");
  }
  if (!positive_finite(g.distance_cm)) {
    throw Error(ErrorCode::InvalidGeometry, "viewing distance must be positive");
  }
  if (!positive_finite(g.screen_width_cm) || !positive_finite(g.pixel_pitch_cm())) {
    throw Error(ErrorCode::InvalidGeometry, "screen width must be positive");
  }
}

ViewingGeometry geometry_from_extent(Resolution resolution_px, double full_width_deg,
                                     double distance_cm) {
  if (!(full_width_deg > 0.0 && full_width_deg < 180.0)) {
    throw Error(ErrorCode::InvalidGeometry,
                "full width angle must lie in (0, 180) degrees, got " +
                    std::to_string(full_width_deg));
  }
  ViewingGeometry g{resolution_px, distance_cm,
                    2.0 * distance_cm * std::tan(full_width_deg / 2.0 * kDegToRad)};
  validate(g);
  return g;
}

ViewingGeometry reference_geometry() { return geometry_from_extent({1280, 720}, 38.2, 50.0); }

double deg_to_px(double angle_deg, const ViewingGeometry& g) {
  if (!(angle_deg >= 0.0 && angle_deg < 180.0)) {
    throw Error(ErrorCode::InvalidAngle,
                "angle must lie in [0, 180) degrees, got " + std::to_string(angle_deg));
  }
  validate(g);
  return 2.0 * g.distance_cm * std::tan(angle_deg / 2.0 * kDegToRad) / g.pixel_pitch_cm();
}

double px_to_deg(double pixels, const ViewingGeometry& g) {
  if (!(pixels >= 0.0) || !std::isfinite(pixels)) {
    throw Error(ErrorCode::InvalidLength, "pixel length must be non-negative");
  }
  validate(g);
  return 2.0 * std::atan(pixels * g.pixel_pitch_cm() / (2.0 * g.distance_cm)) / kDegToRad;
}

}  // namespace tsal::geometry
