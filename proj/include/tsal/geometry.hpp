#pragma once

namespace tsal::geometry {

struct Resolution {
  int width = 0;
  int height = 0;

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Physical layout of the stimulus area relative to the observer's eye.
// Pixels are square; the pitch is taken from the horizontal extent.
struct ViewingGeometry {
  Resolution resolution_px;
  double distance_cm = 0.0;
  double screen_width_cm = 0.0;

  double pixel_pitch_cm() const { return screen_width_cm / resolution_px.width; }
};

// Throws Error(InvalidGeometry) unless every field is strictly positive and finite.
void validate(const ViewingGeometry& g);

ViewingGeometry geometry_from_extent(Resolution resolution_px, double full_width_deg,
                                     double distance_cm);

// The laboratory setup: 1280x720 spanning 38.2 degrees horizontally at 50 cm.
ViewingGeometry reference_geometry();

// Extent in pixels of a stimulus subtending angle_deg, symmetric about the
// line of sight. Exact tangent conversion: 2 d tan(a/2) / pitch.
double deg_to_px(double angle_deg, const ViewingGeometry& g);

double px_to_deg(double pixels, const ViewingGeometry& g);

}  // namespace tsal::geometry
