#pragma once

#include "tsal/frame.hpp"

namespace tsal::foveation {

struct WindowSpec {
  double radius_px = 200.0;
  // Width of the linear transition band centred on the radius; 0 is a hard edge.
  double feather_px = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Separable Gaussian blur. The kernel is truncated at ceil(3 sigma) taps per
// side and renormalized; borders replicate the edge pixel. sigma == 0 copies.
Frame gaussian_blur(const Frame& frame, double sigma);

// Per-pixel blend alpha * sharp + (1 - alpha) * blurred, alpha falling from 1
// to 0 across the feather band around `radius_px` from `center`.
Frame composite_window(const Frame& blurred, const Frame& sharp, Point center,
                       const WindowSpec& window);

// Alpha used by composite_window for a pixel at distance d from the centre.
double window_alpha(double distance, const WindowSpec& window);

}  // namespace tsal::foveation
