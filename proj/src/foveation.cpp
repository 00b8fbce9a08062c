#include "tsal/foveation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsal/error.hpp"

namespace tsal::foveation {
namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double w = std::exp(-(k * k) / (2.0 * sigma * sigma));
    kernel[k + radius] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;
  return kernel;
}

}  // namespace

Frame gaussian_blur(const Frame& frame, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "blur sigma must be non-negative");
  }
  if (sigma == 0.0 || frame.width == 0 || frame.height == 0) return frame;

  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = frame.width;
  const int h = frame.height;

  std::vector<double> horizontal(frame.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        const double weight = kernel[k + radius];
        for (int c = 0; c < 3; ++c) acc[c] += weight * frame.at(sx, y, c);
      }
      const std::size_t i = frame.index(x, y);
      for (int c = 0; c < 3; ++c) horizontal[i + c] = acc[c];
    }
  }

  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        const double weight = kernel[k + radius];
        const std::size_t i = frame.index(x, sy);
        for (int c = 0; c < 3; ++c) acc[c] += weight * horizontal[i + c];
      }
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(acc[c]);
    }
  }
  return out;
}

double window_alpha(double distance, const WindowSpec& window) {
  const double inner = window.radius_px - window.feather_px / 2.0;
  const double outer = window.radius_px + window.feather_px / 2.0;
  if (distance <= inner) return 1.0;
  if (distance >= outer) return 0.0;
  return (outer - distance) / (outer - inner);
}

Frame composite_window(const Frame& blurred, const Frame& sharp, Point center,
                       const WindowSpec& window) {
  if (blurred.width != sharp.width || blurred.height != sharp.height) {
    throw Error(ErrorCode::FrameMismatch, "blurred and sharp frames differ in size");
  }
  if (!(window.radius_px > 0.0) || !(window.feather_px >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "window radius must be positive, feather non-negative");
  }
  Frame out = blurred;
  const double reach = window.radius_px + window.feather_px / 2.0;
  const int y0 = std::max(0, static_cast<int>(std::floor(center.y - reach)));
  const int y1 = std::min(blurred.height - 1, static_cast<int>(std::ceil(center.y + reach)));
  const int x0 = std::max(0, static_cast<int>(std::floor(center.x - reach)));
  const int x1 = std::min(blurred.width - 1, static_cast<int>(std::ceil(center.x + reach)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double alpha = window_alpha(std::hypot(x - center.x, y - center.y), window);
      if (alpha <= 0.0) continue;
      const std::size_t i = out.index(x, y);
      for (int c = 0; c < 3; ++c) {
        if (alpha >= 1.0) {
          out.pixels[i + c] = sharp.pixels[i + c];
        } else {
          out.pixels[i + c] = static_cast<float>(alpha * sharp.pixels[i + c] +
                                                 (1.0 - alpha) * blurred.pixels[i + c]);
        }
      }
    }
  }
  return out;
}

}  // namespace tsal::foveation
