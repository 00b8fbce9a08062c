#pragma once

#include <cstddef>
#include <vector>

namespace tsal {

// RGB frame, row-major, channels interleaved, values in [0, 1].
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  Frame() = default;
  Frame(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  float& at(int x, int y, int c) { return pixels[index(x, y) + c]; }
  float at(int x, int y, int c) const { return pixels[index(x, y) + c]; }

  friend bool operator==(const Frame&, const Frame&) = default;
};

}  // namespace tsal
