#pragma once

#include <cstddef>
#include <vector>

namespace esrb {

/// Nonnegative intensity raster (row-major) with a timestamp in seconds.
/// Working range is [0, 255] by convention.
struct Frame {
  int width = 0;
  int height = 0;
  double t = 0.0;
  std::vector<double> pixels;

  Frame() = default;
  Frame(int w, int h, double time = 0.0, double fill = 0.0)
      : width(w), height(h), t(time),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t size() const { return pixels.size(); }
  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool same_shape(const Frame& other) const {
    return width == other.width && height == other.height;
  }
};

using FrameSequence = std::vector<Frame>;

}  // namespace esrb
