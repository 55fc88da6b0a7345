#pragma once

#include <cstddef>
#include <vector>

#include "esrb/frame.hpp"

namespace esrb {

/// Dense channels x height x width array of doubles.
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, fill) {}

  std::size_t plane() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return data.size(); }
  double& at(int c, int y, int x) { return data[c * plane() + static_cast<std::size_t>(y) * width + x]; }
  double at(int c, int y, int x) const {
    return data[c * plane() + static_cast<std::size_t>(y) * width + x];
  }
  double* row(int c, int y) { return data.data() + c * plane() + static_cast<std::size_t>(y) * width; }
  const double* row(int c, int y) const {
    return data.data() + c * plane() + static_cast<std::size_t>(y) * width;
  }
  bool same_shape(const Tensor& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

/// Single-channel tensor from a frame, every pixel multiplied by `gain`.
Tensor to_tensor(const Frame& frame, double gain = 1.0);

/// Frame from channel 0 of a single-channel tensor.
Frame to_frame(const Tensor& t, double time = 0.0, double gain = 1.0);

double dot(const Tensor& a, const Tensor& b);

}  // namespace esrb
