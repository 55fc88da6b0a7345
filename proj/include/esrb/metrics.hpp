#pragma once

#include <limits>
#include <span>

#include "esrb/frame.hpp"

namespace esrb {

/// PSNR of identical frames.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricReport {
  double psnr = 0.0;  // dB, kInfinitePsnr when the frames match exactly
  double ssim = 0.0;
};

/// 10 log10(peak^2 / MSE).
double psnr(const Frame& a, const Frame& b, double peak = 255.0);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5) over the valid region,
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2, averaged over the map.
double ssim(const Frame& a, const Frame& b, double peak = 255.0);

MetricReport evaluate(const Frame& a, const Frame& b, double peak = 255.0);

/// Grayscale from interleaved RGB with weights 0.299, 0.587, 0.114.
Frame luma(int width, int height, std::span<const double> rgb);

}  // namespace esrb
