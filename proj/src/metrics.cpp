#include "esrb/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace esrb {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w{};
  const int r = kWindow / 2;
  double sum = 0.0;
  for (int u = 0; u < kWindow; ++u) {
    for (int v = 0; v < kWindow; ++v) {
      const double d2 = (u - r) * (u - r) + (v - r) * (v - r);
      w[u * kWindow + v] = std::exp(-d2 / (2.0 * kSigma * kSigma));
      sum += w[u * kWindow + v];
    }
  }
  for (double& x : w) x /= sum;
  return w;
}

void require_same_shape(const Frame& a, const Frame& b, const char* who) {
  if (!a.same_shape(b)) throw std::domain_error(std::string(who) + ": dimension mismatch");
}

}  // namespace

double psnr(const Frame& a, const Frame& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw std::domain_error("psnr: peak must be positive");
  if (a.size() == 0) throw std::domain_error("psnr: empty frames");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels[i] - b.pixels[i];
    sse += d * d;
  }
  if (sse == 0.0) return kInfinitePsnr;
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Frame& a, const Frame& b, double peak) {
  require_same_shape(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow) {
    throw std::domain_error("ssim: frames smaller than the 11x11 window");
  }
  static const auto window = gaussian_window();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);

  double total = 0.0;
  const int rows = a.height - kWindow + 1;
  const int cols = a.width - kWindow + 1;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int u = 0; u < kWindow; ++u) {
        for (int v = 0; v < kWindow; ++v) {
          const double w = window[u * kWindow + v];
          const double pa = a.at(x + v, y + u);
          const double pb = b.at(x + v, y + u);
          ma += w * pa;
          mb += w * pb;
          saa += w * pa * pa;
          sbb += w * pb * pb;
          sab += w * pa * pb;
        }
      }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return total / (static_cast<double>(rows) * cols);
}

MetricReport evaluate(const Frame& a, const Frame& b, double peak) {
  MetricReport r;
  r.psnr = psnr(a, b, peak);
  r.ssim = ssim(a, b, peak);
  return r;
}

Frame luma(int width, int height, std::span<const double> rgb) {
  Frame out(width, height);
  if (rgb.size() != out.size() * 3) throw std::domain_error("luma: expected 3 samples per pixel");
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.pixels[i] = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] + 0.114 * rgb[3 * i + 2];
  }
  return out;
}

}  // namespace esrb
