#include "esrb/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "esrb/random.hpp"

namespace esrb {

void Dictionary::validate() const {
  const auto& s = shape;
  if (s.out_channels < 1 || s.in_channels < 1 || s.kernel_h < 1 || s.kernel_w < 1) {
    throw std::domain_error("dictionary: dimensions must be positive");
  }
  if (s.kernel_h % 2 == 0 || s.kernel_w % 2 == 0) {
    throw std::domain_error("dictionary: kernel sizes must be odd");
  }
  const std::size_t expected = static_cast<std::size_t>(s.out_channels) * s.in_channels *
                               s.kernel_h * s.kernel_w;
  if (weights.size() != expected) throw std::domain_error("dictionary: weight count mismatch");
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::domain_error("dictionary: non-finite weight");
  }
}

Tensor apply(const Dictionary& d, const Tensor& in) {
  const auto& s = d.shape;
  if (in.channels != s.in_channels) {
    std::ostringstream os;
    os << "apply: dictionary expects " << s.in_channels << " input channels, got "
       << in.channels;
    throw std::domain_error(os.str());
  }
  const int ch = s.kernel_h / 2;
  const int cw = s.kernel_w / 2;
  Tensor out(s.out_channels, in.height, in.width);
  for (int o = 0; o < s.out_channels; ++o) {
    for (int i = 0; i < s.in_channels; ++i) {
      for (int u = 0; u < s.kernel_h; ++u) {
        for (int v = 0; v < s.kernel_w; ++v) {
          const double w = d.weight(o, i, u, v);
          if (w == 0.0) continue;
          const int dy = u - ch;
          const int dx = v - cw;
          const int y_lo = std::max(0, -dy), y_hi = std::min(in.height, in.height - dy);
          const int x_lo = std::max(0, -dx), x_hi = std::min(in.width, in.width - dx);
          for (int y = y_lo; y < y_hi; ++y) {
            double* dst = out.row(o, y);
            const double* src = in.row(i, y + dy);
            for (int x = x_lo; x < x_hi; ++x) dst[x] += w * src[x + dx];
          }
        }
      }
    }
  }
  return out;
}

Tensor apply_adjoint(const Dictionary& d, const Tensor& sig) {
  const auto& s = d.shape;
  if (sig.channels != s.out_channels) {
    std::ostringstream os;
    os << "apply_adjoint: dictionary expects " << s.out_channels
       << " signal channels, got " << sig.channels;
    throw std::domain_error(os.str());
  }
  const int ch = s.kernel_h / 2;
  const int cw = s.kernel_w / 2;
  Tensor out(s.in_channels, sig.height, sig.width);
  for (int i = 0; i < s.in_channels; ++i) {
    for (int o = 0; o < s.out_channels; ++o) {
      for (int u = 0; u < s.kernel_h; ++u) {
        for (int v = 0; v < s.kernel_w; ++v) {
          const double w = d.weight(o, i, u, v);
          if (w == 0.0) continue;
          const int dy = u - ch;
          const int dx = v - cw;
          // Transpose of out[y] += w * in[y + dy]: in[y'] += w * out[y' - dy].
          const int y_lo = std::max(0, dy), y_hi = std::min(sig.height, sig.height + dy);
          const int x_lo = std::max(0, dx), x_hi = std::min(sig.width, sig.width + dx);
          for (int y = y_lo; y < y_hi; ++y) {
            double* dst = out.row(i, y);
            const double* src = sig.row(o, y - dy);
            for (int x = x_lo; x < x_hi; ++x) dst[x] += w * src[x - dx];
          }
        }
      }
    }
  }
  return out;
}

Dictionary make_dictionary(DictionaryKind kind, const DictionaryShape& shape,
                           std::uint64_t seed, DictionaryRole role) {
  Dictionary d;
  d.shape = shape;
  d.role = role;
  if (shape.out_channels < 1 || shape.in_channels < 1 || shape.kernel_h < 1 ||
      shape.kernel_w < 1 || shape.kernel_h % 2 == 0 || shape.kernel_w % 2 == 0) {
    throw std::domain_error("make_dictionary: invalid dimensions");
  }
  d.weights.assign(static_cast<std::size_t>(shape.out_channels) * shape.in_channels *
                       shape.kernel_h * shape.kernel_w,
                   0.0);
  const int ch = shape.kernel_h / 2;
  const int cw = shape.kernel_w / 2;

  switch (kind) {
    case DictionaryKind::identity: {
      const int in = shape.in_channels;
      if (shape.out_channels % in != 0) {
        throw std::domain_error("make_dictionary: identity needs out % in == 0");
      }
      const int fan = shape.out_channels / in;
      for (int o = 0; o < shape.out_channels; ++o) d.weight(o, o / fan, ch, cw) = 1.0;
      break;
    }
    case DictionaryKind::dct: {
      const int kh = shape.kernel_h;
      const int kw = shape.kernel_w;
      if (shape.in_channels != kh * kw) {
        throw std::domain_error("make_dictionary: dct needs in == kernel_h * kernel_w");
      }
      auto basis = [](int n, int k, int u) {
        const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        return scale * std::cos(std::numbers::pi * (2.0 * u + 1.0) * k / (2.0 * n));
      };
      for (int p = 0; p < kh; ++p) {
        for (int q = 0; q < kw; ++q) {
          const int atom = p * kw + q;
          for (int u = 0; u < kh; ++u) {
            for (int v = 0; v < kw; ++v) {
              const double a = basis(kh, p, u) * basis(kw, q, v);
              for (int o = 0; o < shape.out_channels; ++o) d.weight(o, atom, u, v) = a;
            }
          }
        }
      }
      break;
    }
    case DictionaryKind::seeded_gaussian: {
      Rng rng(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      const std::size_t k = static_cast<std::size_t>(shape.kernel_h) * shape.kernel_w;
      for (std::size_t start = 0; start < d.weights.size(); start += k) {
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          d.weights[start + j] = normal(rng);
          norm += d.weights[start + j] * d.weights[start + j];
        }
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < k; ++j) d.weights[start + j] /= norm;
      }
      break;
    }
  }
  return d;
}

}  // namespace esrb
