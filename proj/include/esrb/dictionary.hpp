#pragma once

#include <cstdint>
#include <vector>

#include "esrb/tensor.hpp"

namespace esrb {

enum class DictionaryRole { image, event, high_res };
enum class DictionaryKind { identity, dct, seeded_gaussian };

struct DictionaryShape {
  int out_channels = 1;
  int in_channels = 1;
  int kernel_h = 1;
  int kernel_w = 1;
};

/// Convolutional dictionary: out_channels x in_channels x kernel_h x kernel_w
/// kernels, row-major. Kernel sizes are odd so same-padding is centred.
struct Dictionary {
  DictionaryShape shape;
  std::vector<double> weights;
  DictionaryRole role = DictionaryRole::image;

  double& weight(int o, int i, int u, int v) {
    return weights[((static_cast<std::size_t>(o) * shape.in_channels + i) * shape.kernel_h + u) *
                       shape.kernel_w + v];
  }
  double weight(int o, int i, int u, int v) const {
    return weights[((static_cast<std::size_t>(o) * shape.in_channels + i) * shape.kernel_h + u) *
                       shape.kernel_w + v];
  }

  /// Throws std::domain_error on even kernels, size mismatch or non-finite entries.
  void validate() const;
};

/// d * x: zero-padded, stride-1 "same" correlation summed over input channels,
///   out[o](y, x) = sum_i sum_{u,v} w[o][i][u][v] in[i](y + u - ch, x + v - cw).
Tensor apply(const Dictionary& d, const Tensor& coefficients);

/// d^T * v, the exact adjoint of apply().
Tensor apply_adjoint(const Dictionary& d, const Tensor& signal);

/// identity: centred delta kernels (output o reads input o / (out / in));
/// dct: separable orthonormal 2-D DCT-II atoms, one per input channel,
///      replicated across output channels, requires in == kernel_h * kernel_w;
/// seeded_gaussian: i.i.d. normal kernels scaled to unit norm per (o, i).
Dictionary make_dictionary(DictionaryKind kind, const DictionaryShape& shape,
                           std::uint64_t seed = 0,
                           DictionaryRole role = DictionaryRole::image);

}  // namespace esrb
