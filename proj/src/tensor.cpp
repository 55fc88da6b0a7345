#include "esrb/tensor.hpp"

#include <stdexcept>

namespace esrb {

Tensor to_tensor(const Frame& frame, double gain) {
  Tensor t(1, frame.height, frame.width);
  for (std::size_t i = 0; i < frame.size(); ++i) t.data[i] = frame.pixels[i] * gain;
  return t;
}

Frame to_frame(const Tensor& t, double time, double gain) {
  if (t.channels != 1) throw std::domain_error("to_frame: tensor must have one channel");
  Frame f(t.width, t.height, time);
  for (std::size_t i = 0; i < f.size(); ++i) f.pixels[i] = t.data[i] * gain;
  return f;
}

double dot(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw std::domain_error("dot: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

}  // namespace esrb
