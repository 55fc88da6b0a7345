#pragma once

#include <optional>
#include <span>
#include <vector>

#include "esrb/events.hpp"
#include "esrb/frame.hpp"

namespace esrb {

/// Per-pixel event double integral E(f): the window average of
/// exp(c * signed event count accumulated from the reference time).
struct EdiMap {
  int width = 0;
  int height = 0;
  double reference = 0.0;  // f, absolute seconds
  double length = 0.0;     // window length L
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// Exact piecewise evaluation of E over the stream's window. The inner count is
/// anchored at `anchor` (absolute time, default: window start); the outer
/// integral sums segment_length * exp(c * count) between consecutive events.
EdiMap double_integral(const EventStream& stream, double c,
                       std::optional<double> anchor = std::nullopt);

/// Event shuffle-and-merge: E(f) for any f in [t_start, t_end] from two
/// base-time double integrals, one on the time-reversed, polarity-flipped
/// events before f and one on the shifted events from f on, merged with
/// weights (f - t_start)/T and 1 - (f - t_start)/T.
EdiMap resm(const EventStream& stream, double f, double c);

/// I(f) = Y / E(f), clamped at zero.
Frame edi_reconstruct(const Frame& blurry, const EdiMap& edi);

/// One EDI reconstruction per requested time, returned in time order.
/// `threads` caps the worker count (0 = hardware concurrency).
FrameSequence sequence_reconstruct(const Frame& blurry, const EventStream& stream,
                                   std::span<const double> times, double c,
                                   unsigned threads = 1);

}  // namespace esrb
