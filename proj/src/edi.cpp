#include "esrb/edi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace esrb {

namespace {

constexpr double kDivisionGuard = 1e-12;

// Events grouped by pixel, each group in time order.
struct PixelBuckets {
  std::vector<std::size_t> offsets;  // pixel_count + 1
  std::vector<Event> events;
};

PixelBuckets bucket_by_pixel(const EventStream& stream) {
  PixelBuckets b;
  const std::size_t n = stream.pixel_count();
  b.offsets.assign(n + 1, 0);
  for (const Event& e : stream.events()) {
    ++b.offsets[static_cast<std::size_t>(e.y) * stream.width() + e.x + 1];
  }
  for (std::size_t i = 0; i < n; ++i) b.offsets[i + 1] += b.offsets[i];
  b.events.resize(stream.size());
  std::vector<std::size_t> cursor(b.offsets.begin(), b.offsets.end() - 1);
  for (const Event& e : stream.events()) {
    b.events[cursor[static_cast<std::size_t>(e.y) * stream.width() + e.x]++] = e;
  }
  return b;
}

}  // namespace

EdiMap double_integral(const EventStream& stream, double c,
                       std::optional<double> anchor) {
  const double t0 = stream.t_start();
  const double t1 = stream.t_end();
  const double length = t1 - t0;
  if (!(length > 0.0)) {
    throw std::domain_error("double_integral: window length must be positive");
  }
  const double ref = anchor.value_or(t0);
  if (!(ref >= t0 && ref <= t1)) {
    throw std::domain_error("double_integral: anchor outside the window");
  }

  EdiMap out{stream.width(), stream.height(), ref, length,
             std::vector<double>(stream.pixel_count(), 1.0)};
  const PixelBuckets buckets = bucket_by_pixel(stream);

  for (std::size_t px = 0; px < stream.pixel_count(); ++px) {
    const auto first = buckets.events.begin() + buckets.offsets[px];
    const auto last = buckets.events.begin() + buckets.offsets[px + 1];
    if (first == last) continue;

    // Count at the window start: minus the events in [t0, ref).
    int count = 0;
    for (auto it = first; it != last && it->t < ref; ++it) count -= it->polarity;

    double acc = 0.0;
    double prev = t0;
    for (auto it = first; it != last; ++it) {
      acc += (it->t - prev) * std::exp(c * count);
      prev = it->t;
      count += it->polarity;
    }
    acc += (t1 - prev) * std::exp(c * count);
    out.values[px] = acc / length;
  }
  return out;
}

EdiMap resm(const EventStream& stream, double f, double c) {
  const double t0 = stream.t_start();
  const double t1 = stream.t_end();
  if (!(f >= t0 && f <= t1)) {
    std::ostringstream os;
    os << "resm: f=" << f << " outside [" << t0 << ", " << t1 << "]";
    throw std::domain_error(os.str());
  }
  if (f == t0) return double_integral(stream, c, t0);

  const double total = t1 - t0;
  const double weight = (f - t0) / total;

  // Events at the window start map to f under the flip; their contribution
  // to the direct integral is zero-measure, so they are left out here rather
  // than clamped onto a quantum-long segment.
  EventStream before = shift_shuffle(slice(stream, t0, f));
  {
    auto evs = before.events();
    auto keep = std::find_if(evs.begin(), evs.end(),
                             [](const Event& e) { return e.t > 0.0; });
    before = EventStream(before.width(), before.height(), 0.0, before.t_end(),
                         std::vector<Event>(keep, evs.end()));
  }
  const EdiMap head = double_integral(reverse_shuffle(before), c);

  EdiMap out{stream.width(), stream.height(), f, total, head.values};
  if (f == t1) return out;

  const EdiMap tail = double_integral(shift_shuffle(slice(stream, f, t1)), c);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = weight * head.values[i] + (1.0 - weight) * tail.values[i];
  }
  return out;
}

Frame edi_reconstruct(const Frame& blurry, const EdiMap& edi) {
  if (blurry.width != edi.width || blurry.height != edi.height) {
    throw std::domain_error("edi_reconstruct: Y and E dimensions differ");
  }
  Frame out(blurry.width, blurry.height, edi.reference);
  std::size_t guarded = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double e = edi.values[i];
    if (!(e >= kDivisionGuard)) {
      e = kDivisionGuard;
      ++guarded;
    }
    out.pixels[i] = std::max(0.0, blurry.pixels[i] / e);
  }
  if (guarded > 0) {
    std::clog << "edi_reconstruct: " << guarded
              << " pixel(s) with E below 1e-12 were guarded\n";
  }
  return out;
}

FrameSequence sequence_reconstruct(const Frame& blurry, const EventStream& stream,
                                   std::span<const double> times, double c,
                                   unsigned threads) {
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  for (double f : sorted) {
    if (!(f >= stream.t_start() && f <= stream.t_end())) {
      throw std::domain_error("sequence_reconstruct: time outside the exposure");
    }
  }

  FrameSequence out(sorted.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(sorted.size()));

  if (threads <= 1) {
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      out[k] = edi_reconstruct(blurry, resm(stream, sorted[k], c));
    }
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < sorted.size(); k = next++) {
          out[k] = edi_reconstruct(blurry, resm(stream, sorted[k], c));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace esrb
