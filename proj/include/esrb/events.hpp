#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace esrb {

/// One time quantum, the resolution of event timestamps on disk.
inline constexpr double kTimeQuantum = 1e-6;

struct Event {
  double t = 0.0;  // seconds
  int x = 0;
  int y = 0;
  int polarity = 1;  // +1 or -1

  friend bool operator==(const Event&, const Event&) = default;
};

/// Canonical ordering: t, then y, then x, then polarity.
bool event_less(const Event& a, const Event& b);

/// Time-sorted polar spike train over a width x height sensor, restricted to
/// the half-open window [t_start, t_end).
///
/// Instances are immutable once constructed. The checked constructor rejects
/// events that are out of order, out of the window, off the sensor, or carry a
/// polarity other than +1/-1.
class EventStream {
 public:
  EventStream() = default;
  EventStream(int width, int height, double t_start, double t_end,
              std::vector<Event> events = {});

  /// Same validation as the constructor, but sorts canonically first.
  static EventStream from_unsorted(int width, int height, double t_start,
                                   double t_end, std::vector<Event> events);

  int width() const { return width_; }
  int height() const { return height_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool contains_pixel(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double t_start_ = 0.0;
  double t_end_ = 0.0;
  std::vector<Event> events_;
};

/// Discrete value of the integral of the pixel's spike train from a to b.
/// For a <= b this is the polarity sum over events with t in [a, b); for
/// a > b it is -signed_count(stream, x, y, b, a).
int signed_count(const EventStream& stream, int x, int y, double a, double b);

/// signed_count for every pixel at once, row-major.
std::vector<int> signed_count_map(const EventStream& stream, double a, double b);

/// Events with t in [a, b), re-windowed to [a, b).
EventStream slice(const EventStream& stream, double a, double b);

/// Time flip with polarity reversal over [0, f): (t, p) -> (f - t, -p).
/// An image landing on or past f (only t == 0 in exact arithmetic) is clamped
/// to f - kTimeQuantum.
EventStream reverse_shuffle(const EventStream& stream);

/// Time shift of a stream over [f, T) onto [0, T - f).
EventStream shift_shuffle(const EventStream& stream);

}  // namespace esrb
