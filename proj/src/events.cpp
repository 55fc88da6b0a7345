#include "esrb/events.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace esrb {

bool event_less(const Event& a, const Event& b) {
  return std::tie(a.t, a.y, a.x, a.polarity) <
         std::tie(b.t, b.y, b.x, b.polarity);
}

EventStream::EventStream(int width, int height, double t_start, double t_end,
                         std::vector<Event> events)
    : width_(width),
      height_(height),
      t_start_(t_start),
      t_end_(t_end),
      events_(std::move(events)) {
  if (width < 0 || height < 0) {
    throw std::domain_error("EventStream: negative sensor dimensions");
  }
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start) {
    throw std::domain_error("EventStream: window must satisfy t_start <= t_end");
  }
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    auto fail = [&](const char* what) {
      std::ostringstream os;
      os << "EventStream: event " << i << " (t=" << e.t << ", x=" << e.x
         << ", y=" << e.y << ", p=" << e.polarity << ") " << what;
      throw std::domain_error(os.str());
    };
    if (e.polarity != 1 && e.polarity != -1) fail("has polarity outside {+1,-1}");
    if (!contains_pixel(e.x, e.y)) fail("lies outside the sensor");
    if (!(e.t >= t_start_ && e.t < t_end_)) fail("lies outside the window");
    if (i > 0 && event_less(e, events_[i - 1])) fail("is out of canonical order");
  }
}

EventStream EventStream::from_unsorted(int width, int height, double t_start,
                                       double t_end, std::vector<Event> events) {
  std::sort(events.begin(), events.end(), event_less);
  return EventStream(width, height, t_start, t_end, std::move(events));
}

namespace {

void check_query_time(const EventStream& stream, double t) {
  if (!(t >= stream.t_start() && t <= stream.t_end())) {
    std::ostringstream os;
    os << "query time " << t << " outside stream window [" << stream.t_start()
       << ", " << stream.t_end() << "]";
    throw std::domain_error(os.str());
  }
}

auto lower_time(std::span<const Event> events, double t) {
  return std::lower_bound(events.begin(), events.end(), t,
                          [](const Event& e, double v) { return e.t < v; });
}

}  // namespace

int signed_count(const EventStream& stream, int x, int y, double a, double b) {
  if (!stream.contains_pixel(x, y)) {
    throw std::domain_error("signed_count: pixel outside the sensor");
  }
  check_query_time(stream, a);
  check_query_time(stream, b);
  if (a > b) return -signed_count(stream, x, y, b, a);

  auto events = stream.events();
  int total = 0;
  for (auto it = lower_time(events, a); it != events.end() && it->t < b; ++it) {
    if (it->x == x && it->y == y) total += it->polarity;
  }
  return total;
}

std::vector<int> signed_count_map(const EventStream& stream, double a, double b) {
  check_query_time(stream, a);
  check_query_time(stream, b);
  std::vector<int> counts(stream.pixel_count(), 0);
  const int sign = a <= b ? 1 : -1;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  auto events = stream.events();
  for (auto it = lower_time(events, lo); it != events.end() && it->t < hi; ++it) {
    counts[static_cast<std::size_t>(it->y) * stream.width() + it->x] +=
        sign * it->polarity;
  }
  return counts;
}

EventStream slice(const EventStream& stream, double a, double b) {
  if (!(a <= b)) throw std::domain_error("slice: requires a <= b");
  auto events = stream.events();
  auto first = lower_time(events, a);
  auto last = lower_time(events, b);
  std::vector<Event> kept(first, std::max(first, last));
  return EventStream(stream.width(), stream.height(), a, b, std::move(kept));
}

EventStream reverse_shuffle(const EventStream& stream) {
  if (stream.t_start() != 0.0) {
    throw std::domain_error("reverse_shuffle: stream window must start at 0");
  }
  const double f = stream.t_end();
  const double latest = std::max(0.0, f - kTimeQuantum);
  std::vector<Event> out;
  out.reserve(stream.size());
  for (const Event& e : stream.events()) {
    double t = f - e.t;
    if (t >= f) t = latest;
    out.push_back({t, e.x, e.y, -e.polarity});
  }
  return EventStream::from_unsorted(stream.width(), stream.height(), 0.0, f,
                                    std::move(out));
}

EventStream shift_shuffle(const EventStream& stream) {
  const double f = stream.t_start();
  const double end = stream.t_end() - f;
  std::vector<Event> out;
  out.reserve(stream.size());
  for (const Event& e : stream.events()) {
    double t = e.t - f;
    if (t >= end) t = std::nextafter(end, 0.0);
    out.push_back({t, e.x, e.y, e.polarity});
  }
  // Subtraction can merge distinct timestamps, so re-sort for the tie-break.
  return EventStream::from_unsorted(stream.width(), stream.height(), 0.0, end,
                                    std::move(out));
}

}  // namespace esrb
