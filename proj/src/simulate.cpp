#include "esrb/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "esrb/edi.hpp"
#include "esrb/random.hpp"

namespace esrb {

namespace {

// Smallest quantum q with q * 1us >= t, and largest with q * 1us < t.
std::int64_t quantum_at_or_after(double t) {
  auto q = static_cast<std::int64_t>(std::ceil(t / kTimeQuantum));
  while (static_cast<double>(q) / 1e6 < t) ++q;
  while (static_cast<double>(q - 1) / 1e6 >= t) --q;
  return q;
}

std::int64_t quantum_before(double t) {
  auto q = static_cast<std::int64_t>(std::ceil(t / kTimeQuantum)) - 1;
  while (static_cast<double>(q) / 1e6 >= t) --q;
  while (static_cast<double>(q + 1) / 1e6 < t) ++q;
  return q;
}

double quantum_time(std::int64_t q) { return static_cast<double>(q) / 1e6; }

double log_intensity(double v) { return std::log(std::max(v, kIntensityFloor)); }

void check_sequence(const FrameSequence& seq, const char* who) {
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (!seq[k].same_shape(seq[0])) {
      throw std::domain_error(std::string(who) + ": frame sizes differ");
    }
    if (!(seq[k].t > seq[k - 1].t)) {
      throw std::domain_error(std::string(who) + ": timestamps must strictly increase");
    }
  }
}

}  // namespace

void DegradationConfig::validate() const {
  if (!(threshold > 0.0)) throw std::domain_error("threshold c must be positive");
  if (exposure < 0.0) throw std::domain_error("exposure T must be positive");
  if (scale != 1 && scale != 2 && scale != 4) {
    throw std::domain_error("scale must be one of 1, 2, 4");
  }
  if (frame_noise_sigma < 0.0) throw std::domain_error("frame noise sigma must be >= 0");
  if (event_noise_ratio < 0.0) throw std::domain_error("event noise ratio must be >= 0");
}

EventStream simulate_events(const FrameSequence& seq, double c) {
  if (seq.size() < 2) throw std::domain_error("simulate_events: need at least 2 frames");
  if (!(c > 0.0)) throw std::domain_error("simulate_events: c must be positive");
  check_sequence(seq, "simulate_events");

  constexpr double kLevelTolerance = 1e-9;
  const int width = seq[0].width;
  const int height = seq[0].height;

  // Per-segment quantum bounds, shared by all pixels.
  std::vector<std::int64_t> lo(seq.size() - 1), hi(seq.size() - 1);
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    lo[k] = quantum_at_or_after(seq[k].t);
    hi[k] = quantum_before(seq[k + 1].t);
    if (lo[k] > hi[k]) {
      throw std::domain_error("simulate_events: frames closer than one time quantum");
    }
  }

  std::vector<Event> events;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double reference = log_intensity(seq[0].at(x, y));
      double level_a = reference;
      for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
        const double level_b = log_intensity(seq[k + 1].at(x, y));
        const double ta = seq[k].t;
        const double dt = seq[k + 1].t - ta;
        for (;;) {
          int p = 0;
          if (level_b - reference >= c - kLevelTolerance) p = 1;
          else if (reference - level_b >= c - kLevelTolerance) p = -1;
          if (p == 0) break;
          const double target = reference + p * c;
          double frac = (target - level_a) / (level_b - level_a);
          frac = std::clamp(frac, 0.0, 1.0);
          const auto q = std::clamp(std::llround((ta + frac * dt) / kTimeQuantum),
                                    static_cast<long long>(lo[k]),
                                    static_cast<long long>(hi[k]));
          events.push_back({quantum_time(q), x, y, p});
          reference = target;
        }
        level_a = level_b;
      }
    }
  }
  return EventStream::from_unsorted(width, height, seq.front().t, seq.back().t,
                                    std::move(events));
}

FrameSequence synth_latents(const Frame& base, const EventStream& stream, double c,
                            std::span<const double> times) {
  if (base.width != stream.width() || base.height != stream.height()) {
    throw std::domain_error("synth_latents: base and stream dimensions differ");
  }
  FrameSequence out;
  out.reserve(times.size());
  for (double t : times) {
    const std::vector<int> counts = signed_count_map(stream, base.t, t);
    Frame frame(base.width, base.height, t);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      frame.pixels[i] = base.pixels[i] * std::exp(c * counts[i]);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

Frame blur_average(const FrameSequence& frames) {
  if (frames.empty()) throw std::domain_error("blur_average: empty input");
  for (const Frame& f : frames) {
    if (!f.same_shape(frames[0])) throw std::domain_error("blur_average: frame sizes differ");
  }
  const double n = static_cast<double>(frames.size());
  Frame out(frames[0].width, frames[0].height, 0.0);
  double t_sum = 0.0;
  for (const Frame& f : frames) {
    t_sum += f.t;
    for (std::size_t i = 0; i < out.size(); ++i) out.pixels[i] += f.pixels[i];
  }
  for (double& v : out.pixels) v /= n;
  out.t = t_sum / n;
  return out;
}

Frame block_average(const Frame& frame, int s) {
  if (s < 1) throw std::domain_error("block_average: scale must be >= 1");
  if (frame.width % s != 0 || frame.height % s != 0) {
    std::ostringstream os;
    os << "block_average: " << frame.width << "x" << frame.height
       << " not divisible by scale " << s;
    throw std::domain_error(os.str());
  }
  if (s == 1) return frame;
  Frame out(frame.width / s, frame.height / s, frame.t);
  const double inv = 1.0 / (static_cast<double>(s) * s);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double sum = 0.0;
      for (int dy = 0; dy < s; ++dy) {
        for (int dx = 0; dx < s; ++dx) sum += frame.at(x * s + dx, y * s + dy);
      }
      out.at(x, y) = sum * inv;
    }
  }
  return out;
}

DegradeResult degrade(const FrameSequence& hr_seq, const DegradationConfig& cfg) {
  cfg.validate();
  if (hr_seq.size() < 2) throw std::domain_error("degrade: need at least 2 frames");
  check_sequence(hr_seq, "degrade");
  if (cfg.exposure > 0.0 &&
      std::abs((hr_seq.back().t - hr_seq.front().t) - cfg.exposure) > kTimeQuantum) {
    throw std::domain_error("degrade: sequence span does not match exposure T");
  }

  FrameSequence lr;
  lr.reserve(hr_seq.size());
  for (const Frame& f : hr_seq) lr.push_back(block_average(f, cfg.scale));

  DegradeResult out;
  out.blurry = blur_average(lr);
  if (cfg.frame_noise_sigma > 0.0) {
    Rng rng(derive_seed(cfg.rng_seed, 0));
    std::normal_distribution<double> noise(0.0, cfg.frame_noise_sigma);
    for (double& v : out.blurry.pixels) v = std::max(0.0, v + noise(rng));
  }

  EventStream clean = simulate_events(lr, cfg.threshold);
  out.signal_events = clean.size();
  out.events = inject_noise(clean, cfg.event_noise_ratio, derive_seed(cfg.rng_seed, 1));
  out.noise_events = out.events.size() - out.signal_events;
  return out;
}

EventStream inject_noise(const EventStream& stream, double omega, std::uint64_t seed) {
  if (!(omega >= 0.0)) throw std::domain_error("inject_noise: omega must be >= 0");
  const auto count =
      static_cast<std::size_t>(std::llround(omega * static_cast<double>(stream.size())));
  if (count == 0 || stream.pixel_count() == 0) return stream;

  const std::int64_t q_lo = quantum_at_or_after(stream.t_start());
  const std::int64_t q_hi = quantum_before(stream.t_end());
  if (q_lo > q_hi) return stream;

  Rng rng(seed);
  std::uniform_int_distribution<int> xs(0, stream.width() - 1);
  std::uniform_int_distribution<int> ys(0, stream.height() - 1);
  std::uniform_int_distribution<std::int64_t> ts(q_lo, q_hi);
  std::bernoulli_distribution positive(0.5);

  std::vector<Event> events(stream.events().begin(), stream.events().end());
  events.reserve(events.size() + count);
  for (std::size_t i = 0; i < count; ++i) {
    Event e;
    e.x = xs(rng);
    e.y = ys(rng);
    e.t = quantum_time(ts(rng));
    e.polarity = positive(rng) ? 1 : -1;
    events.push_back(e);
  }
  return EventStream::from_unsorted(stream.width(), stream.height(), stream.t_start(),
                                    stream.t_end(), std::move(events));
}

NoiseModel noise_stats(double rate, double c, double exposure, double reference) {
  if (!(rate >= 0.0)) throw std::domain_error("noise_stats: rate must be >= 0");
  if (!(exposure > 0.0)) throw std::domain_error("noise_stats: T must be positive");
  if (!(reference >= 0.0 && reference <= exposure)) {
    throw std::domain_error("noise_stats: f must lie in [0, T]");
  }
  NoiseModel m;
  m.rate = rate;
  m.threshold = c;
  m.exposure = exposure;
  m.reference = reference;
  m.rho = reference * reference - reference * exposure + exposure * exposure / 2.0;
  m.mu = 1.0 + c * rate * m.rho / exposure;
  m.sigma = c * std::sqrt(rate * m.rho) / exposure;
  return m;
}

MonteCarloSummary monte_carlo_E(double rate, double c, double exposure,
                                double reference, std::size_t trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::domain_error("monte_carlo_E: trials must be >= 1");
  if (!(rate >= 0.0)) throw std::domain_error("monte_carlo_E: rate must be >= 0");
  if (!(exposure > 0.0)) throw std::domain_error("monte_carlo_E: T must be positive");
  if (!(reference >= 0.0 && reference <= exposure)) {
    throw std::domain_error("monte_carlo_E: f must lie in [0, T]");
  }

  std::vector<double> exact(trials), linear(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k));
    std::poisson_distribution<long> spikes(rate * exposure);
    std::uniform_real_distribution<double> when(0.0, exposure);
    const long n = rate > 0.0 ? spikes(rng) : 0;

    std::vector<Event> events(static_cast<std::size_t>(n));
    double unsigned_area = 0.0;
    for (Event& e : events) {
      e.t = when(rng);
      // Spike at tau counts toward Lambda(f, t) for t beyond it, away from f.
      unsigned_area += e.t >= reference ? exposure - e.t : e.t;
    }
    const EventStream pixel =
        EventStream::from_unsorted(1, 1, 0.0, exposure, std::move(events));
    exact[k] = double_integral(pixel, c, reference).values[0];
    linear[k] = 1.0 + c / exposure * unsigned_area;
  }

  auto moments = [](const std::vector<double>& v, double& mean, double& var) {
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  };

  MonteCarloSummary out;
  out.trials = trials;
  moments(exact, out.mean, out.variance);
  moments(linear, out.linearized_mean, out.linearized_variance);
  const double root_n = std::sqrt(static_cast<double>(trials));
  out.standard_error = std::sqrt(out.variance) / root_n;
  out.linearized_standard_error = std::sqrt(out.linearized_variance) / root_n;
  return out;
}

// --- synthetic scenes -------------------------------------------------------

Frame textured_base(int width, int height, double lo, double hi, double period) {
  Frame out(width, height);
  const double w = 2.0 * std::numbers::pi / period;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double a = std::sin(w * x) * std::cos(0.7 * w * y);
      const double b = std::sin(0.45 * w * (x + 2.0 * y) + 1.3);
      const double u = 0.5 + 0.3 * a + 0.2 * b;  // in [0, 1]
      out.at(x, y) = lo + (hi - lo) * u;
    }
  }
  return out;
}

EventStream moving_edge_stream(int width, int height, double t_start, double t_end,
                               const MovingEdge& edge) {
  if (!(t_end > t_start)) throw std::domain_error("moving_edge_stream: empty window");
  if (!(edge.speed > 0.0) || edge.steps < 1 || !(edge.ramp_width > 0.0)) {
    throw std::domain_error("moving_edge_stream: invalid edge parameters");
  }
  const std::int64_t q_lo = quantum_at_or_after(t_start);
  const std::int64_t q_hi = quantum_before(t_end);
  std::vector<Event> events;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double centre = x + 0.5;
      for (int j = 0; j < edge.steps; ++j) {
        // Ramp fraction (j+1)/steps reached at this edge position.
        const double pos = centre + edge.ramp_width * ((j + 1.0) / edge.steps - 0.5);
        const double t = t_start + (pos - edge.x0 - edge.slant * y) / edge.speed;
        const long long q = std::llround(t / kTimeQuantum);
        if (q < q_lo || q > q_hi) continue;
        events.push_back({quantum_time(q), x, y, 1});
      }
    }
  }
  return EventStream::from_unsorted(width, height, t_start, t_end, std::move(events));
}

FrameSequence render_moving_edge(const Frame& texture, std::span<const double> times,
                                 const MovingEdge& edge) {
  FrameSequence out;
  const double t0 = times.empty() ? 0.0 : times.front();
  for (double t : times) {
    Frame f(texture.width, texture.height, t);
    for (int y = 0; y < texture.height; ++y) {
      const double pos = edge.x0 + edge.slant * y + edge.speed * (t - t0);
      for (int x = 0; x < texture.width; ++x) {
        const double frac =
            std::clamp((pos - (x + 0.5)) / edge.ramp_width + 0.5, 0.0, 1.0);
        f.at(x, y) = texture.at(x, y) * std::exp(edge.log_gain * frac);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace esrb
