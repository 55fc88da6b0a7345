#pragma once

#include <cstdint>
#include <span>

#include "esrb/events.hpp"
#include "esrb/frame.hpp"

namespace esrb {

/// Floor applied to intensities before any logarithm.
inline constexpr double kIntensityFloor = 1e-3;

struct DegradationConfig {
  double threshold = 0.25;          // c, log-intensity units
  double exposure = 0.0;            // T in seconds; 0 = span of the input sequence
  int scale = 4;                    // s, block-averaging factor
  double frame_noise_sigma = 0.0;   // sigma_Y, intensity units
  double event_noise_ratio = 0.0;   // omega
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Statistics of E(f) under Poisson event noise with rate lambda.
struct NoiseModel {
  double rate = 0.0;       // lambda, events / s / pixel
  double threshold = 0.0;  // c
  double exposure = 0.0;   // T
  double reference = 0.0;  // f
  double rho = 0.0;        // f^2 - fT + T^2/2
  double mu = 0.0;         // 1 + c lambda rho / T
  double sigma = 0.0;      // c sqrt(lambda rho) / T
};

struct DegradeResult {
  Frame blurry;
  EventStream events;
  std::size_t signal_events = 0;
  std::size_t noise_events = 0;
};

struct MonteCarloSummary {
  std::size_t trials = 0;
  // Exact double integral E(f).
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double standard_error = 0.0;
  // First-order surrogate 1 + (c/T) * integral of the unsigned spike count
  // between f and t, the quantity whose mean the noise model predicts.
  double linearized_mean = 0.0;
  double linearized_variance = 0.0;
  double linearized_standard_error = 0.0;
};

/// Threshold-crossing event synthesis. Log intensity is interpolated linearly
/// between frames; each crossing of reference +/- c emits one event and moves
/// the reference by exactly c. Timestamps are quantized to 1 us and kept
/// strictly inside the inter-frame interval they were generated in.
EventStream simulate_events(const FrameSequence& seq, double c);

/// I(t_k) = base * exp(c * signed_count(base.t, t_k)) for every requested time.
FrameSequence synth_latents(const Frame& base, const EventStream& stream, double c,
                            std::span<const double> times);

/// Pixelwise mean; timestamp is the mean of the input timestamps.
Frame blur_average(const FrameSequence& frames);

/// The s x s block-averaging operator P.
Frame block_average(const Frame& frame, int s);

/// Low-resolution blurry observation plus (noisy) events of the downsampled
/// sequence.
DegradeResult degrade(const FrameSequence& hr_seq, const DegradationConfig& cfg);

/// Adds round(omega * N_o) events with uniform pixel, time (1 us grid) and
/// polarity; original events are kept.
EventStream inject_noise(const EventStream& stream, double omega, std::uint64_t seed);

NoiseModel noise_stats(double rate, double c, double exposure, double reference);

/// Monte-Carlo law of E(f) for a single pixel firing all-positive Poisson
/// spikes of the given rate over [0, T). Trial k draws from its own
/// substream derived from (seed, k).
MonteCarloSummary monte_carlo_E(double rate, double c, double exposure,
                                double reference, std::size_t trials,
                                std::uint64_t seed);

// --- synthetic scenes -------------------------------------------------------

/// A straight, slightly slanted edge sweeping along +x. Behind the edge the
/// log intensity is raised by `steps * c` (event-first form) or `log_gain`
/// (frame-first form), with a linear ramp `ramp_width` pixels wide.
struct MovingEdge {
  double x0 = 4.0;          // edge position at t_start (pixels)
  double speed = 40.0;      // pixels / second
  double slant = 0.15;      // extra x offset per row
  double ramp_width = 2.0;  // pixels
  int steps = 4;            // events emitted per pixel (event-first form)
  double log_gain = 1.0;    // log intensity lift (frame-first form)
};

/// Smooth positive texture in [lo, hi].
Frame textured_base(int width, int height, double lo = 30.0, double hi = 90.0,
                    double period = 11.0);

/// Events of an edge sweep: every pixel crossed by the ramp emits `steps`
/// positive events as the ramp passes its centre. Timestamps on the 1 us grid.
EventStream moving_edge_stream(int width, int height, double t_start, double t_end,
                               const MovingEdge& edge);

/// Frames of the same sweep rendered directly over a texture.
FrameSequence render_moving_edge(const Frame& texture, std::span<const double> times,
                                 const MovingEdge& edge);

}  // namespace esrb
