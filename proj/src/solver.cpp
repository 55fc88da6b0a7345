#include "esrb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace esrb {

namespace {

constexpr int kMaxHalvings = 20;

void check_dictionaries(const DictionarySet& d, int scale) {
  d.image.validate();
  d.event.validate();
  d.high_res.validate();
  if (d.image.shape.out_channels != 1 || d.event.shape.out_channels != 1) {
    throw std::domain_error("solver: d_I and d_E must synthesize one channel");
  }
  if (d.high_res.shape.in_channels != d.image.shape.in_channels) {
    throw std::domain_error("solver: d_X and d_I must share the alpha channels");
  }
  if (d.high_res.shape.out_channels != scale * scale) {
    std::ostringstream os;
    os << "solver: d_X needs " << scale * scale << " output channels for scale " << scale;
    throw std::domain_error(os.str());
  }
}

double l1(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data) s += std::abs(v);
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eta > 0.0)) throw std::domain_error("solver: eta must be positive");
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw std::domain_error("solver: lambdas must be nonnegative");
  }
  if (iterations < 0) throw std::domain_error("solver: iterations must be >= 0");
  if (scale < 1) throw std::domain_error("solver: scale must be >= 1");
  if (!(intensity_scale > 0.0)) throw std::domain_error("solver: intensity_scale must be positive");
}

SparseState make_state(const DictionarySet& dicts, Tensor alpha, Tensor beta) {
  SparseState s;
  s.image = apply(dicts.image, alpha);
  s.ebar = apply(dicts.event, beta);
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  return s;
}

SparseState zero_state(const DictionarySet& dicts, int height, int width) {
  return make_state(dicts, Tensor(dicts.image.shape.in_channels, height, width),
                    Tensor(dicts.event.shape.in_channels, height, width));
}

SparseProblem make_problem(const Frame& blurry, const EdiMap& edi, const SolverConfig& cfg) {
  if (blurry.width != edi.width || blurry.height != edi.height) {
    throw std::domain_error("solver: Y and E dimensions differ");
  }
  SparseProblem p;
  p.observed = to_tensor(blurry, 1.0 / cfg.intensity_scale);
  p.edi = Tensor(1, edi.height, edi.width);
  p.edi.data = edi.values;
  return p;
}

double soft_threshold(double v, double theta) {
  if (theta < 0.0) throw std::domain_error("soft_threshold: theta must be >= 0");
  const double mag = std::abs(v) - theta;
  if (mag <= 0.0) return 0.0;
  return v > 0.0 ? mag : -mag;
}

Tensor soft_threshold(const Tensor& v, double theta) {
  if (theta < 0.0) throw std::domain_error("soft_threshold: theta must be >= 0");
  Tensor out = v;
  for (double& x : out.data) x = soft_threshold(x, theta);
  return out;
}

double objective(const SparseProblem& p, const SparseState& s, const SolverConfig& cfg) {
  if (!p.observed.same_shape(s.image) || !p.edi.same_shape(s.ebar) ||
      !p.observed.same_shape(p.edi)) {
    throw std::domain_error("objective: shape mismatch");
  }
  double fit = 0.0;
  double events = 0.0;
  for (std::size_t i = 0; i < p.observed.size(); ++i) {
    const double r = p.observed.data[i] - s.image.data[i] * s.ebar.data[i];
    const double q = p.edi.data[i] - s.ebar.data[i];
    fit += r * r;
    events += q * q;
  }
  return 0.5 * fit + 0.5 * cfg.lambda1 * events + cfg.lambda2 * l1(s.alpha) +
         cfg.lambda3 * l1(s.beta);
}

double objective(const Frame& blurry, const EdiMap& edi, const SparseState& state,
                 const SolverConfig& cfg) {
  return objective(make_problem(blurry, edi, cfg), state, cfg);
}

Tensor alpha_gradient(const SparseProblem& p, const SparseState& s,
                      const DictionarySet& dicts) {
  Tensor r(1, p.observed.height, p.observed.width);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = s.ebar.data[i];
    r.data[i] = e * (e * s.image.data[i] - p.observed.data[i]);
  }
  return apply_adjoint(dicts.image, r);
}

Tensor beta_gradient(const SparseProblem& p, const SparseState& s,
                     const DictionarySet& dicts, const SolverConfig& cfg) {
  Tensor r(1, p.observed.height, p.observed.width);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double img = s.image.data[i];
    const double e = s.ebar.data[i];
    r.data[i] = img * (img * e - p.observed.data[i]) + cfg.lambda1 * (e - p.edi.data[i]);
  }
  return apply_adjoint(dicts.event, r);
}

SparseState ista_iterate(const SparseProblem& p, const SparseState& state,
                         const DictionarySet& dicts, const SolverConfig& cfg) {
  SparseState cur = state;

  // alpha block
  {
    const Tensor g = alpha_gradient(p, cur, dicts);
    const double before = cfg.step_halving ? objective(p, cur, cfg) : 0.0;
    double step = cfg.eta;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, step *= 0.5) {
      Tensor a = cur.alpha;
      for (std::size_t i = 0; i < a.size(); ++i) a.data[i] -= step * g.data[i];
      SparseState next = cur;
      next.alpha = soft_threshold(a, step * cfg.lambda2);
      next.image = apply(dicts.image, next.alpha);
      if (!cfg.step_halving || objective(p, next, cfg) <= before) {
        cur = std::move(next);
        break;
      }
    }
  }

  if (cfg.freeze_beta) return cur;

  // beta block, with the image refreshed from the new alpha
  {
    const Tensor g = beta_gradient(p, cur, dicts, cfg);
    const double before = cfg.step_halving ? objective(p, cur, cfg) : 0.0;
    double step = cfg.eta;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, step *= 0.5) {
      Tensor b = cur.beta;
      for (std::size_t i = 0; i < b.size(); ++i) b.data[i] -= step * g.data[i];
      SparseState next = cur;
      next.beta = soft_threshold(b, step * cfg.lambda3);
      next.ebar = apply(dicts.event, next.beta);
      if (!cfg.step_halving || objective(p, next, cfg) <= before) {
        cur = std::move(next);
        break;
      }
    }
  }
  return cur;
}

Tensor pixel_shuffle(const Tensor& t, int s) {
  if (s < 1 || t.channels % (s * s) != 0) {
    throw std::domain_error("pixel_shuffle: channels not divisible by s^2");
  }
  const int c_out = t.channels / (s * s);
  Tensor out(c_out, t.height * s, t.width * s);
  for (int c = 0; c < c_out; ++c) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const int src = c * s * s + i * s + j;
        for (int y = 0; y < t.height; ++y) {
          for (int x = 0; x < t.width; ++x) out.at(c, y * s + i, x * s + j) = t.at(src, y, x);
        }
      }
    }
  }
  return out;
}

Tensor pixel_unshuffle(const Tensor& t, int s) {
  if (s < 1 || t.height % s != 0 || t.width % s != 0) {
    throw std::domain_error("pixel_unshuffle: spatial size not divisible by s");
  }
  Tensor out(t.channels * s * s, t.height / s, t.width / s);
  for (int c = 0; c < t.channels; ++c) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const int dst = c * s * s + i * s + j;
        for (int y = 0; y < out.height; ++y) {
          for (int x = 0; x < out.width; ++x) out.at(dst, y, x) = t.at(c, y * s + i, x * s + j);
        }
      }
    }
  }
  return out;
}

SolveResult solve(const Frame& blurry, const EdiMap& edi, const DictionarySet& dicts,
                  const SolverConfig& cfg) {
  cfg.validate();
  check_dictionaries(dicts, cfg.scale);
  const SparseProblem problem = make_problem(blurry, edi, cfg);

  SolveResult out;
  SparseState state = zero_state(dicts, blurry.height, blurry.width);
  out.trace.reserve(static_cast<std::size_t>(cfg.iterations) + 1);
  out.trace.push_back(objective(problem, state, cfg));
  for (int k = 0; k < cfg.iterations; ++k) {
    state = ista_iterate(problem, state, dicts, cfg);
    out.trace.push_back(objective(problem, state, cfg));
  }

  auto clamp_frame = [](Frame f) {
    for (double& v : f.pixels) v = std::max(0.0, v);
    return f;
  };
  out.image = clamp_frame(to_frame(state.image, edi.reference, cfg.intensity_scale));
  out.high_res = clamp_frame(to_frame(pixel_shuffle(apply(dicts.high_res, state.alpha), cfg.scale),
                                      edi.reference, cfg.intensity_scale));
  out.ebar = EdiMap{edi.width, edi.height, edi.reference, edi.length, state.ebar.data};
  out.state = std::move(state);
  return out;
}

}  // namespace esrb
