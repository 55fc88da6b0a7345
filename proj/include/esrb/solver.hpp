#pragma once

#include <vector>

#include "esrb/dictionary.hpp"
#include "esrb/edi.hpp"
#include "esrb/frame.hpp"
#include "esrb/tensor.hpp"

namespace esrb {

/// Hyperparameters of the dual sparse ISTA.
///
/// eta and iterations default to the values used for the unfolded network
/// (0.01 and 15). The lambdas have no canonical values; the defaults keep both
/// l1 terms active on unit-scale data.
struct SolverConfig {
  double eta = 0.01;
  double lambda1 = 1.0;   // event fidelity weight
  double lambda2 = 1e-2;  // l1 weight on alpha
  double lambda3 = 1e-2;  // l1 weight on beta
  int iterations = 15;
  int scale = 4;
  bool step_halving = false;
  bool freeze_beta = false;       // single-sparse variant: beta held fixed
  double intensity_scale = 255.0; // frames are divided by this inside solve()

  void validate() const;
};

struct DictionarySet {
  Dictionary image;     // d_I
  Dictionary event;     // d_E
  Dictionary high_res;  // d_X, scale^2 output channels
};

/// Observation pair in solver units: Y and the event double integral E.
struct SparseProblem {
  Tensor observed;
  Tensor edi;
};

/// Coefficients and their cached syntheses image = d_I * alpha and
/// ebar = d_E * beta.
struct SparseState {
  Tensor alpha;
  Tensor beta;
  Tensor image;
  Tensor ebar;
};

SparseState make_state(const DictionarySet& dicts, Tensor alpha, Tensor beta);
SparseState zero_state(const DictionarySet& dicts, int height, int width);

/// Y / intensity_scale and E as tensors.
SparseProblem make_problem(const Frame& blurry, const EdiMap& edi, const SolverConfig& cfg);

double soft_threshold(double v, double theta);
Tensor soft_threshold(const Tensor& v, double theta);

/// 1/2 ||Y - I o Ebar||^2 + lambda1/2 ||E - Ebar||^2 + lambda2 |alpha|_1 + lambda3 |beta|_1
double objective(const SparseProblem& problem, const SparseState& state,
                 const SolverConfig& cfg);
double objective(const Frame& blurry, const EdiMap& edi, const SparseState& state,
                 const SolverConfig& cfg);

/// Gradients of the smooth part with respect to alpha and beta.
Tensor alpha_gradient(const SparseProblem& problem, const SparseState& state,
                      const DictionarySet& dicts);
Tensor beta_gradient(const SparseProblem& problem, const SparseState& state,
                     const DictionarySet& dicts, const SolverConfig& cfg);

/// One dual ISTA sweep: the alpha block, then the beta block (unless frozen).
/// With step_halving, a block step that raises the objective is retried with
/// half the step, at most 20 times; a block that never descends is left as is.
SparseState ista_iterate(const SparseProblem& problem, const SparseState& state,
                         const DictionarySet& dicts, const SolverConfig& cfg);

/// Sub-pixel rearrangement: channel c*s*s + i*s + j, pixel (y, x) moves to
/// channel c, pixel (y*s + i, x*s + j).
Tensor pixel_shuffle(const Tensor& t, int s);
Tensor pixel_unshuffle(const Tensor& t, int s);

struct SolveResult {
  Frame high_res;            // X, scale x larger
  Frame image;               // I
  EdiMap ebar;               // denoised event double integral
  std::vector<double> trace; // objective before the first and after every sweep
  SparseState state;
};

/// Zero-initialised dual sparse coding of (Y, E). Output frames are rescaled
/// by intensity_scale and clamped at zero.
SolveResult solve(const Frame& blurry, const EdiMap& edi, const DictionarySet& dicts,
                  const SolverConfig& cfg);

}  // namespace esrb
