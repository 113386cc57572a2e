#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace expectigrad {

enum class BaselineKind { SGD, SGDMomentum, AdaGrad, RMSProp, AdaDelta, Adam, AMSGrad, Yogi };

const char* baseline_name(BaselineKind kind);

// One bag of knobs shared by all baselines; each algorithm reads only the
// fields its update rule uses (documented per kind in baselines.cpp).
struct BaselineHyperParams {
  double alpha = 1e-3;    // step size
  double beta1 = 0.9;     // first-moment decay (Adam family)
  double beta2 = 0.999;   // second-moment decay (Adam family; RMSProp reuses this slot)
  double epsilon = 1e-8;  // denominator damping
  double rho = 0.95;      // ADADELTA averaging constant
  double mu = 0.9;        // heavy-ball momentum

  void validate(BaselineKind kind) const;  // throws std::invalid_argument
};

// Published defaults for each method (RMSProp decay 0.9; ADADELTA rho=0.95,
// epsilon=1e-6, alpha=1.0 since the original update has no learning rate;
// Adam/AMSGrad alpha=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8; Yogi
// alpha=1e-2, epsilon=1e-3).
BaselineHyperParams baseline_defaults(BaselineKind kind);

struct BaselineState {
  BaselineKind kind = BaselineKind::SGD;
  std::vector<double> first_moment;       // momentum buffer / EMA of gradients
  std::vector<double> second_moment;      // sum or EMA of squared gradients
  std::vector<double> max_second_moment;  // AMSGrad: running max of corrected v
  std::vector<double> accum_delta;        // ADADELTA: EMA of squared raw updates
  std::int64_t step = 0;
  double beta1_pow = 1.0;  // beta1^step, maintained incrementally (see ExpectigradState)
  double beta2_pow = 1.0;  // beta2^step

  std::size_t dim() const;
};

struct BaselineStepResult {
  std::vector<double> delta;
  BaselineState state;
};

BaselineState baseline_init(BaselineKind kind, std::size_t dim,
                            const BaselineHyperParams& hp);

// One update of the selected algorithm; delta is the parameter increment.
// Errors: dimension mismatch or non-finite gradient components.
BaselineStepResult baseline_step(const BaselineState& state, std::span<const double> g,
                                 const BaselineHyperParams& hp);

void baseline_step_inplace(BaselineState& state, std::span<const double> g,
                           const BaselineHyperParams& hp, std::span<double> delta);

}  // namespace expectigrad
