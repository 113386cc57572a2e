#include "expectigrad/expectigrad.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace expectigrad {

void HyperParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("alpha must be positive and finite");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("beta must lie in [0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be positive and finite");
}

ExpectigradState expectigrad_init(std::size_t dim, const HyperParams& hp) {
  hp.validate();
  if (dim == 0) throw std::invalid_argument("dim must be at least 1");
  ExpectigradState st;
  st.sum_sq.assign(dim, 0.0);
  st.nonzero_count.assign(dim, 0);
  st.momentum.assign(dim, 0.0);
  return st;
}

static void check_step_args(const ExpectigradState& st, std::span<const double> g,
                            const HyperParams& hp, std::span<double> delta) {
  hp.validate();
  if (g.size() != st.dim())
    throw std::invalid_argument("gradient length " + std::to_string(g.size()) +
                                " does not match state dimension " +
                                std::to_string(st.dim()));
  if (delta.size() != st.dim())
    throw std::invalid_argument("delta length does not match state dimension");
  for (double gj : g)
    if (!std::isfinite(gj))
      throw std::invalid_argument("gradient contains a non-finite component");
}

void momentum_variant_step_inplace(ExpectigradState& st, std::span<const double> g,
                                   const HyperParams& hp, MomentumVariant variant,
                                   std::span<double> delta) {
  check_step_args(st, g, hp, delta);

  st.step += 1;
  st.beta_pow *= hp.beta;
  // With bias correction the step scale is alpha/(1-beta^t); without it the
  // plain alpha.  beta = 0 makes beta_pow 0 from the first step on, so all
  // variants collapse to the same expression (bit for bit).
  const double corrected = hp.alpha / (1.0 - st.beta_pow);
  const double scale = (variant == MomentumVariant::Inner) ? hp.alpha : corrected;

  const std::size_t n = st.dim();
  for (std::size_t j = 0; j < n; ++j) {
    const double gj = g[j];
    st.sum_sq[j] += gj * gj;
    if (gj != 0.0) st.nonzero_count[j] += 1;
    // Mean of squares over the nonzero steps only; a never-fired coordinate
    // contributes 0 (the 0/0 case), leaving the bare epsilon as denominator.
    const double mean_sq =
        st.nonzero_count[j] == 0
            ? 0.0
            : st.sum_sq[j] / static_cast<double>(st.nonzero_count[j]);
    const double denom = hp.epsilon + std::sqrt(mean_sq);

    if (variant == MomentumVariant::BiasCorrectedOuter) {
      st.momentum[j] = hp.beta * st.momentum[j] + (1.0 - hp.beta) * (gj / denom);
      delta[j] = -(scale * st.momentum[j]);
    } else {
      st.momentum[j] = hp.beta * st.momentum[j] + (1.0 - hp.beta) * gj;
      delta[j] = -(scale * (st.momentum[j] / denom));
    }
  }
}

void expectigrad_step_inplace(ExpectigradState& st, std::span<const double> g,
                              const HyperParams& hp, std::span<double> delta) {
  momentum_variant_step_inplace(st, g, hp, MomentumVariant::BiasCorrectedOuter, delta);
}

StepResult momentum_variant_step(const ExpectigradState& state, std::span<const double> g,
                                 const HyperParams& hp, MomentumVariant variant) {
  StepResult result{std::vector<double>(state.dim()), state};
  momentum_variant_step_inplace(result.state, g, hp, variant, result.delta);
  return result;
}

StepResult expectigrad_step(const ExpectigradState& state, std::span<const double> g,
                            const HyperParams& hp) {
  return momentum_variant_step(state, g, hp, MomentumVariant::BiasCorrectedOuter);
}

}  // namespace expectigrad
