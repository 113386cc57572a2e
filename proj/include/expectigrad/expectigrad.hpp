#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace expectigrad {

struct HyperParams {
  double alpha = 1e-3;    // step size, > 0
  double beta = 0.9;      // momentum decay, in [0, 1)
  double epsilon = 1e-8;  // denominator damping, > 0

  void validate() const;  // throws std::invalid_argument
};

// Per-coordinate optimizer state.  The second-moment estimate is the
// arithmetic mean of squared gradients over the steps where the coordinate
// was actually nonzero: sum_sq[j] / nonzero_count[j], with 0/0 read as 0.
// Unlike an exponential moving average this mean never decays, and unlike
// dividing by the global step count it is unbiased for sparse coordinates.
struct ExpectigradState {
  std::vector<double> sum_sq;               // running sum of squared gradients
  std::vector<std::int64_t> nonzero_count;  // steps where the coordinate was nonzero
  std::vector<double> momentum;             // EMA; of normalized gradients by default
  std::int64_t step = 0;                    // completed steps
  // beta^step, maintained by one multiply per step instead of pow().  The
  // multiplicative drift vs pow(beta, step) stays below 1e-12 relative for
  // step <= 1e7 at beta <= 0.999 (and both underflow to 0 long before that
  // for any fixed beta < 1).  Tied to the beta the state was stepped with.
  double beta_pow = 1.0;

  std::size_t dim() const { return sum_sq.size(); }
};

struct StepResult {
  std::vector<double> delta;  // parameter increment; apply as x += delta
  ExpectigradState state;
};

// Where the momentum average sits relative to the denominator, and whether
// the 1/(1-beta^t) warm-up correction is applied:
//   Inner              -- average raw gradients, divide after, no correction
//   BiasCorrectedInner -- average raw gradients, divide after, corrected
//   BiasCorrectedOuter -- average normalized gradients, corrected (default)
// All three coincide exactly when beta = 0.
enum class MomentumVariant { Inner, BiasCorrectedInner, BiasCorrectedOuter };

ExpectigradState expectigrad_init(std::size_t dim, const HyperParams& hp);

// One update.  delta = -alpha/(1-beta^t) * m_t where
//   m_t = beta*m_{t-1} + (1-beta) * g_t / (epsilon + sqrt(sum_sq/count)).
// Zero gradient components leave sum_sq and nonzero_count untouched, so a
// coordinate's denominator reflects only the steps where it received signal.
// Errors: dimension mismatch or non-finite gradient components.
StepResult expectigrad_step(const ExpectigradState& state, std::span<const double> g,
                            const HyperParams& hp);

StepResult momentum_variant_step(const ExpectigradState& state, std::span<const double> g,
                                 const HyperParams& hp, MomentumVariant variant);

// In-place forms used by the benchmark hot loops; semantics identical to the
// pure forms above (which are implemented on top of these).
void expectigrad_step_inplace(ExpectigradState& state, std::span<const double> g,
                              const HyperParams& hp, std::span<double> delta);

void momentum_variant_step_inplace(ExpectigradState& state, std::span<const double> g,
                                   const HyperParams& hp, MomentumVariant variant,
                                   std::span<double> delta);

}  // namespace expectigrad
