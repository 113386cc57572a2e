#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "expectigrad/expectigrad.hpp"
#include "expectigrad/rng.hpp"

namespace expectigrad {

// Scalar online problem with one large gradient spike per period and small
// opposing gradients in between.  The mean gradient is positive whenever
// big > small*(period-1), so the optimum of the average loss (restricted to
// [-1, 1]) sits at x = -1, yet sign-following methods drift toward +1.
struct ReddiSpec {
  double big = 1010.0;
  double small = 10.0;       // magnitude; the realized gradient is -small
  std::int64_t period = 101;
  double prob = 0.01;        // P(big) for the stochastic variant, in [0, 1]
  std::int64_t phase = 1;    // step residue (mod period) where the big gradient fires
  double comparator = -1.0;  // reference point for comparator regret

  // Throws on structural violations (period < 2, small <= 0, prob outside
  // [0,1] when stochastic is true).  Warns on stderr -- but proceeds -- when
  // big <= small*(period-1), i.e. when the mean gradient is not positive and
  // the drift-toward-+1 regime is lost.
  void validate(bool stochastic) const;
};

// Gradient of the online variant at step t (t >= 1):
// +big when t = phase (mod period), else -small.
double reddi_online_grad(std::int64_t t, const ReddiSpec& spec);

// Stochastic variant: +big with probability prob, else -small.  Consumes
// exactly one generator event per call.
double reddi_stochastic_grad(SplitMix64& rng, const ReddiSpec& spec);

// Runs the optimizer (beta must be 0; throws otherwise, since momentum blurs
// the attribution of movement to periods) on the online problem and returns
// the net displacement over each of the `measured` periods that follow
// `warmup` periods.  Under big > small*(period-1) the displacements are
// negative once past the early transient -- the equilibrium denominator is
// sqrt((big^2 + (period-1)*small^2)/period).
std::vector<double> period_displacement(const HyperParams& hp, const ReddiSpec& spec,
                                        std::int64_t warmup, std::int64_t measured);

// Gradient of f(x) = 0.5*||x - target||^2.  Errors on length mismatch.
std::vector<double> quadratic_grad(std::span<const double> x,
                                   std::span<const double> target);

// Deterministic sparse gradient schedule: component j equals magnitudes[j]
// when t = 0 (mod periods[j]) and 0 otherwise.  Exposes the difference
// between averaging squared gradients over nonzero steps vs over all steps:
// a coordinate that first fires late gets a unit-scale update from the
// former and a catastrophically large one from the latter.
struct SparseSpec {
  std::vector<std::int64_t> periods;    // all >= 1
  std::vector<double> magnitudes;       // empty means all 1.0
};

void sparse_synthetic_grad(std::int64_t t, const SparseSpec& spec, std::span<double> g_out);

}  // namespace expectigrad
