#include "expectigrad/problems.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace expectigrad {

void ReddiSpec::validate(bool stochastic) const {
  if (period < 2) throw std::invalid_argument("period must be at least 2");
  if (!(big > 0.0) || !std::isfinite(big))
    throw std::invalid_argument("big must be positive and finite");
  if (!(small > 0.0) || !std::isfinite(small))
    throw std::invalid_argument("small must be positive and finite");
  if (stochastic && !(prob >= 0.0 && prob <= 1.0))
    throw std::invalid_argument("prob must lie in [0, 1]");
  if (big <= small * static_cast<double>(period - 1))
    std::fprintf(stderr,
                 "warning: big (%g) <= small*(period-1) (%g); the mean gradient is "
                 "not positive and the adversarial drift regime is lost\n",
                 big, small * static_cast<double>(period - 1));
}

double reddi_online_grad(std::int64_t t, const ReddiSpec& spec) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  const std::int64_t residue = ((t % spec.period) + spec.period) % spec.period;
  const std::int64_t target = ((spec.phase % spec.period) + spec.period) % spec.period;
  return residue == target ? spec.big : -spec.small;
}

double reddi_stochastic_grad(SplitMix64& rng, const ReddiSpec& spec) {
  return rng.next_double() < spec.prob ? spec.big : -spec.small;
}

std::vector<double> period_displacement(const HyperParams& hp, const ReddiSpec& spec,
                                        std::int64_t warmup, std::int64_t measured) {
  hp.validate();
  spec.validate(false);
  if (hp.beta != 0.0)
    throw std::invalid_argument(
        "period_displacement requires beta = 0; momentum spreads each step's "
        "movement across period boundaries");
  if (warmup < 0) throw std::invalid_argument("warmup must be >= 0");
  if (measured < 1) throw std::invalid_argument("measured must be >= 1");

  ExpectigradState st = expectigrad_init(1, hp);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(measured));
  double g[1], delta[1];
  std::int64_t t = 1;
  for (std::int64_t p = 0; p < warmup + measured; ++p) {
    double displacement = 0.0;
    for (std::int64_t k = 0; k < spec.period; ++k, ++t) {
      g[0] = reddi_online_grad(t, spec);
      expectigrad_step_inplace(st, g, hp, delta);
      displacement += delta[0];
    }
    if (p >= warmup) out.push_back(displacement);
  }
  return out;
}

std::vector<double> quadratic_grad(std::span<const double> x,
                                   std::span<const double> target) {
  if (x.size() != target.size())
    throw std::invalid_argument("x length " + std::to_string(x.size()) +
                                " does not match target length " +
                                std::to_string(target.size()));
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = x[j] - target[j];
  return g;
}

void sparse_synthetic_grad(std::int64_t t, const SparseSpec& spec, std::span<double> g_out) {
  if (g_out.size() != spec.periods.size())
    throw std::invalid_argument("output length does not match the number of components");
  if (!spec.magnitudes.empty() && spec.magnitudes.size() != spec.periods.size())
    throw std::invalid_argument("magnitudes length does not match periods length");
  for (std::size_t j = 0; j < spec.periods.size(); ++j) {
    if (spec.periods[j] < 1) throw std::invalid_argument("periods must be >= 1");
    const bool fires = (t % spec.periods[j]) == 0;
    g_out[j] = fires ? (spec.magnitudes.empty() ? 1.0 : spec.magnitudes[j]) : 0.0;
  }
}

}  // namespace expectigrad
