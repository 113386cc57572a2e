#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "expectigrad/baselines.hpp"
#include "expectigrad/expectigrad.hpp"

namespace expectigrad {

// Hyperparameters as the CLI and config files see them: NaN means "not set,
// use the method's published default".  `beta` is the momentum of the main
// optimizer; for convenience beta1 doubles as its value when only beta1 was
// given (so one flag drives the analogous knob on every method).
struct OptimizerConfig {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  static bool is_set(double v) { return v == v; }

  std::string id = "expectigrad";
  double alpha = kUnset;
  double beta = kUnset;
  double beta1 = kUnset;
  double beta2 = kUnset;
  double epsilon = kUnset;
  double rho = kUnset;
  double mu = kUnset;
};

// Uniform stepping interface over the main optimizer (all momentum variants)
// and the eight baselines, so harness loops are algorithm-agnostic.  Each
// instance owns its state and is single-threaded; run one per trial.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<const double> g, std::span<double> delta) = 0;
  virtual std::size_t dim() const = 0;
  virtual const std::string& id() const = 0;
};

// Known ids: expectigrad, expectigrad-inner, expectigrad-bc-inner, sgd,
// sgd-momentum, adagrad, rmsprop, adadelta, adam, amsgrad, yogi.
// Throws std::invalid_argument for anything else.
std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig& cfg, std::size_t dim);

const std::vector<std::string>& optimizer_ids();

}  // namespace expectigrad
