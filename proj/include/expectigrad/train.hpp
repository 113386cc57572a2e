#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expectigrad/dataset.hpp"
#include "expectigrad/harness.hpp"
#include "expectigrad/network.hpp"

namespace expectigrad {

struct TrainConfig {
  std::string dataset = "synthetic";  // synthetic | mnist
  DatasetSpec synthetic;
  std::string mnist_images, mnist_labels;
  bool center = true;  // subtract the training-set mean image before training

  std::vector<std::size_t> hidden = {100, 100};
  // Full layer-size list (input:hidden...:classes).  When non-empty it
  // replaces `hidden`, and the endpoints must match the dataset.
  std::vector<std::size_t> arch;
  std::string activation = "softplus";

  OptimizerConfig optimizer;
  std::int64_t epochs = 1;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;          // drives init and shuffling (dataset seed is separate)
  std::int64_t record_every = 1;
  std::string out;
};

void apply_json(TrainConfig& cfg, const std::string& json_text);

struct TrainResult {
  Trajectory traj;
  double final_train_loss = 0.0;   // full training set, after the last epoch
  double final_train_error = 0.0;
  Network net;
};

// Standard minibatch loop: fresh shuffle per epoch, one optimizer step per
// batch, partial tail batches dropped.  Network init uses
// derive_seed(cfg.seed, 1) and shuffling derive_seed(cfg.seed, 2), so trials
// differ only through cfg.seed while the dataset stays fixed.
TrainResult train_run(const TrainConfig& cfg);

// Grid runner for the momentum-variant comparison: every (variant, beta,
// trial) cell trains the same network/dataset with a different trial seed,
// and reports the post-epoch full-training-set loss.  Cells are independent
// and may run on worker threads (EXPECTIGRAD_THREADS caps the count, else
// hardware concurrency); results are keyed by cell, not completion order,
// so the output is schedule-independent.
struct SweepConfig {
  TrainConfig base;
  std::vector<std::string> variants = {"expectigrad-inner", "expectigrad-bc-inner",
                                       "expectigrad"};
  std::vector<double> betas = {0.5, 0.9, 0.99};
  std::int64_t trials = 5;
  int threads = 0;  // 0: EXPECTIGRAD_THREADS or hardware concurrency
};

struct SweepCell {
  std::string variant;
  double beta = 0.0;
  std::uint64_t trial_seed = 0;
  double final_loss = 0.0;
  double final_error = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  double mean_loss(const std::string& variant, double beta) const;
};

SweepResult momentum_sweep(const SweepConfig& cfg);

}  // namespace expectigrad
