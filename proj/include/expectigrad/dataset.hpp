#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "expectigrad/network.hpp"
#include "expectigrad/rng.hpp"

namespace expectigrad {

struct DatasetSpec {
  std::size_t classes = 10;
  std::size_t input_dim = 64;
  std::size_t samples_per_class = 100;
  double spread = 1.0;  // cluster standard deviation; 0 collapses each class to a point
  std::uint64_t seed = 0;
};

struct Dataset {
  std::size_t rows = 0, cols = 0, classes = 0;
  std::vector<double> inputs;        // rows * cols, row-major
  std::vector<std::int32_t> labels;  // rows
  std::vector<double> centers;       // classes * cols for synthetic data; empty otherwise

  Batch full_batch() const;
};

// Gaussian-cluster classification data: class centers drawn uniform from
// [-1, 1]^d, samples = center + spread * N(0, I).  Rows are grouped by class
// (label c occupies rows [c*samples_per_class, (c+1)*samples_per_class));
// shuffling is the batch stream's job.  Deterministic in spec.seed.
Dataset synthesize_dataset(const DatasetSpec& spec);

// Per-feature mean over all rows.
std::vector<double> mean_image(const Dataset& data);

// In-place centering transforms; subtract then add restores the original
// values up to FP rounding.
void subtract_mean(Dataset& data, std::span<const double> mean);
void add_mean(Dataset& data, std::span<const double> mean);

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices);

// Minibatch iterator with a fresh Fisher-Yates shuffle per epoch, seeded by
// derive_seed(seed, epoch) so any epoch's order can be reproduced in
// isolation.  The partial tail batch is dropped: every training step sees
// exactly batch_size samples.
class BatchStream {
 public:
  BatchStream(const Dataset& data, std::size_t batch_size, std::uint64_t seed);

  void start_epoch(std::int64_t epoch);
  bool next(Batch& out);  // false once the epoch is exhausted
  std::size_t batches_per_epoch() const { return data_->rows / batch_size_; }

 private:
  const Dataset* data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace expectigrad
