#include "expectigrad/dataset.hpp"

#include <stdexcept>

namespace expectigrad {

Batch Dataset::full_batch() const {
  Batch b;
  b.rows = rows;
  b.cols = cols;
  b.inputs = inputs;
  b.labels = labels;
  return b;
}

Dataset synthesize_dataset(const DatasetSpec& spec) {
  if (spec.classes == 0 || spec.input_dim == 0 || spec.samples_per_class == 0)
    throw std::invalid_argument("classes, input_dim and samples_per_class must be positive");
  if (!(spec.spread >= 0.0)) throw std::invalid_argument("spread must be >= 0");

  Dataset data;
  data.classes = spec.classes;
  data.cols = spec.input_dim;
  data.rows = spec.classes * spec.samples_per_class;
  data.inputs.resize(data.rows * data.cols);
  data.labels.resize(data.rows);
  data.centers.resize(spec.classes * spec.input_dim);

  // One stream, fixed consumption order: all centers first, then samples
  // class by class, so the geometry is a function of the seed alone.
  SplitMix64 rng(spec.seed);
  for (double& c : data.centers) c = rng.next_uniform(-1.0, 1.0);

  std::size_t row = 0;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    const double* center = data.centers.data() + c * data.cols;
    for (std::size_t s = 0; s < spec.samples_per_class; ++s, ++row) {
      double* x = data.inputs.data() + row * data.cols;
      for (std::size_t j = 0; j < data.cols; ++j)
        x[j] = center[j] + spec.spread * rng.next_normal();
      data.labels[row] = static_cast<std::int32_t>(c);
    }
  }
  return data;
}

std::vector<double> mean_image(const Dataset& data) {
  if (data.rows == 0) throw std::invalid_argument("dataset is empty");
  std::vector<double> mean(data.cols, 0.0);
  for (std::size_t r = 0; r < data.rows; ++r) {
    const double* x = data.inputs.data() + r * data.cols;
    for (std::size_t j = 0; j < data.cols; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(data.rows);
  return mean;
}

static void shift(Dataset& data, std::span<const double> mean, double sign) {
  if (mean.size() != data.cols)
    throw std::invalid_argument("mean length does not match feature count");
  for (std::size_t r = 0; r < data.rows; ++r) {
    double* x = data.inputs.data() + r * data.cols;
    for (std::size_t j = 0; j < data.cols; ++j) x[j] += sign * mean[j];
  }
}

void subtract_mean(Dataset& data, std::span<const double> mean) { shift(data, mean, -1.0); }
void add_mean(Dataset& data, std::span<const double> mean) { shift(data, mean, +1.0); }

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
  Batch b;
  b.rows = indices.size();
  b.cols = data.cols;
  b.inputs.resize(b.rows * b.cols);
  b.labels.resize(b.rows);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= data.rows) throw std::out_of_range("sample index out of range");
    const double* src = data.inputs.data() + indices[i] * data.cols;
    std::copy(src, src + data.cols, b.inputs.begin() + i * b.cols);
    b.labels[i] = data.labels[indices[i]];
  }
  return b;
}

BatchStream::BatchStream(const Dataset& data, std::size_t batch_size, std::uint64_t seed)
    : data_(&data), batch_size_(batch_size), seed_(seed) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (batch_size > data.rows)
    throw std::invalid_argument("batch size exceeds the dataset size");
  order_.resize(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) order_[i] = i;
  cursor_ = data.rows;  // exhausted until start_epoch
}

void BatchStream::start_epoch(std::int64_t epoch) {
  SplitMix64 rng(derive_seed(seed_, static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  // Fisher-Yates; the modulo bias over these range sizes is far below any
  // statistic the tests look at, and keeps the draw count at one per swap.
  for (std::size_t i = order_.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

bool BatchStream::next(Batch& out) {
  if (cursor_ + batch_size_ > order_.size()) return false;  // drop the partial tail
  out = make_batch(*data_, std::span<const std::size_t>(order_).subspan(cursor_, batch_size_));
  cursor_ += batch_size_;
  return true;
}

}  // namespace expectigrad
