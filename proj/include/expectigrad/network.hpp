#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace expectigrad {

enum class Activation { ReLU, Softplus };

Activation activation_from_string(const std::string& name);  // "relu" | "softplus"

// Mini-batch stored row-major: rows samples of cols features each.
struct Batch {
  std::size_t rows = 0, cols = 0;
  std::vector<double> inputs;        // rows * cols
  std::vector<std::int32_t> labels;  // rows entries in [0, classes)
};

// Fully connected classifier: dims = {inputs, hidden..., classes}, hidden
// activations ReLU or Softplus, linear output layer, mean softmax
// cross-entropy loss.  Parameters live in one flat contiguous vector so
// optimizers can treat the whole network as a single coordinate vector;
// layout is per layer: weight matrix row-major (out x in), then bias.
struct Network {
  std::vector<std::size_t> dims;
  Activation act = Activation::Softplus;
  std::vector<double> params;

  std::size_t param_count() const { return params.size(); }
  std::size_t layer_count() const { return dims.size() - 1; }
  std::size_t layer_offset(std::size_t layer) const;  // start of layer's weights

  // Weights drawn uniform from [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases
  // likewise; filled layer by layer, weights (row-major) before bias, from a
  // SplitMix64 stream on `seed`.
  static Network init(std::vector<std::size_t> dims, Activation act, std::uint64_t seed);
};

// Structured (per-layer) view of a parameter vector, for callers that want
// matrices instead of the flat layout.
struct LayerParams {
  std::vector<std::vector<double>> weights;  // [layer], row-major out x in
  std::vector<std::vector<double>> biases;   // [layer]
};

std::vector<double> flatten_params(const LayerParams& lp,
                                   const std::vector<std::size_t>& dims);
LayerParams unflatten_params(std::span<const double> flat,
                             const std::vector<std::size_t>& dims);

struct ForwardResult {
  double loss = 0.0;        // mean cross-entropy over the batch
  double error_rate = 0.0;  // fraction of argmax misclassifications
  std::vector<double> logits;  // rows x classes
};

ForwardResult forward(const Network& net, const Batch& batch);

struct GradResult {
  double loss = 0.0;
  double error_rate = 0.0;
  std::vector<double> grad;  // d(mean loss)/d(params), flat layout
};

GradResult backward(const Network& net, const Batch& batch);

// Central differences (f(x+h*e_j) - f(x-h*e_j)) / (2h) on the mean batch
// loss, one coordinate at a time.  O(param_count) forward passes -- this is
// the reference the analytic gradient is checked against, not a training
// path.  Errors: h <= 0 or non-finite.
std::vector<double> finite_diff_grad(const Network& net, const Batch& batch,
                                     double h = 1e-5);

}  // namespace expectigrad
