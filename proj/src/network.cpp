#include "expectigrad/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "expectigrad/rng.hpp"

namespace expectigrad {

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "softplus") return Activation::Softplus;
  throw std::invalid_argument("unknown activation '" + name + "' (relu | softplus)");
}

static void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2)
    throw std::invalid_argument("a network needs at least input and output dims");
  for (std::size_t d : dims)
    if (d == 0) throw std::invalid_argument("layer dims must be positive");
}

static std::size_t total_params(const std::vector<std::size_t>& dims) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l + 1] * (dims[l] + 1);
  return n;
}

std::size_t Network::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += dims[l + 1] * (dims[l] + 1);
  return off;
}

Network Network::init(std::vector<std::size_t> dims, Activation act, std::uint64_t seed) {
  check_dims(dims);
  Network net;
  net.dims = std::move(dims);
  net.act = act;
  net.params.resize(total_params(net.dims));
  SplitMix64 rng(seed);
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims[l]));
    const std::size_t count = net.dims[l + 1] * (net.dims[l] + 1);
    for (std::size_t i = 0; i < count; ++i)
      net.params[p++] = rng.next_uniform(-bound, bound);
  }
  return net;
}

std::vector<double> flatten_params(const LayerParams& lp,
                                   const std::vector<std::size_t>& dims) {
  check_dims(dims);
  const std::size_t layers = dims.size() - 1;
  if (lp.weights.size() != layers || lp.biases.size() != layers)
    throw std::invalid_argument("layer count does not match dims");
  std::vector<double> flat;
  flat.reserve(total_params(dims));
  for (std::size_t l = 0; l < layers; ++l) {
    if (lp.weights[l].size() != dims[l + 1] * dims[l])
      throw std::invalid_argument("weight matrix size does not match dims");
    if (lp.biases[l].size() != dims[l + 1])
      throw std::invalid_argument("bias size does not match dims");
    flat.insert(flat.end(), lp.weights[l].begin(), lp.weights[l].end());
    flat.insert(flat.end(), lp.biases[l].begin(), lp.biases[l].end());
  }
  return flat;
}

LayerParams unflatten_params(std::span<const double> flat,
                             const std::vector<std::size_t>& dims) {
  check_dims(dims);
  if (flat.size() != total_params(dims))
    throw std::invalid_argument("flat vector length does not match dims");
  LayerParams lp;
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t wsize = dims[l + 1] * dims[l];
    lp.weights.emplace_back(flat.begin() + p, flat.begin() + p + wsize);
    p += wsize;
    lp.biases.emplace_back(flat.begin() + p, flat.begin() + p + dims[l + 1]);
    p += dims[l + 1];
  }
  return lp;
}

static void check_batch(const Network& net, const Batch& batch) {
  if (batch.rows == 0) throw std::invalid_argument("batch is empty");
  if (batch.cols != net.dims.front())
    throw std::invalid_argument("batch feature count does not match the input layer");
  if (batch.inputs.size() != batch.rows * batch.cols)
    throw std::invalid_argument("batch input buffer has the wrong size");
  if (batch.labels.size() != batch.rows)
    throw std::invalid_argument("batch label count does not match rows");
  const std::int32_t classes = static_cast<std::int32_t>(net.dims.back());
  for (std::int32_t y : batch.labels)
    if (y < 0 || y >= classes) throw std::invalid_argument("label out of range");
}

static double act_value(Activation act, double z) {
  if (act == Activation::ReLU) return z > 0.0 ? z : 0.0;
  // softplus, overflow-safe: max(z,0) + log1p(exp(-|z|))
  return (z > 0.0 ? z : 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

// Derivative at the pre-activation: ReLU uses the z > 0 subgradient (0 at
// the kink itself), Softplus the logistic sigmoid.
static double act_deriv(Activation act, double z) {
  if (act == Activation::ReLU) return z > 0.0 ? 1.0 : 0.0;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Per-sample forward pass: fills zs[l] (pre-activations) and as[l]
// (post-activations, as[0] = input).  The last zs entry holds the logits.
static void forward_sample(const Network& net, const double* x,
                           std::vector<std::vector<double>>& as,
                           std::vector<std::vector<double>>& zs) {
  const std::size_t layers = net.layer_count();
  as[0].assign(x, x + net.dims[0]);
  std::size_t p = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t nin = net.dims[l], nout = net.dims[l + 1];
    const double* W = net.params.data() + p;
    const double* b = W + nout * nin;
    p += nout * (nin + 1);
    zs[l].resize(nout);
    for (std::size_t o = 0; o < nout; ++o) {
      double acc = b[o];
      const double* row = W + o * nin;
      const double* in = as[l].data();
      for (std::size_t i = 0; i < nin; ++i) acc += row[i] * in[i];
      zs[l][o] = acc;
    }
    if (l + 1 < layers) {
      as[l + 1].resize(nout);
      for (std::size_t o = 0; o < nout; ++o) as[l + 1][o] = act_value(net.act, zs[l][o]);
    }
  }
}

// Softmax cross-entropy from logits with max subtraction; returns the loss
// and (optionally) the softmax probabilities.
static double xent_from_logits(const std::vector<double>& logits, std::int32_t label,
                               std::vector<double>* probs) {
  const std::size_t k = logits.size();
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  if (probs) {
    probs->resize(k);
    for (std::size_t i = 0; i < k; ++i) (*probs)[i] = std::exp(logits[i] - mx) / sum;
  }
  return lse - logits[static_cast<std::size_t>(label)];
}

static std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

ForwardResult forward(const Network& net, const Batch& batch) {
  check_batch(net, batch);
  const std::size_t layers = net.layer_count();
  const std::size_t k = net.dims.back();
  std::vector<std::vector<double>> as(layers + 1), zs(layers);

  ForwardResult result;
  result.logits.resize(batch.rows * k);
  double loss = 0.0;
  std::size_t wrong = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_sample(net, batch.inputs.data() + r * batch.cols, as, zs);
    const std::vector<double>& logits = zs[layers - 1];
    loss += xent_from_logits(logits, batch.labels[r], nullptr);
    if (argmax(logits) != static_cast<std::size_t>(batch.labels[r])) ++wrong;
    std::copy(logits.begin(), logits.end(), result.logits.begin() + r * k);
  }
  result.loss = loss / static_cast<double>(batch.rows);
  result.error_rate = static_cast<double>(wrong) / static_cast<double>(batch.rows);
  return result;
}

GradResult backward(const Network& net, const Batch& batch) {
  check_batch(net, batch);
  const std::size_t layers = net.layer_count();
  std::vector<std::vector<double>> as(layers + 1), zs(layers);

  GradResult result;
  result.grad.assign(net.param_count(), 0.0);
  const double inv_rows = 1.0 / static_cast<double>(batch.rows);
  double loss = 0.0;
  std::size_t wrong = 0;
  std::vector<double> dz, da, probs;

  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_sample(net, batch.inputs.data() + r * batch.cols, as, zs);
    const std::vector<double>& logits = zs[layers - 1];
    loss += xent_from_logits(logits, batch.labels[r], &probs);
    if (argmax(logits) != static_cast<std::size_t>(batch.labels[r])) ++wrong;

    // d(mean loss)/d(logits) = (softmax - onehot) / rows
    dz = probs;
    for (double& v : dz) v *= inv_rows;
    dz[static_cast<std::size_t>(batch.labels[r])] -= inv_rows;

    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t nin = net.dims[l], nout = net.dims[l + 1];
      const std::size_t p = net.layer_offset(l);
      double* dW = result.grad.data() + p;
      double* db = dW + nout * nin;
      const double* a_in = as[l].data();
      for (std::size_t o = 0; o < nout; ++o) {
        const double d = dz[o];
        double* drow = dW + o * nin;
        for (std::size_t i = 0; i < nin; ++i) drow[i] += d * a_in[i];
        db[o] += d;
      }
      if (l == 0) break;
      const double* W = net.params.data() + p;
      da.assign(nin, 0.0);
      for (std::size_t o = 0; o < nout; ++o) {
        const double d = dz[o];
        const double* row = W + o * nin;
        for (std::size_t i = 0; i < nin; ++i) da[i] += row[i] * d;
      }
      dz.resize(nin);
      for (std::size_t i = 0; i < nin; ++i)
        dz[i] = da[i] * act_deriv(net.act, zs[l - 1][i]);
    }
  }
  result.loss = loss * inv_rows;
  result.error_rate = static_cast<double>(wrong) / static_cast<double>(batch.rows);
  return result;
}

std::vector<double> finite_diff_grad(const Network& net, const Batch& batch, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("finite-difference step h must be positive and finite");
  check_batch(net, batch);
  Network probe = net;
  std::vector<double> grad(net.param_count());
  for (std::size_t j = 0; j < net.param_count(); ++j) {
    const double saved = probe.params[j];
    probe.params[j] = saved + h;
    const double up = forward(probe, batch).loss;
    probe.params[j] = saved - h;
    const double down = forward(probe, batch).loss;
    probe.params[j] = saved;
    grad[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace expectigrad
