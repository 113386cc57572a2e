#include "expectigrad/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "expectigrad/idx.hpp"
#include "json.hpp"

namespace expectigrad {

using nlohmann::json;

void apply_json(TrainConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("dataset")) cfg.dataset = j.at("dataset").get<std::string>();
    if (j.contains("synthetic")) {
      const json& s = j.at("synthetic");
      if (s.contains("classes")) cfg.synthetic.classes = s.at("classes").get<std::size_t>();
      if (s.contains("input_dim"))
        cfg.synthetic.input_dim = s.at("input_dim").get<std::size_t>();
      if (s.contains("samples_per_class"))
        cfg.synthetic.samples_per_class = s.at("samples_per_class").get<std::size_t>();
      if (s.contains("spread")) cfg.synthetic.spread = s.at("spread").get<double>();
      if (s.contains("seed")) cfg.synthetic.seed = s.at("seed").get<std::uint64_t>();
    }
    if (j.contains("mnist_images")) cfg.mnist_images = j.at("mnist_images").get<std::string>();
    if (j.contains("mnist_labels")) cfg.mnist_labels = j.at("mnist_labels").get<std::string>();
    if (j.contains("center")) cfg.center = j.at("center").get<bool>();
    if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    if (j.contains("arch")) cfg.arch = j.at("arch").get<std::vector<std::size_t>>();
    if (j.contains("activation")) cfg.activation = j.at("activation").get<std::string>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<std::int64_t>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("record_every")) cfg.record_every = j.at("record_every").get<std::int64_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("optimizer")) {
      // reuse the RunConfig merger by round-tripping just the optimizer object
      RunConfig tmp;
      tmp.optimizer = cfg.optimizer;
      json wrapper;
      wrapper["optimizer"] = j.at("optimizer");
      apply_json(tmp, wrapper.dump());
      cfg.optimizer = tmp.optimizer;
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config field has the wrong type: ") + e.what());
  }
}

static Dataset load_training_data(const TrainConfig& cfg) {
  if (cfg.dataset == "synthetic") return synthesize_dataset(cfg.synthetic);
  if (cfg.dataset == "mnist") {
    if (cfg.mnist_images.empty() || cfg.mnist_labels.empty())
      throw std::invalid_argument(
          "mnist dataset needs --mnist-images and --mnist-labels paths");
    return mnist_dataset(cfg.mnist_images, cfg.mnist_labels);
  }
  throw std::invalid_argument("unknown dataset '" + cfg.dataset + "' (synthetic | mnist)");
}

TrainResult train_run(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");

  Dataset data = load_training_data(cfg);
  if (cfg.center) {
    const std::vector<double> mean = mean_image(data);
    subtract_mean(data, mean);
  }

  std::vector<std::size_t> dims;
  if (!cfg.arch.empty()) {
    if (cfg.arch.size() < 2)
      throw std::invalid_argument("arch needs at least input and output sizes");
    if (cfg.arch.front() != data.cols || cfg.arch.back() != data.classes)
      throw std::invalid_argument(
          "arch endpoints " + std::to_string(cfg.arch.front()) + ":" +
          std::to_string(cfg.arch.back()) + " do not match the dataset (" +
          std::to_string(data.cols) + " inputs, " + std::to_string(data.classes) +
          " classes)");
    dims = cfg.arch;
  } else {
    dims.push_back(data.cols);
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(data.classes);
  }

  Network net = Network::init(dims, activation_from_string(cfg.activation),
                              derive_seed(cfg.seed, 1));
  auto opt = make_optimizer(cfg.optimizer, net.param_count());
  BatchStream stream(data, cfg.batch_size, derive_seed(cfg.seed, 2));

  Trajectory traj;
  traj.training = true;
  const std::int64_t stride = std::max<std::int64_t>(1, cfg.record_every);

  std::vector<double> delta(net.param_count());
  double cum_regret = 0.0;
  std::int64_t t = 0;
  Batch batch;
  bool stop = false;
  for (std::int64_t epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    stream.start_epoch(epoch);
    while (stream.next(batch)) {
      ++t;
      GradResult res = backward(net, batch);
      if (!std::isfinite(res.loss)) {
        traj.aborted = true;
        traj.abort_reason = "non-finite loss at step " + std::to_string(t);
        TrajectoryRecord rec;
        rec.step = t;
        rec.epoch = epoch;
        rec.loss = res.loss;
        rec.cum_regret = cum_regret;
        traj.records.push_back(std::move(rec));
        traj.total_steps = t - 1;
        stop = true;
        break;
      }
      double gnorm_sq = 0.0;
      for (double v : res.grad) gnorm_sq += v * v;
      cum_regret += gnorm_sq;
      opt->step(res.grad, delta);
      for (std::size_t j = 0; j < net.params.size(); ++j) net.params[j] += delta[j];

      const bool last = epoch == cfg.epochs && t == static_cast<std::int64_t>(
                            stream.batches_per_epoch() * cfg.epochs);
      if (t % stride == 0 || last) {
        TrajectoryRecord rec;
        rec.step = t;
        rec.epoch = epoch;
        rec.loss = res.loss;
        rec.error_rate = res.error_rate;
        rec.grad_norm_sq = gnorm_sq;
        rec.cum_regret = cum_regret;
        traj.records.push_back(std::move(rec));
      }
      traj.total_steps = t;
    }
  }
  traj.final_cum_regret = cum_regret;

  TrainResult result;
  const ForwardResult full = forward(net, data.full_batch());
  result.final_train_loss = full.loss;
  result.final_train_error = full.error_rate;
  result.traj = std::move(traj);
  result.net = std::move(net);
  return result;
}

double SweepResult::mean_loss(const std::string& variant, double beta) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const SweepCell& c : cells)
    if (c.variant == variant && c.beta == beta) {
      sum += c.final_loss;
      ++count;
    }
  if (count == 0) throw std::invalid_argument("no cells for that (variant, beta)");
  return sum / static_cast<double>(count);
}

static int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EXPECTIGRAD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SweepResult momentum_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.variants.empty() || cfg.betas.empty())
    throw std::invalid_argument("variants and betas must be non-empty");

  // Materialize the full grid first; cells own their slot in the result, so
  // worker scheduling cannot change the output.
  SweepResult result;
  for (const std::string& variant : cfg.variants)
    for (double beta : cfg.betas)
      for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        SweepCell cell;
        cell.variant = variant;
        cell.beta = beta;
        cell.trial_seed = derive_seed(cfg.base.seed, static_cast<std::uint64_t>(trial));
        result.cells.push_back(std::move(cell));
      }

  const int threads =
      std::min<int>(resolve_threads(cfg.threads), static_cast<int>(result.cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      SweepCell& cell = result.cells[i];
      TrainConfig run = cfg.base;
      run.optimizer.id = cell.variant;
      run.optimizer.beta = cell.beta;
      run.seed = cell.trial_seed;
      run.out.clear();
      const TrainResult res = train_run(run);
      cell.final_loss = res.final_train_loss;
      cell.final_error = res.final_train_error;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return result;
}

}  // namespace expectigrad
