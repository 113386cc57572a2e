#include "expectigrad/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace expectigrad {

using nlohmann::json;

static void merge_optimizer(OptimizerConfig& opt, const json& j) {
  if (j.contains("id")) opt.id = j.at("id").get<std::string>();
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  num("alpha", opt.alpha);
  num("beta", opt.beta);
  num("beta1", opt.beta1);
  num("beta2", opt.beta2);
  num("epsilon", opt.epsilon);
  num("rho", opt.rho);
  num("mu", opt.mu);
}

void apply_json(RunConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
    if (j.contains("x0")) cfg.x0 = j.at("x0").get<double>();
    if (j.contains("steps")) cfg.steps = j.at("steps").get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("record_every"))
      cfg.record_every = j.at("record_every").get<std::int64_t>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("reddi")) {
      const json& r = j.at("reddi");
      if (r.contains("big")) cfg.reddi.big = r.at("big").get<double>();
      if (r.contains("small")) cfg.reddi.small = r.at("small").get<double>();
      if (r.contains("period")) cfg.reddi.period = r.at("period").get<std::int64_t>();
      if (r.contains("prob")) cfg.reddi.prob = r.at("prob").get<double>();
      if (r.contains("phase")) cfg.reddi.phase = r.at("phase").get<std::int64_t>();
      if (r.contains("comparator"))
        cfg.reddi.comparator = r.at("comparator").get<double>();
    }
    if (j.contains("quadratic")) {
      const json& q = j.at("quadratic");
      if (q.contains("target"))
        cfg.quadratic.target = q.at("target").get<std::vector<double>>();
      if (q.contains("x0")) cfg.quadratic.x0 = q.at("x0").get<std::vector<double>>();
      if (q.contains("noise_halfwidth"))
        cfg.quadratic.noise_halfwidth = q.at("noise_halfwidth").get<double>();
    }
    if (j.contains("optimizer")) merge_optimizer(cfg.optimizer, j.at("optimizer"));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config field has the wrong type: ") + e.what());
  }
}

// Record x/g vectors only for small problems; training-scale parameter
// vectors would bloat every record for data no CSV schema uses.
static constexpr std::size_t kMaxRecordedDim = 8;

Trajectory run_experiment(const RunConfig& cfg) {
  if (cfg.steps < 0) throw std::invalid_argument("steps must be >= 0");
  const bool reddi_online = cfg.problem == "reddi-online";
  const bool reddi_stoch = cfg.problem == "reddi-stochastic";
  const bool quadratic = cfg.problem == "quadratic";
  if (!reddi_online && !reddi_stoch && !quadratic)
    throw std::invalid_argument("unknown problem '" + cfg.problem +
                                "' (reddi-online | reddi-stochastic | quadratic)");

  std::vector<double> x;
  if (quadratic) {
    if (cfg.quadratic.x0.size() != cfg.quadratic.target.size())
      throw std::invalid_argument("quadratic x0 and target lengths differ");
    if (!(cfg.quadratic.noise_halfwidth >= 0.0))
      throw std::invalid_argument("noise_halfwidth must be >= 0");
    x = cfg.quadratic.x0;
  } else {
    cfg.reddi.validate(reddi_stoch);
    x = {cfg.x0};
  }
  const std::size_t dim = x.size();

  auto opt = make_optimizer(cfg.optimizer, dim);
  SplitMix64 rng(cfg.seed);

  Trajectory traj;
  const std::int64_t stride =
      cfg.record_every > 0 ? cfg.record_every : std::max<std::int64_t>(1, cfg.steps / 10000);

  std::vector<double> g(dim), delta(dim);
  double cum_regret = 0.0;
  double comparator_regret = 0.0;

  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    double loss = 0.0;
    if (reddi_online || reddi_stoch) {
      g[0] = reddi_online ? reddi_online_grad(t, cfg.reddi)
                          : reddi_stochastic_grad(rng, cfg.reddi);
      loss = g[0] * x[0];
      comparator_regret += g[0] * (x[0] - cfg.reddi.comparator);
    } else {
      loss = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double r = x[j] - cfg.quadratic.target[j];
        loss += 0.5 * r * r;
        g[j] = r;
        if (cfg.quadratic.noise_halfwidth > 0.0)
          g[j] += rng.next_uniform(-cfg.quadratic.noise_halfwidth,
                                   cfg.quadratic.noise_halfwidth);
      }
    }

    if (!std::isfinite(loss)) {
      traj.aborted = true;
      traj.abort_reason = "non-finite loss at step " + std::to_string(t);
      TrajectoryRecord rec;
      rec.step = t;
      rec.loss = loss;
      rec.cum_regret = cum_regret;
      if (dim <= kMaxRecordedDim) rec.x = x;
      traj.records.push_back(std::move(rec));
      traj.total_steps = t - 1;
      break;
    }

    opt->step(g, delta);
    double gnorm_sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      gnorm_sq += g[j] * g[j];
      x[j] += delta[j];
    }
    cum_regret += gnorm_sq;

    if (t % stride == 0 || t == cfg.steps) {
      TrajectoryRecord rec;
      rec.step = t;
      rec.loss = loss;
      rec.grad_norm_sq = gnorm_sq;
      rec.cum_regret = cum_regret;
      if (dim <= kMaxRecordedDim) {
        rec.x = x;
        rec.g = g;
      }
      traj.records.push_back(std::move(rec));
    }
    traj.total_steps = t;
  }

  traj.final_cum_regret = cum_regret;
  traj.comparator_regret = comparator_regret;
  traj.final_x = x;
  return traj;
}

static void append_fp(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

void emit_csv(const Trajectory& traj, std::ostream& os) {
  std::string line;
  if (traj.training) {
    os << "step,epoch,loss,error_rate,grad_norm_sq,cum_regret\n";
    for (const TrajectoryRecord& r : traj.records) {
      line.clear();
      line += std::to_string(r.step);
      line += ',';
      line += std::to_string(r.epoch);
      line += ',';
      append_fp(line, r.loss);
      line += ',';
      append_fp(line, r.error_rate);
      line += ',';
      append_fp(line, r.grad_norm_sq);
      line += ',';
      append_fp(line, r.cum_regret);
      line += '\n';
      os << line;
    }
  } else {
    os << "step,x0,loss,grad_norm_sq,cum_regret\n";
    for (const TrajectoryRecord& r : traj.records) {
      line.clear();
      line += std::to_string(r.step);
      line += ',';
      append_fp(line, r.x.empty() ? 0.0 : r.x[0]);
      line += ',';
      append_fp(line, r.loss);
      line += ',';
      append_fp(line, r.grad_norm_sq);
      line += ',';
      append_fp(line, r.cum_regret);
      line += '\n';
      os << line;
    }
  }
}

void emit_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_csv(traj, out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

RegretReport cumulative_regret(const Trajectory& traj) {
  RegretReport report;
  report.T = traj.total_steps;
  report.cumulative = traj.final_cum_regret;
  report.average = report.T > 0 ? report.cumulative / static_cast<double>(report.T) : 0.0;
  return report;
}

double regret_bound(double L, double sigma2, std::int64_t b, double alpha,
                    double epsilon, std::int64_t T, double gap) {
  if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
  if (b < 1) throw std::invalid_argument("b must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  if (!(gap >= 0.0)) throw std::invalid_argument("gap must be >= 0");
  if (alpha > epsilon / L)
    std::fprintf(stderr,
                 "warning: alpha (%g) exceeds epsilon/L (%g); the average-regret "
                 "guarantee assumes alpha <= epsilon/L\n",
                 alpha, epsilon / L);
  const double Td = static_cast<double>(T);
  const double bd = static_cast<double>(b);
  return (epsilon + L) * (gap / (alpha * Td) +
                          (2.0 * L / (epsilon * epsilon * std::sqrt(Td))) *
                              (L * L + sigma2 / bd) +
                          sigma2 / (2.0 * epsilon * bd));
}

NoiseReport estimate_noise(const GradSampler& sampler, std::span<const double> x,
                           std::int64_t batch, std::int64_t samples, SplitMix64& rng) {
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (samples < 2) throw std::invalid_argument("samples must be >= 2 for a variance");
  const std::size_t dim = x.size();
  const std::size_t ns = static_cast<std::size_t>(samples);

  // Two-pass variance: keep all draws, compute the mean, then sum squared
  // deviations.  Stable even when the variance is tiny next to the mean.
  std::vector<double> draws(ns * dim);
  std::vector<double> single(dim), mean(dim, 0.0);
  double norm_sq_sum = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    double* gi = draws.data() + i * dim;
    std::fill(gi, gi + dim, 0.0);
    for (std::int64_t k = 0; k < batch; ++k) {
      sampler(x, rng, single);
      for (std::size_t j = 0; j < dim; ++j) gi[j] += single[j];
    }
    double nsq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      gi[j] /= static_cast<double>(batch);
      mean[j] += gi[j];
      nsq += gi[j] * gi[j];
    }
    norm_sq_sum += nsq;
  }
  for (std::size_t j = 0; j < dim; ++j) mean[j] /= static_cast<double>(samples);

  double ss = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const double* gi = draws.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = gi[j] - mean[j];
      ss += d * d;
    }
  }

  NoiseReport report;
  report.samples = samples;
  report.batch = batch;
  report.sigma2_hat = ss / static_cast<double>(samples - 1);
  report.grad_norm_sq_mean = norm_sq_sum / static_cast<double>(samples);
  return report;
}

}  // namespace expectigrad
