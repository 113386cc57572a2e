// Command-line front end: run the optimizers on the testbed problems, train
// small classifiers, and expose the analysis helpers (gradient check, noise
// estimation, regret bound).  Every run is reproducible from its --seed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "expectigrad/harness.hpp"
#include "expectigrad/train.hpp"

using namespace expectigrad;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Pull the --config value out of argv before CLI11 runs, so JSON-provided
// fields become the defaults that explicit flags then override.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

void add_optimizer_flags(CLI::App* cmd, OptimizerConfig& opt) {
  cmd->add_option("--optimizer", opt.id, "expectigrad | expectigrad-inner | "
                  "expectigrad-bc-inner | sgd | sgd-momentum | adagrad | rmsprop | "
                  "adadelta | adam | amsgrad | yogi");
  cmd->add_option("--alpha", opt.alpha, "step size");
  cmd->add_option("--beta", opt.beta, "momentum decay of the main optimizer");
  cmd->add_option("--beta1", opt.beta1, "first-moment decay (Adam family)");
  cmd->add_option("--beta2", opt.beta2, "second-moment decay (Adam family / RMSProp)");
  cmd->add_option("--epsilon", opt.epsilon, "denominator damping");
  cmd->add_option("--rho", opt.rho, "ADADELTA averaging constant");
  cmd->add_option("--mu", opt.mu, "heavy-ball momentum");
}

// Accept both the short variant names and the full optimizer ids.
std::string canonical_variant(const std::string& v) {
  if (v == "inner" || v == "expectigrad-inner") return "expectigrad-inner";
  if (v == "bc-inner" || v == "expectigrad-bc-inner") return "expectigrad-bc-inner";
  if (v == "bc-outer" || v == "outer" || v == "expectigrad") return "expectigrad";
  throw std::invalid_argument("unknown momentum variant '" + v +
                              "' (inner | bc-inner | bc-outer)");
}

// For synthetic data the declared architecture endpoints define the dataset
// shape; for mnist they are validated against the files instead.
void apply_arch_to_synthetic(TrainConfig& cfg) {
  if (cfg.arch.size() >= 2 && cfg.dataset == "synthetic") {
    cfg.synthetic.input_dim = cfg.arch.front();
    cfg.synthetic.classes = cfg.arch.back();
  }
}

void add_synthetic_flags(CLI::App* cmd, TrainConfig& cfg) {
  cmd->add_option("--classes", cfg.synthetic.classes, "synthetic: number of classes");
  cmd->add_option("--input-dim", cfg.synthetic.input_dim, "synthetic: feature count");
  cmd->add_option("--samples-per-class", cfg.synthetic.samples_per_class,
                  "synthetic: samples per class");
  cmd->add_option("--spread", cfg.synthetic.spread, "synthetic: cluster stddev");
  cmd->add_option("--data-seed", cfg.synthetic.seed, "synthetic: dataset seed");
  cmd->add_option("--mnist-images", cfg.mnist_images, "IDX images file");
  cmd->add_option("--mnist-labels", cfg.mnist_labels, "IDX labels file");
  cmd->add_option("--dataset", cfg.dataset, "synthetic | mnist");
  cmd->add_flag("--no-center", [&cfg](std::int64_t) { cfg.center = false; },
                "skip mean-image subtraction");
}

int run_reddi(const RunConfig& cfg, const std::string& variant) {
  RunConfig run = cfg;
  run.problem = variant == "stochastic" ? "reddi-stochastic" : "reddi-online";
  const Trajectory traj = run_experiment(run);
  if (!run.out.empty()) emit_csv(traj, run.out);
  const RegretReport regret = cumulative_regret(traj);
  std::printf("problem=%s optimizer=%s steps=%lld\n", run.problem.c_str(),
              run.optimizer.id.c_str(), static_cast<long long>(regret.T));
  std::printf("final_x=%.12g\n", traj.final_x.empty() ? 0.0 : traj.final_x[0]);
  std::printf("cum_grad_norm_sq=%.12g comparator_regret=%.12g\n", regret.cumulative,
              traj.comparator_regret);
  if (traj.aborted) {
    std::printf("aborted: %s\n", traj.abort_reason.c_str());
    return 1;
  }
  if (!run.out.empty()) std::printf("wrote %s\n", run.out.c_str());
  return 0;
}

int run_train(TrainConfig cfg) {
  apply_arch_to_synthetic(cfg);
  const TrainResult res = train_run(cfg);
  if (!cfg.out.empty()) emit_csv(res.traj, cfg.out);
  std::printf("steps=%lld final_train_loss=%.12g final_train_error=%.12g\n",
              static_cast<long long>(res.traj.total_steps), res.final_train_loss,
              res.final_train_error);
  if (res.traj.aborted) {
    std::printf("aborted: %s\n", res.traj.abort_reason.c_str());
    return 1;
  }
  if (!cfg.out.empty()) std::printf("wrote %s\n", cfg.out.c_str());
  return 0;
}

int run_sweep(SweepConfig cfg) {
  apply_arch_to_synthetic(cfg.base);
  for (std::string& v : cfg.variants) v = canonical_variant(v);
  const SweepResult result = momentum_sweep(cfg);
  if (!cfg.base.out.empty()) {
    std::ofstream out(cfg.base.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + cfg.base.out + "' for writing");
    out << "variant,beta,trial_seed,final_loss,final_error\n";
    char buf[160];
    for (const SweepCell& c : result.cells) {
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%llu,%.17g,%.17g\n", c.variant.c_str(),
                    c.beta, static_cast<unsigned long long>(c.trial_seed), c.final_loss,
                    c.final_error);
      out << buf;
    }
  }
  std::printf("%-24s %8s %14s\n", "variant", "beta", "mean_loss");
  for (const std::string& v : cfg.variants)
    for (double b : cfg.betas)
      std::printf("%-24s %8g %14.8f\n", v.c_str(), b, result.mean_loss(v, b));
  if (!cfg.base.out.empty()) std::printf("wrote %s\n", cfg.base.out.c_str());
  return 0;
}

struct GradcheckOptions {
  std::int64_t trials = 20;
  std::vector<std::size_t> max_dims = {8, 16, 16, 4};
  std::size_t max_batch = 8;
  double h = 1e-5;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::string activation = "softplus";
};

// Relative error of the analytic gradient against central differences,
// normalized by the largest finite-difference magnitude in the net.
double gradcheck_error(const GradcheckOptions& opt, std::uint64_t trial_seed) {
  SplitMix64 rng(trial_seed);
  std::vector<std::size_t> dims(opt.max_dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i)
    dims[i] = 1 + static_cast<std::size_t>(rng.next_u64() % opt.max_dims[i]);
  const std::size_t batch_rows = 1 + static_cast<std::size_t>(rng.next_u64() % opt.max_batch);

  Network net = Network::init(dims, activation_from_string(opt.activation),
                              derive_seed(trial_seed, 1));
  Batch batch;
  batch.rows = batch_rows;
  batch.cols = dims.front();
  batch.inputs.resize(batch.rows * batch.cols);
  for (double& v : batch.inputs) v = rng.next_uniform(-1.0, 1.0);
  batch.labels.resize(batch.rows);
  for (std::int32_t& y : batch.labels)
    y = static_cast<std::int32_t>(rng.next_u64() % dims.back());

  const std::vector<double> analytic = backward(net, batch).grad;
  const std::vector<double> fd = finite_diff_grad(net, batch, opt.h);
  double scale = 0.0;
  for (double v : fd) scale = std::max(scale, std::fabs(v));
  scale = std::max(scale, 1e-12);
  double worst = 0.0;
  for (std::size_t j = 0; j < fd.size(); ++j)
    worst = std::max(worst, std::fabs(analytic[j] - fd[j]) / scale);
  return worst;
}

int run_gradcheck(const GradcheckOptions& opt) {
  double worst = 0.0;
  for (std::int64_t i = 0; i < opt.trials; ++i)
    worst = std::max(worst, gradcheck_error(opt, derive_seed(opt.seed, i)));
  std::printf("trials=%lld max_rel_error=%.12g tol=%.12g\n",
              static_cast<long long>(opt.trials), worst, opt.tol);
  if (worst <= opt.tol) {
    std::printf("PASS\n");
    return 0;
  }
  std::printf("FAIL\n");
  return 1;
}

struct NoiseOptions {
  std::string problem = "reddi-stochastic";
  ReddiSpec reddi;
  std::size_t dim = 2;
  double noise_halfwidth = 0.1;
  std::vector<double> x;
  std::int64_t batch = 1;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
};

int run_noise(const NoiseOptions& opt) {
  SplitMix64 rng(opt.seed);
  NoiseReport report;
  if (opt.problem == "reddi-stochastic") {
    opt.reddi.validate(true);
    const std::vector<double> x = {0.0};
    GradSampler sampler = [&opt](std::span<const double>, SplitMix64& r,
                                 std::span<double> g) {
      g[0] = reddi_stochastic_grad(r, opt.reddi);
    };
    report = estimate_noise(sampler, x, opt.batch, opt.samples, rng);
  } else if (opt.problem == "quadratic") {
    std::vector<double> x = opt.x;
    if (x.empty()) x.assign(opt.dim, 1.0);
    const std::vector<double> target(x.size(), 0.0);
    GradSampler sampler = [&opt, &target](std::span<const double> at, SplitMix64& r,
                                          std::span<double> g) {
      for (std::size_t j = 0; j < at.size(); ++j)
        g[j] = (at[j] - target[j]) + r.next_uniform(-opt.noise_halfwidth,
                                                    opt.noise_halfwidth);
    };
    report = estimate_noise(sampler, x, opt.batch, opt.samples, rng);
  } else {
    throw std::invalid_argument("unknown problem '" + opt.problem +
                                "' (reddi-stochastic | quadratic)");
  }
  std::printf("samples=%lld batch=%lld\n", static_cast<long long>(report.samples),
              static_cast<long long>(report.batch));
  std::printf("sigma2_hat=%.12g grad_norm_sq_mean=%.12g\n", report.sigma2_hat,
              report.grad_norm_sq_mean);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expectigrad: sum-based adaptive optimization testbed"};
  app.require_subcommand(0, 1);

  // reddi ---------------------------------------------------------------
  RunConfig reddi_cfg;
  reddi_cfg.steps = 1000000;
  std::string reddi_variant = "online";
  std::string config_path;
  CLI::App* reddi = app.add_subcommand("reddi", "run an optimizer on the periodic "
                                       "spike problem");
  reddi->add_option("--config", config_path, "JSON run configuration (flags override)");
  reddi->add_option("--variant", reddi_variant, "online | stochastic");
  reddi->add_option("--steps", reddi_cfg.steps, "number of steps");
  reddi->add_option("--seed", reddi_cfg.seed, "RNG seed (stochastic variant)");
  reddi->add_option("--out", reddi_cfg.out, "CSV output path");
  reddi->add_option("--record-every", reddi_cfg.record_every,
                    "record stride (0: steps/10000)");
  reddi->add_option("--x0", reddi_cfg.x0, "starting point");
  reddi->add_option("--big", reddi_cfg.reddi.big, "spike gradient");
  reddi->add_option("--small", reddi_cfg.reddi.small, "opposing gradient magnitude");
  reddi->add_option("--period", reddi_cfg.reddi.period, "steps per period");
  reddi->add_option("--prob", reddi_cfg.reddi.prob, "spike probability (stochastic)");
  reddi->add_option("--phase", reddi_cfg.reddi.phase, "spike step residue mod period");
  add_optimizer_flags(reddi, reddi_cfg.optimizer);

  // train ---------------------------------------------------------------
  TrainConfig train_cfg;
  CLI::App* train = app.add_subcommand("train", "train a small classifier");
  train->add_option("--config", config_path, "JSON train configuration (flags override)");
  train->add_option("--hidden", train_cfg.hidden, "hidden layer sizes")->delimiter(',');
  train->add_option("--arch", train_cfg.arch,
                    "full layer sizes input:hidden...:classes (overrides --hidden)")
      ->delimiter(':');
  train->add_option("--activation", train_cfg.activation, "relu | softplus");
  train->add_option("--epochs", train_cfg.epochs, "training epochs");
  train->add_option("--batch-size", train_cfg.batch_size, "minibatch size");
  train->add_option("--seed", train_cfg.seed, "trial seed (init + shuffling)");
  train->add_option("--record-every", train_cfg.record_every, "record stride in steps");
  train->add_option("--out", train_cfg.out, "CSV output path");
  add_synthetic_flags(train, train_cfg);
  add_optimizer_flags(train, train_cfg.optimizer);

  // momentum-sweep --------------------------------------------------------
  SweepConfig sweep_cfg;
  sweep_cfg.base.synthetic.classes = 10;
  sweep_cfg.base.synthetic.input_dim = 64;
  sweep_cfg.base.synthetic.samples_per_class = 640;
  sweep_cfg.base.synthetic.spread = 0.5;
  sweep_cfg.base.synthetic.seed = 42;
  CLI::App* sweep = app.add_subcommand(
      "momentum-sweep", "compare momentum variants across beta values");
  sweep->add_option("--config", config_path, "JSON train configuration for the base run");
  sweep->add_option("--variant,--variants", sweep_cfg.variants,
                    "momentum variants to compare: inner | bc-inner | bc-outer")
      ->delimiter(',');
  sweep->add_option("--betas", sweep_cfg.betas, "momentum values")->delimiter(',');
  sweep->add_option("--seeds,--trials", sweep_cfg.trials, "seeds per cell");
  sweep->add_option("--threads", sweep_cfg.threads,
                    "worker threads (0: EXPECTIGRAD_THREADS or hardware)");
  sweep->add_option("--hidden", sweep_cfg.base.hidden, "hidden layer sizes")
      ->delimiter(',');
  sweep->add_option("--arch", sweep_cfg.base.arch,
                    "full layer sizes input:hidden...:classes (overrides --hidden)")
      ->delimiter(':');
  sweep->add_option("--activation", sweep_cfg.base.activation, "relu | softplus");
  sweep->add_option("--epochs", sweep_cfg.base.epochs, "training epochs");
  sweep->add_option("--batch-size", sweep_cfg.base.batch_size, "minibatch size");
  sweep->add_option("--seed", sweep_cfg.base.seed, "base seed for trial derivation");
  sweep->add_option("--out", sweep_cfg.base.out, "per-cell CSV output path");
  add_synthetic_flags(sweep, sweep_cfg.base);
  add_optimizer_flags(sweep, sweep_cfg.base.optimizer);

  // gradcheck -------------------------------------------------------------
  GradcheckOptions grad_opt;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare backprop against central finite differences");
  gradcheck->add_option("--trials", grad_opt.trials, "number of random nets");
  gradcheck->add_option("--max-dims", grad_opt.max_dims, "per-layer dim caps")
      ->delimiter(',');
  gradcheck->add_option("--max-batch", grad_opt.max_batch, "batch size cap");
  gradcheck->add_option("--fd-step", grad_opt.h, "central-difference step size");
  gradcheck->add_option("--tol", grad_opt.tol, "max relative error to pass");
  gradcheck->add_option("--seed", grad_opt.seed, "RNG seed");
  gradcheck->add_option("--activation", grad_opt.activation, "relu | softplus");

  // noise -------------------------------------------------------------------
  NoiseOptions noise_opt;
  CLI::App* noise = app.add_subcommand(
      "noise", "estimate gradient noise variance by repeated sampling");
  noise->add_option("--problem", noise_opt.problem, "reddi-stochastic | quadratic");
  noise->add_option("--big", noise_opt.reddi.big, "spike gradient");
  noise->add_option("--small", noise_opt.reddi.small, "opposing gradient magnitude");
  noise->add_option("--prob", noise_opt.reddi.prob, "spike probability");
  noise->add_option("--dim", noise_opt.dim, "quadratic dimension");
  noise->add_option("--noise-halfwidth", noise_opt.noise_halfwidth,
                    "quadratic noise half-width");
  noise->add_option("--batch", noise_opt.batch, "minibatch size per draw");
  noise->add_option("--samples", noise_opt.samples, "number of draws");
  noise->add_option("--seed", noise_opt.seed, "RNG seed");

  // bound ---------------------------------------------------------------------
  double b_L = 1.0, b_sigma2 = 0.0, b_alpha = 1.0, b_epsilon = 1.0, b_gap = 1.0;
  std::int64_t b_b = 1, b_T = 100;
  CLI::App* bound = app.add_subcommand("bound", "evaluate the average-regret bound");
  bound->add_option("--L", b_L, "smoothness / gradient-norm constant");
  bound->add_option("--sigma2", b_sigma2, "gradient noise variance");
  bound->add_option("--b", b_b, "minibatch size");
  bound->add_option("--alpha", b_alpha, "step size");
  bound->add_option("--epsilon", b_epsilon, "denominator damping");
  bound->add_option("--T", b_T, "horizon");
  bound->add_option("--gap", b_gap, "initial suboptimality f(x0) - f*");

  // Load --config before parsing so flags override its fields.
  const std::string config_file = find_config_arg(argc, argv);
  if (!config_file.empty() && argc > 1) {
    const std::string sub = argv[1];
    try {
      const std::string text = read_file(config_file);
      if (sub == "reddi") apply_json(reddi_cfg, text);
      else if (sub == "train") apply_json(train_cfg, text);
      else if (sub == "momentum-sweep") apply_json(sweep_cfg.base, text);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (reddi->parsed()) return run_reddi(reddi_cfg, reddi_variant);
    if (train->parsed()) return run_train(train_cfg);
    if (sweep->parsed()) return run_sweep(sweep_cfg);
    if (gradcheck->parsed()) return run_gradcheck(grad_opt);
    if (noise->parsed()) return run_noise(noise_opt);
    if (bound->parsed()) {
      std::printf("%.12g\n", regret_bound(b_L, b_sigma2, b_b, b_alpha, b_epsilon, b_T, b_gap));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::cout << app.help();
  return 0;
}
