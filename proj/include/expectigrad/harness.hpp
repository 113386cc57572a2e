#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expectigrad/optimizer.hpp"
#include "expectigrad/problems.hpp"
#include "expectigrad/rng.hpp"

namespace expectigrad {

// Quadratic f(x) = 0.5*||x - target||^2 with optional additive gradient
// noise, uniform per component on [-noise_halfwidth, +noise_halfwidth]
// (bounded, variance d*w^2/3 in total).
struct QuadraticSpec {
  std::vector<double> target = {0.0};
  std::vector<double> x0 = {1.0};
  double noise_halfwidth = 0.0;
};

struct RunConfig {
  std::string problem = "reddi-online";  // reddi-online | reddi-stochastic | quadratic
  ReddiSpec reddi;
  QuadraticSpec quadratic;
  double x0 = 0.0;  // starting point for the scalar reddi problems
  OptimizerConfig optimizer;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::int64_t record_every = 0;  // 0 means max(1, steps/10000)
  std::string out;                // CSV path; empty writes nothing
};

// Merge fields present in a JSON object (snake_case, same names as the
// structs) into cfg; absent fields keep their current values, so explicit
// flags applied afterwards win.  Throws std::runtime_error on malformed
// JSON or wrong field types.
void apply_json(RunConfig& cfg, const std::string& json_text);

struct TrajectoryRecord {
  std::int64_t step = 0;
  std::int64_t epoch = 0;        // training runs only
  double loss = 0.0;             // realized loss at the pre-step point
  double error_rate = 0.0;       // training runs only
  double grad_norm_sq = 0.0;     // squared norm of the applied gradient
  double cum_regret = 0.0;       // running sum of grad_norm_sq over *all* steps so far
  std::vector<double> x;         // post-step parameters (small problems only)
  std::vector<double> g;         // applied gradient (small problems only)
};

struct Trajectory {
  bool training = false;  // selects the CSV schema
  std::vector<TrajectoryRecord> records;
  std::int64_t total_steps = 0;
  double final_cum_regret = 0.0;
  // Sum of g_t * (x_{t-1} - comparator) for the scalar online problems: the
  // regret against holding the fixed comparator point.  The gradient-norm
  // sum above is identical for every optimizer on the online problem (the
  // gradient does not depend on x), so optimizer comparisons need this one.
  double comparator_regret = 0.0;
  std::vector<double> final_x;
  bool aborted = false;       // a non-finite loss stops the run early
  std::string abort_reason;
};

// Runs cfg.optimizer on cfg.problem for cfg.steps steps from the configured
// start point.  Records every record_every steps (plus the final step); the
// regret column is accumulated every step regardless of the record stride.
Trajectory run_experiment(const RunConfig& cfg);

// CSV schemas (UTF-8, LF line endings, 17-significant-digit floats):
//   scalar runs:   step,x0,loss,grad_norm_sq,cum_regret
//   training runs: step,epoch,loss,error_rate,grad_norm_sq,cum_regret
void emit_csv(const Trajectory& traj, std::ostream& os);
void emit_csv(const Trajectory& traj, const std::string& path);

struct RegretReport {
  std::int64_t T = 0;
  double cumulative = 0.0;  // sum over steps of ||g_t||^2
  double average = 0.0;     // cumulative / T (0 when T = 0)
};

RegretReport cumulative_regret(const Trajectory& traj);

// Average-regret guarantee for the main optimizer with beta = 0 on an
// L-smooth objective with ||grad f|| <= L, gradient noise variance sigma2,
// minibatch size b, and initial suboptimality gap = f(x0) - f*:
//   (epsilon + L) * ( gap/(alpha*T)
//                   + (2L/(epsilon^2*sqrt(T))) * (L^2 + sigma2/b)
//                   + sigma2/(2*epsilon*b) ).
// Requires alpha <= epsilon/L for the guarantee to hold; violating it only
// warns (stderr) since the formula still evaluates.  Errors: T < 1, b < 1,
// or nonpositive L/alpha/epsilon (sigma2 and gap may be 0).
double regret_bound(double L, double sigma2, std::int64_t b, double alpha,
                    double epsilon, std::int64_t T, double gap);

// One stochastic gradient sample at x, written to g_out.
using GradSampler =
    std::function<void(std::span<const double> x, SplitMix64& rng, std::span<double> g_out)>;

struct NoiseReport {
  double sigma2_hat = 0.0;          // unbiased across-sample variance, 1/(n-1) normalized
  double grad_norm_sq_mean = 0.0;   // mean of ||g_i||^2 over the draws
  std::int64_t samples = 0;
  std::int64_t batch = 0;
};

// Draws `samples` minibatch gradients at fixed x (each the average of
// `batch` sampler calls) and decomposes the second moment:
//   grad_norm_sq_mean  estimates ||grad f(x)||^2 + sigma2/batch,
//   sigma2_hat         estimates sigma2/batch.
// Errors: samples < 2 or batch < 1.
NoiseReport estimate_noise(const GradSampler& sampler, std::span<const double> x,
                           std::int64_t batch, std::int64_t samples, SplitMix64& rng);

}  // namespace expectigrad
