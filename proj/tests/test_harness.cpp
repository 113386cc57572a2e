#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "expectigrad/harness.hpp"
#include "expectigrad/rng.hpp"

using namespace expectigrad;

namespace {

RunConfig sgd_quadratic(double alpha, std::int64_t steps) {
  RunConfig cfg;
  cfg.problem = "quadratic";
  cfg.quadratic.target = {0.0, 0.0};
  cfg.quadratic.x0 = {1.0, 1.0};
  cfg.optimizer.id = "sgd";
  cfg.optimizer.alpha = alpha;
  cfg.steps = steps;
  return cfg;
}

std::string csv_string(const Trajectory& traj) {
  std::ostringstream os;
  emit_csv(traj, os);
  return os.str();
}

}  // namespace

TEST_CASE("gradient descent on a quadratic follows the closed form") {
  // x_t = (1 - alpha) x_{t-1}; alpha = 0.5 keeps every iterate an exact
  // power of two, so the trajectory can be checked bitwise.
  const Trajectory traj = run_experiment(sgd_quadratic(0.5, 100));
  REQUIRE(traj.total_steps == 100);
  REQUIRE(!traj.aborted);
  const double expect_x = std::pow(0.5, 100.0);
  CHECK(traj.final_x[0] == expect_x);
  CHECK(traj.final_x[1] == expect_x);

  // cum regret = sum_t ||g_t||^2 = 2 * sum_{t=0}^{99} (1/4)^t
  const double expect_regret = (8.0 / 3.0) * (1.0 - std::pow(0.25, 100.0));
  CHECK(traj.final_cum_regret ==
        doctest::Approx(expect_regret).epsilon(1e-12));

  const RegretReport report = cumulative_regret(traj);
  CHECK(report.T == 100);
  CHECK(report.cumulative == traj.final_cum_regret);
  CHECK(report.average == traj.final_cum_regret / 100.0);
}

TEST_CASE("records land on the stride and always include the final step") {
  RunConfig cfg = sgd_quadratic(0.1, 25);
  cfg.record_every = 10;
  const Trajectory traj = run_experiment(cfg);
  std::vector<std::int64_t> steps;
  for (const auto& r : traj.records) steps.push_back(r.step);
  CHECK(steps == std::vector<std::int64_t>{10, 20, 25});

  // the final step is not duplicated when it already sits on the stride
  cfg.steps = 20;
  const Trajectory traj2 = run_experiment(cfg);
  steps.clear();
  for (const auto& r : traj2.records) steps.push_back(r.step);
  CHECK(steps == std::vector<std::int64_t>{10, 20});
}

TEST_CASE("default record stride keeps about ten thousand rows") {
  RunConfig cfg = sgd_quadratic(1e-3, 100000);
  const Trajectory traj = run_experiment(cfg);  // stride = 100000/10000 = 10
  CHECK(traj.records.size() == 10000);
  CHECK(traj.records.front().step == 10);
  CHECK(traj.records.back().step == 100000);

  cfg.steps = 50;  // shorter than 10000 -> record every step
  CHECK(run_experiment(cfg).records.size() == 50);
}

TEST_CASE("zero steps is a valid empty run") {
  const Trajectory traj = run_experiment(sgd_quadratic(0.5, 0));
  CHECK(traj.total_steps == 0);
  CHECK(traj.records.empty());
  CHECK(traj.final_cum_regret == 0.0);
  CHECK(traj.final_x == std::vector<double>{1.0, 1.0});
  const RegretReport report = cumulative_regret(traj);
  CHECK(report.T == 0);
  CHECK(report.average == 0.0);
}

TEST_CASE("comparator regret accumulates g_t * (x_{t-1} - comparator)") {
  RunConfig cfg;
  cfg.problem = "reddi-online";
  cfg.reddi.big = 2.0;
  cfg.reddi.small = 1.0;
  cfg.reddi.period = 2;
  cfg.reddi.comparator = -1.0;
  cfg.optimizer.id = "sgd";
  cfg.optimizer.alpha = 0.1;
  cfg.steps = 4;
  const Trajectory traj = run_experiment(cfg);
  // gradients +2, -1, +2, -1 from x = 0, -0.2, -0.1, -0.3:
  //   2*(0+1) + (-1)*(-0.2+1) + 2*(-0.1+1) + (-1)*(-0.3+1) = 2.3
  CHECK(traj.comparator_regret == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(traj.final_x[0] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(traj.final_cum_regret == 10.0);  // 4 + 1 + 4 + 1
}

TEST_CASE("diverging runs abort with a reason instead of emitting NaNs") {
  // alpha = 4 on the quadratic multiplies x by -3 each step, so the loss
  // overflows to inf after a few hundred steps.
  const Trajectory traj = run_experiment(sgd_quadratic(4.0, 1000));
  CHECK(traj.aborted);
  CHECK(traj.abort_reason.find("non-finite loss at step") != std::string::npos);
  CHECK(traj.total_steps < 1000);
  REQUIRE(!traj.records.empty());
  CHECK(!std::isfinite(traj.records.back().loss));
}

TEST_CASE("run configuration is validated") {
  RunConfig cfg = sgd_quadratic(0.5, 10);
  cfg.problem = "banana";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg = sgd_quadratic(0.5, -1);
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg = sgd_quadratic(0.5, 10);
  cfg.quadratic.x0 = {1.0};  // length 1 vs target length 2
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg = sgd_quadratic(0.5, 10);
  cfg.quadratic.noise_halfwidth = -0.5;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg = sgd_quadratic(0.5, 10);
  cfg.optimizer.id = "nonsense";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("scalar CSV header and float format are pinned") {
  RunConfig cfg;
  cfg.problem = "reddi-online";
  cfg.optimizer.id = "expectigrad";
  cfg.steps = 7;
  const Trajectory traj = run_experiment(cfg);
  const std::string csv = csv_string(traj);

  const std::string header = "step,x0,loss,grad_norm_sq,cum_regret\n";
  REQUIRE(csv.size() > header.size());
  CHECK(csv.substr(0, header.size()) == header);
  CHECK(csv.find('\r') == std::string::npos);

  // every float field round-trips bitwise through %.17g
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::size_t row = 0;
  while (std::getline(in, line)) {
    long long step = 0;
    double x0 = 0, loss = 0, g2 = 0, cr = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf", &step, &x0,
                        &loss, &g2, &cr) == 5);
    REQUIRE(row < traj.records.size());
    const TrajectoryRecord& r = traj.records[row];
    CHECK(step == r.step);
    CHECK(x0 == r.x[0]);
    CHECK(loss == r.loss);
    CHECK(g2 == r.grad_norm_sq);
    CHECK(cr == r.cum_regret);
    ++row;
  }
  CHECK(row == traj.records.size());
}

TEST_CASE("training CSV uses the epoch/error-rate schema") {
  Trajectory traj;
  traj.training = true;
  TrajectoryRecord rec;
  rec.step = 3;
  rec.epoch = 1;
  rec.loss = 0.5;
  rec.error_rate = 0.25;
  rec.grad_norm_sq = 2.0;
  rec.cum_regret = 6.0;
  traj.records.push_back(rec);
  const std::string csv = csv_string(traj);
  CHECK(csv == "step,epoch,loss,error_rate,grad_norm_sq,cum_regret\n"
               "3,1,0.5,0.25,2,6\n");
}

TEST_CASE("identical configurations produce byte-identical CSV output") {
  RunConfig cfg;
  cfg.problem = "quadratic";
  cfg.quadratic.target = {0.3, -0.7};
  cfg.quadratic.x0 = {1.0, 1.0};
  cfg.quadratic.noise_halfwidth = 0.2;
  cfg.optimizer.id = "expectigrad";
  cfg.steps = 200;
  cfg.seed = 99;

  const std::string a = csv_string(run_experiment(cfg));
  const std::string b = csv_string(run_experiment(cfg));
  CHECK(a == b);

  // the file writer emits the same bytes as the stream writer
  const std::string path = "harness_csv_test.csv";
  emit_csv(run_experiment(cfg), path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream file_bytes;
  file_bytes << in.rdbuf();
  CHECK(file_bytes.str() == a);
  std::remove(path.c_str());

  // a different seed changes the noise stream
  cfg.seed = 100;
  CHECK(csv_string(run_experiment(cfg)) != a);
}

TEST_CASE("JSON configs merge field by field") {
  RunConfig cfg;
  apply_json(cfg, R"({
    "problem": "quadratic",
    "steps": 50,
    "seed": 7,
    "record_every": 5,
    "out": "traj.csv",
    "quadratic": {"target": [1.0, 2.0], "x0": [0.0, 0.0], "noise_halfwidth": 0.1},
    "optimizer": {"id": "adam", "alpha": 0.01, "beta2": 0.99}
  })");
  CHECK(cfg.problem == "quadratic");
  CHECK(cfg.steps == 50);
  CHECK(cfg.seed == 7);
  CHECK(cfg.record_every == 5);
  CHECK(cfg.out == "traj.csv");
  CHECK(cfg.quadratic.target == std::vector<double>{1.0, 2.0});
  CHECK(cfg.quadratic.noise_halfwidth == 0.1);
  CHECK(cfg.optimizer.id == "adam");
  CHECK(cfg.optimizer.alpha == 0.01);
  CHECK(cfg.optimizer.beta2 == 0.99);
  // untouched fields keep their values
  CHECK(!OptimizerConfig::is_set(cfg.optimizer.beta1));
  CHECK(!OptimizerConfig::is_set(cfg.optimizer.epsilon));
  CHECK(cfg.reddi.big == 1010.0);

  // a later application (the flag layer) overrides earlier values
  apply_json(cfg, R"({"optimizer": {"alpha": 0.5}})");
  CHECK(cfg.optimizer.alpha == 0.5);
  CHECK(cfg.optimizer.id == "adam");  // still merged, not reset

  apply_json(cfg, R"({"reddi": {"big": 3.0, "period": 5}})");
  CHECK(cfg.reddi.big == 3.0);
  CHECK(cfg.reddi.period == 5);
  CHECK(cfg.reddi.small == 10.0);
}

TEST_CASE("malformed configs raise descriptive errors") {
  RunConfig cfg;
  try {
    apply_json(cfg, "this is not json");
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("config is not valid JSON") !=
          std::string::npos);
  }
  try {
    apply_json(cfg, R"({"steps": "many"})");
    FAIL("expected error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("config field has the wrong type") !=
          std::string::npos);
  }
}

TEST_CASE("the average-regret bound matches a hand-evaluated instance") {
  // (eps+L) * (gap/(alpha T) + (2L/(eps^2 sqrt(T)))(L^2 + s2/b) + s2/(2 eps b))
  // at L=1, s2=0, b=1, alpha=1, eps=1, T=100, gap=1:
  //   2 * (0.01 + 0.2 + 0) = 0.42
  CHECK(regret_bound(1.0, 0.0, 1, 1.0, 1.0, 100, 1.0) ==
        doctest::Approx(0.42).epsilon(1e-12));

  // sigma2 adds both the sqrt(T) term and the floor term
  const double with_noise = regret_bound(1.0, 2.0, 4, 1.0, 1.0, 100, 1.0);
  const double expect = 2.0 * (0.01 + 0.2 * (1.0 + 0.5) + 2.0 / 8.0);
  CHECK(with_noise == doctest::Approx(expect).epsilon(1e-12));

  // the bound shrinks as T grows and as the batch grows
  CHECK(regret_bound(1.0, 2.0, 4, 1.0, 1.0, 10000, 1.0) < with_noise);
  CHECK(regret_bound(1.0, 2.0, 16, 1.0, 1.0, 100, 1.0) < with_noise);
}

TEST_CASE("regret-bound arguments are validated") {
  CHECK_THROWS_AS(regret_bound(0.0, 0.0, 1, 1.0, 1.0, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, -1.0, 1, 1.0, 1.0, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, 0.0, 0, 1.0, 1.0, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, 0.0, 1, 0.0, 1.0, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, 0.0, 1, 1.0, 0.0, 100, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, 0.0, 1, 1.0, 1.0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(regret_bound(1.0, 0.0, 1, 1.0, 1.0, 100, -1.0), std::invalid_argument);
  // alpha > epsilon/L only warns; the value still comes back finite
  CHECK(std::isfinite(regret_bound(1.0, 0.0, 1, 5.0, 1.0, 100, 1.0)));
}

TEST_CASE("noise estimation recovers an exact tiny variance") {
  // deterministic draws 1, 2, 3: mean 2, unbiased variance 1,
  // mean squared norm (1 + 4 + 9)/3
  int calls = 0;
  const GradSampler sampler = [&calls](std::span<const double>, SplitMix64&,
                                       std::span<double> g) {
    static const double seq[] = {1.0, 2.0, 3.0};
    g[0] = seq[calls++];
  };
  const std::vector<double> x = {0.0};
  SplitMix64 rng(0);
  const NoiseReport report = estimate_noise(sampler, x, 1, 3, rng);
  CHECK(report.sigma2_hat == 1.0);
  CHECK(report.grad_norm_sq_mean == doctest::Approx(14.0 / 3.0).epsilon(1e-15));
  CHECK(report.samples == 3);
  CHECK(report.batch == 1);
  CHECK(calls == 3);
}

TEST_CASE("noise estimation matches uniform-noise statistics") {
  // g = true gradient 0.5 plus uniform [0,1) noise shifted to mean zero:
  // variance 1/12 per draw, ||grad||^2 = 0.25.
  const GradSampler sampler = [](std::span<const double>, SplitMix64& rng,
                                 std::span<double> g) {
    g[0] = 0.5 + (rng.next_double() - 0.5);
  };
  const std::vector<double> x = {0.0};
  SplitMix64 rng(2024);
  const NoiseReport one = estimate_noise(sampler, x, 1, 20000, rng);
  CHECK(one.sigma2_hat == doctest::Approx(1.0 / 12.0).epsilon(0.05));
  // E||g||^2 = 0.25 + 1/12
  CHECK(one.grad_norm_sq_mean ==
        doctest::Approx(0.25 + 1.0 / 12.0).epsilon(0.05));

  // averaging a batch of b divides the variance by b
  SplitMix64 rng4(2024);
  const NoiseReport four = estimate_noise(sampler, x, 4, 20000, rng4);
  CHECK(four.sigma2_hat == doctest::Approx(1.0 / 48.0).epsilon(0.1));
}

TEST_CASE("noise estimation rejects degenerate sampling plans") {
  const GradSampler sampler = [](std::span<const double>, SplitMix64&,
                                 std::span<double> g) { g[0] = 0.0; };
  const std::vector<double> x = {0.0};
  SplitMix64 rng(0);
  CHECK_THROWS_AS(estimate_noise(sampler, x, 0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(estimate_noise(sampler, x, 1, 1, rng), std::invalid_argument);
}
