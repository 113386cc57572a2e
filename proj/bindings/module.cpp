// Python bindings for the optimizer library: thin pass-throughs over the C++
// API, with vectors exchanged as Python lists.  Spans in the C++ signatures
// are bridged through value copies, which is fine at testbed sizes.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "expectigrad/baselines.hpp"
#include "expectigrad/dataset.hpp"
#include "expectigrad/expectigrad.hpp"
#include "expectigrad/harness.hpp"
#include "expectigrad/idx.hpp"
#include "expectigrad/network.hpp"
#include "expectigrad/optimizer.hpp"
#include "expectigrad/problems.hpp"
#include "expectigrad/rng.hpp"
#include "expectigrad/train.hpp"

namespace py = pybind11;
using namespace expectigrad;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sum-based adaptive gradient optimization: core routines";

  // --- random numbers ---
  py::class_<SplitMix64>(m, "SplitMix64")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &SplitMix64::next_u64)
      .def("next_double", &SplitMix64::next_double)
      .def("next_double_pos", &SplitMix64::next_double_pos)
      .def("next_uniform", &SplitMix64::next_uniform, py::arg("lo"), py::arg("hi"))
      .def("next_normal", &SplitMix64::next_normal);
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("index"));

  // --- main optimizer ---
  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("alpha", &HyperParams::alpha)
      .def_readwrite("beta", &HyperParams::beta)
      .def_readwrite("epsilon", &HyperParams::epsilon);

  py::class_<ExpectigradState>(m, "ExpectigradState")
      .def(py::init<>())
      .def_readwrite("sum_sq", &ExpectigradState::sum_sq)
      .def_readwrite("nonzero_count", &ExpectigradState::nonzero_count)
      .def_readwrite("momentum", &ExpectigradState::momentum)
      .def_readwrite("step", &ExpectigradState::step)
      .def_readwrite("beta_pow", &ExpectigradState::beta_pow)
      .def("dim", &ExpectigradState::dim);

  py::enum_<MomentumVariant>(m, "MomentumVariant")
      .value("Inner", MomentumVariant::Inner)
      .value("BiasCorrectedInner", MomentumVariant::BiasCorrectedInner)
      .value("BiasCorrectedOuter", MomentumVariant::BiasCorrectedOuter);

  py::class_<StepResult>(m, "StepResult")
      .def_readonly("delta", &StepResult::delta)
      .def_readonly("state", &StepResult::state);

  m.def(
      "expectigrad_init",
      [](std::size_t dim, const HyperParams& hp) { return expectigrad_init(dim, hp); },
      py::arg("dim"), py::arg("hp") = HyperParams{});
  m.def(
      "expectigrad_step",
      [](const ExpectigradState& st, const std::vector<double>& g, const HyperParams& hp) {
        return expectigrad_step(st, g, hp);
      },
      py::arg("state"), py::arg("grad"), py::arg("hp") = HyperParams{});
  m.def(
      "momentum_variant_step",
      [](const ExpectigradState& st, const std::vector<double>& g, const HyperParams& hp,
         MomentumVariant variant) { return momentum_variant_step(st, g, hp, variant); },
      py::arg("state"), py::arg("grad"), py::arg("hp"), py::arg("variant"));

  // --- baselines ---
  py::enum_<BaselineKind>(m, "BaselineKind")
      .value("SGD", BaselineKind::SGD)
      .value("SGDMomentum", BaselineKind::SGDMomentum)
      .value("AdaGrad", BaselineKind::AdaGrad)
      .value("RMSProp", BaselineKind::RMSProp)
      .value("AdaDelta", BaselineKind::AdaDelta)
      .value("Adam", BaselineKind::Adam)
      .value("AMSGrad", BaselineKind::AMSGrad)
      .value("Yogi", BaselineKind::Yogi);

  py::class_<BaselineHyperParams>(m, "BaselineHyperParams")
      .def(py::init<>())
      .def_readwrite("alpha", &BaselineHyperParams::alpha)
      .def_readwrite("beta1", &BaselineHyperParams::beta1)
      .def_readwrite("beta2", &BaselineHyperParams::beta2)
      .def_readwrite("epsilon", &BaselineHyperParams::epsilon)
      .def_readwrite("rho", &BaselineHyperParams::rho)
      .def_readwrite("mu", &BaselineHyperParams::mu);

  py::class_<BaselineState>(m, "BaselineState")
      .def(py::init<>())
      .def_readwrite("kind", &BaselineState::kind)
      .def_readwrite("first_moment", &BaselineState::first_moment)
      .def_readwrite("second_moment", &BaselineState::second_moment)
      .def_readwrite("max_second_moment", &BaselineState::max_second_moment)
      .def_readwrite("accum_delta", &BaselineState::accum_delta)
      .def_readwrite("step", &BaselineState::step)
      .def("dim", &BaselineState::dim);

  py::class_<BaselineStepResult>(m, "BaselineStepResult")
      .def_readonly("delta", &BaselineStepResult::delta)
      .def_readonly("state", &BaselineStepResult::state);

  m.def("baseline_defaults", &baseline_defaults, py::arg("kind"));
  m.def("baseline_init", &baseline_init, py::arg("kind"), py::arg("dim"), py::arg("hp"));
  m.def(
      "baseline_step",
      [](const BaselineState& st, const std::vector<double>& g,
         const BaselineHyperParams& hp) { return baseline_step(st, g, hp); },
      py::arg("state"), py::arg("grad"), py::arg("hp"));

  // --- testbed problems ---
  py::class_<ReddiSpec>(m, "ReddiSpec")
      .def(py::init<>())
      .def_readwrite("big", &ReddiSpec::big)
      .def_readwrite("small", &ReddiSpec::small)
      .def_readwrite("period", &ReddiSpec::period)
      .def_readwrite("prob", &ReddiSpec::prob)
      .def_readwrite("phase", &ReddiSpec::phase)
      .def_readwrite("comparator", &ReddiSpec::comparator);

  m.def("reddi_online_grad", &reddi_online_grad, py::arg("t"), py::arg("spec"));
  m.def("reddi_stochastic_grad", &reddi_stochastic_grad, py::arg("rng"), py::arg("spec"));
  m.def("period_displacement", &period_displacement, py::arg("hp"), py::arg("spec"),
        py::arg("warmup"), py::arg("measured"));

  // --- networks ---
  py::enum_<Activation>(m, "Activation")
      .value("ReLU", Activation::ReLU)
      .value("Softplus", Activation::Softplus);

  py::class_<Batch>(m, "Batch")
      .def(py::init<>())
      .def_readwrite("rows", &Batch::rows)
      .def_readwrite("cols", &Batch::cols)
      .def_readwrite("inputs", &Batch::inputs)
      .def_readwrite("labels", &Batch::labels);

  py::class_<Network>(m, "Network")
      .def_readwrite("dims", &Network::dims)
      .def_readwrite("act", &Network::act)
      .def_readwrite("params", &Network::params)
      .def("param_count", &Network::param_count)
      .def_static("init", &Network::init, py::arg("dims"), py::arg("act"),
                  py::arg("seed"));

  py::class_<ForwardResult>(m, "ForwardResult")
      .def_readonly("loss", &ForwardResult::loss)
      .def_readonly("error_rate", &ForwardResult::error_rate)
      .def_readonly("logits", &ForwardResult::logits);

  py::class_<GradResult>(m, "GradResult")
      .def_readonly("loss", &GradResult::loss)
      .def_readonly("error_rate", &GradResult::error_rate)
      .def_readonly("grad", &GradResult::grad);

  m.def("forward", &forward, py::arg("net"), py::arg("batch"));
  m.def("backward", &backward, py::arg("net"), py::arg("batch"));
  m.def("finite_diff_grad", &finite_diff_grad, py::arg("net"), py::arg("batch"),
        py::arg("h"));

  // --- datasets ---
  py::class_<DatasetSpec>(m, "DatasetSpec")
      .def(py::init<>())
      .def_readwrite("classes", &DatasetSpec::classes)
      .def_readwrite("input_dim", &DatasetSpec::input_dim)
      .def_readwrite("samples_per_class", &DatasetSpec::samples_per_class)
      .def_readwrite("spread", &DatasetSpec::spread)
      .def_readwrite("seed", &DatasetSpec::seed);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("rows", &Dataset::rows)
      .def_readonly("cols", &Dataset::cols)
      .def_readonly("classes", &Dataset::classes)
      .def_readonly("inputs", &Dataset::inputs)
      .def_readonly("labels", &Dataset::labels)
      .def("full_batch", &Dataset::full_batch);

  m.def("synthesize_dataset", &synthesize_dataset, py::arg("spec"));

  py::class_<IdxData>(m, "IdxData")
      .def_readonly("dims", &IdxData::dims)
      .def_readonly("data", &IdxData::data);
  m.def("load_idx", &load_idx, py::arg("path"));
  m.def("mnist_dataset", &mnist_dataset, py::arg("images_path"), py::arg("labels_path"));

  // --- harness ---
  py::class_<QuadraticSpec>(m, "QuadraticSpec")
      .def(py::init<>())
      .def_readwrite("target", &QuadraticSpec::target)
      .def_readwrite("x0", &QuadraticSpec::x0)
      .def_readwrite("noise_halfwidth", &QuadraticSpec::noise_halfwidth);

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init<>())
      .def_readwrite("id", &OptimizerConfig::id)
      .def_readwrite("alpha", &OptimizerConfig::alpha)
      .def_readwrite("beta", &OptimizerConfig::beta)
      .def_readwrite("beta1", &OptimizerConfig::beta1)
      .def_readwrite("beta2", &OptimizerConfig::beta2)
      .def_readwrite("epsilon", &OptimizerConfig::epsilon)
      .def_readwrite("rho", &OptimizerConfig::rho)
      .def_readwrite("mu", &OptimizerConfig::mu);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("problem", &RunConfig::problem)
      .def_readwrite("reddi", &RunConfig::reddi)
      .def_readwrite("quadratic", &RunConfig::quadratic)
      .def_readwrite("x0", &RunConfig::x0)
      .def_readwrite("optimizer", &RunConfig::optimizer)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("record_every", &RunConfig::record_every)
      .def_readwrite("out", &RunConfig::out);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("step", &TrajectoryRecord::step)
      .def_readonly("epoch", &TrajectoryRecord::epoch)
      .def_readonly("loss", &TrajectoryRecord::loss)
      .def_readonly("error_rate", &TrajectoryRecord::error_rate)
      .def_readonly("grad_norm_sq", &TrajectoryRecord::grad_norm_sq)
      .def_readonly("cum_regret", &TrajectoryRecord::cum_regret)
      .def_readonly("x", &TrajectoryRecord::x)
      .def_readonly("g", &TrajectoryRecord::g);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("training", &Trajectory::training)
      .def_readonly("records", &Trajectory::records)
      .def_readonly("total_steps", &Trajectory::total_steps)
      .def_readonly("final_cum_regret", &Trajectory::final_cum_regret)
      .def_readonly("comparator_regret", &Trajectory::comparator_regret)
      .def_readonly("final_x", &Trajectory::final_x)
      .def_readonly("aborted", &Trajectory::aborted)
      .def_readonly("abort_reason", &Trajectory::abort_reason);

  m.def("run_experiment", &run_experiment, py::arg("config"));
  m.def(
      "trajectory_csv",
      [](const Trajectory& traj) {
        std::ostringstream os;
        emit_csv(traj, os);
        return os.str();
      },
      py::arg("trajectory"));
  m.def("regret_bound", &regret_bound, py::arg("L"), py::arg("sigma2"), py::arg("b"),
        py::arg("alpha"), py::arg("epsilon"), py::arg("T"), py::arg("gap"));
  m.def(
      "estimate_reddi_noise",
      [](const ReddiSpec& spec, std::int64_t batch, std::int64_t samples,
         std::uint64_t seed) {
        const GradSampler sampler = [&spec](std::span<const double>, SplitMix64& rng,
                                            std::span<double> g) {
          g[0] = reddi_stochastic_grad(rng, spec);
        };
        const std::vector<double> x = {0.0};
        SplitMix64 rng(seed);
        return estimate_noise(sampler, x, batch, samples, rng);
      },
      py::arg("spec"), py::arg("batch"), py::arg("samples"), py::arg("seed"));

  py::class_<NoiseReport>(m, "NoiseReport")
      .def_readonly("sigma2_hat", &NoiseReport::sigma2_hat)
      .def_readonly("grad_norm_sq_mean", &NoiseReport::grad_norm_sq_mean)
      .def_readonly("samples", &NoiseReport::samples)
      .def_readonly("batch", &NoiseReport::batch);
}
