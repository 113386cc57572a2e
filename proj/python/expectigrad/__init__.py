"""Sum-based adaptive gradient optimization, with baselines and a testbed."""

from ._core import (
    Activation,
    BaselineHyperParams,
    BaselineKind,
    BaselineState,
    Batch,
    DatasetSpec,
    ExpectigradState,
    HyperParams,
    MomentumVariant,
    Network,
    OptimizerConfig,
    ReddiSpec,
    RunConfig,
    SplitMix64,
    backward,
    baseline_defaults,
    baseline_init,
    baseline_step,
    derive_seed,
    estimate_reddi_noise,
    expectigrad_init,
    expectigrad_step,
    finite_diff_grad,
    forward,
    load_idx,
    momentum_variant_step,
    period_displacement,
    reddi_online_grad,
    reddi_stochastic_grad,
    regret_bound,
    run_experiment,
    synthesize_dataset,
    trajectory_csv,
)

__all__ = [
    "Activation",
    "BaselineHyperParams",
    "BaselineKind",
    "BaselineState",
    "Batch",
    "DatasetSpec",
    "ExpectigradState",
    "HyperParams",
    "MomentumVariant",
    "Network",
    "OptimizerConfig",
    "ReddiSpec",
    "RunConfig",
    "SplitMix64",
    "backward",
    "baseline_defaults",
    "baseline_init",
    "baseline_step",
    "derive_seed",
    "estimate_reddi_noise",
    "expectigrad_init",
    "expectigrad_step",
    "finite_diff_grad",
    "forward",
    "load_idx",
    "momentum_variant_step",
    "period_displacement",
    "reddi_online_grad",
    "reddi_stochastic_grad",
    "regret_bound",
    "run_experiment",
    "synthesize_dataset",
    "trajectory_csv",
]

__version__ = "1.0.0"
