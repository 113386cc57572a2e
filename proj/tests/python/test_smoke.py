"""Smoke tests for the python bindings: every exported surface gets touched
once, with values cross-checked against the C++ test suite's expectations."""

import math

import pytest

import expectigrad as eg


def test_version():
    assert eg.__version__ == "1.0.0"


def test_first_step_matches_the_update_rule():
    hp = eg.HyperParams()
    assert (hp.alpha, hp.beta, hp.epsilon) == (1e-3, 0.9, 1e-8)
    state = eg.expectigrad_init(1, hp)
    res = eg.expectigrad_step(state, [3.0], hp)
    # m1 = 0.1 * 3/(eps+3), delta = -(alpha/(1-beta)) * m1
    expected = -(1e-3 / (1.0 - 0.9)) * 0.1 * (3.0 / (1e-8 + 3.0))
    assert res.delta[0] == pytest.approx(expected, rel=1e-12)
    assert res.state.step == 1
    assert res.state.nonzero_count == [1]
    assert res.state.sum_sq == [9.0]


def test_zero_gradients_leave_the_counters_alone():
    state = eg.expectigrad_init(2)
    res = eg.expectigrad_step(state, [0.0, 5.0])
    assert res.state.nonzero_count == [0, 1]
    assert res.delta[0] == 0.0


def test_momentum_variants_agree_at_beta_zero():
    hp = eg.HyperParams()
    hp.beta = 0.0
    state = eg.expectigrad_init(1, hp)
    grads = [1.5]
    outer = eg.momentum_variant_step(state, grads, hp, eg.MomentumVariant.BiasCorrectedOuter)
    inner = eg.momentum_variant_step(state, grads, hp, eg.MomentumVariant.Inner)
    assert outer.delta[0] == inner.delta[0]


def test_baseline_step_runs_each_kind():
    for kind in (eg.BaselineKind.SGD, eg.BaselineKind.Adam, eg.BaselineKind.Yogi):
        hp = eg.baseline_defaults(kind)
        state = eg.baseline_init(kind, 1, hp)
        res = eg.baseline_step(state, [2.0], hp)
        assert math.isfinite(res.delta[0])
        assert res.delta[0] < 0.0
    sgd = eg.baseline_step(
        eg.baseline_init(eg.BaselineKind.SGD, 1, eg.baseline_defaults(eg.BaselineKind.SGD)),
        [2.0],
        eg.baseline_defaults(eg.BaselineKind.SGD),
    )
    assert sgd.delta[0] == -1e-3 * 2.0


def test_regret_bound_example():
    assert eg.regret_bound(L=1, sigma2=0, b=1, alpha=1, epsilon=1, T=100, gap=1) == (
        pytest.approx(0.42, rel=1e-12)
    )
    with pytest.raises(Exception):
        eg.regret_bound(L=0, sigma2=0, b=1, alpha=1, epsilon=1, T=100, gap=1)


def test_reddi_gradients():
    spec = eg.ReddiSpec()
    assert eg.reddi_online_grad(1, spec) == 1010.0
    assert eg.reddi_online_grad(2, spec) == -10.0
    rng = eg.SplitMix64(9)
    draws = {eg.reddi_stochastic_grad(rng, spec) for _ in range(2000)}
    assert draws == {1010.0, -10.0}


def test_period_displacement_is_negative():
    spec = eg.ReddiSpec()
    spec.big = 4.0
    spec.small = 1.0
    spec.period = 3
    hp = eg.HyperParams()
    hp.beta = 0.0
    disp = eg.period_displacement(hp, spec, 20, 30)
    assert len(disp) == 30
    assert all(d < 0.0 for d in disp)


def test_run_experiment_and_csv():
    cfg = eg.RunConfig()
    cfg.problem = "reddi-online"
    cfg.optimizer.id = "sgd"
    cfg.optimizer.alpha = 0.01
    cfg.reddi.big = 2.0
    cfg.reddi.small = 1.0
    cfg.reddi.period = 2
    cfg.steps = 50
    traj = eg.run_experiment(cfg)
    assert traj.total_steps == 50
    assert traj.final_x[0] == pytest.approx(-0.25, rel=1e-12)
    csv = eg.trajectory_csv(traj)
    lines = csv.splitlines()
    assert lines[0] == "step,x0,loss,grad_norm_sq,cum_regret"
    assert len(lines) == 51
    # determinism: same config, same bytes
    assert eg.trajectory_csv(eg.run_experiment(cfg)) == csv


def test_gradcheck_tiny_network():
    net = eg.Network.init([3, 5, 2], eg.Activation.Softplus, seed=4)
    rng = eg.SplitMix64(11)
    batch = eg.Batch()
    batch.rows = 4
    batch.cols = 3
    batch.inputs = [rng.next_uniform(-1.0, 1.0) for _ in range(12)]
    batch.labels = [0, 1, 1, 0]
    analytic = eg.backward(net, batch).grad
    fd = eg.finite_diff_grad(net, batch, 1e-5)
    scale = max(max(abs(v) for v in fd), 1e-12)
    worst = max(abs(a - f) for a, f in zip(analytic, fd)) / scale
    assert worst <= 1e-6


def test_forward_loss_matches_uniform_prediction():
    net = eg.Network.init([4, 3], eg.Activation.ReLU, seed=0)
    net.params = [0.0] * net.param_count()
    batch = eg.Batch()
    batch.rows = 2
    batch.cols = 4
    batch.inputs = [0.5] * 8
    batch.labels = [0, 2]
    res = eg.forward(net, batch)
    assert res.loss == pytest.approx(math.log(3.0), rel=1e-12)


def test_synthetic_dataset_shape():
    spec = eg.DatasetSpec()
    spec.classes = 3
    spec.input_dim = 5
    spec.samples_per_class = 7
    spec.seed = 2
    data = eg.synthesize_dataset(spec)
    assert (data.rows, data.cols, data.classes) == (21, 5, 3)
    assert len(data.inputs) == 21 * 5
    assert sorted(set(data.labels)) == [0, 1, 2]
    batch = data.full_batch()
    assert batch.rows == 21


def test_estimate_reddi_noise():
    spec = eg.ReddiSpec()
    report = eg.estimate_reddi_noise(spec, batch=1, samples=20000, seed=6)
    analytic = 0.01 * 0.99 * (1010.0 + 10.0) ** 2
    assert report.sigma2_hat == pytest.approx(analytic, rel=0.15)
    assert report.samples == 20000


def test_load_idx_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.idx"
    bad.write_bytes(b"\xff\xff\x08\x01" + b"\x00" * 8)
    with pytest.raises(Exception):
        eg.load_idx(str(bad))
    missing = tmp_path / "missing.idx"
    with pytest.raises(Exception):
        eg.load_idx(str(missing))


def test_derive_seed_is_pure_and_distinct():
    seeds = {eg.derive_seed(0, i) for i in range(100)}
    assert len(seeds) == 100
    assert eg.derive_seed(0, 3) == eg.derive_seed(0, 3)
