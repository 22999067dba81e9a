import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.errors import ConfigError, InsufficientPoolError, MissingLabelError
from app.models.experiment import (
    ExperimentConfig,
    ExperimentSummary,
    FeatureScaling,
    Method,
    MethodSummary,
    TaskMode,
)
from app.pipeline import (
    bench_scaling,
    fit_integration,
    load_pool,
    loglog_slope,
    make_synthetic,
    partition,
    prepare_trial,
    run_experiment,
    run_trial,
    scale_features,
    split_trial_pool,
)
from tests.conftest import small_config_dict


def test_synthetic_data_is_deterministic_and_balanced():
    X, y = make_synthetic(90, d=5, n_classes=3, seed=4)
    X2, y2 = make_synthetic(90, d=5, n_classes=3, seed=4)
    assert X.shape == (90, 5)
    assert_array_equal(X, X2)
    assert_array_equal(np.bincount(y), [30, 30, 30])
    assert np.all(np.abs(X) <= 1.0)


def test_synthetic_regression_targets_are_real():
    X, y = make_synthetic(50, d=4, seed=0, task_mode=TaskMode.REGRESSION)
    assert y.dtype.kind == "f" and X.shape == (50, 4)


def test_partition_is_disjoint_and_deterministic(rng):
    X = np.arange(100, dtype=float)[:, None]
    y = np.arange(100)
    parties, (test_X, _) = partition(X, y, 3, 20, 25, seed=1)
    again, _ = partition(X, y, 3, 20, 25, seed=1)

    train_rows = np.concatenate([p.X.ravel() for p in parties])
    assert train_rows.size == 60 and np.unique(train_rows).size == 60
    assert not set(train_rows) & set(test_X.ravel())
    assert test_X.shape[0] == 25
    for p, q in zip(parties, again):
        assert_array_equal(p.X, q.X)
    assert [p.party_id for p in parties] == [0, 1, 2]


def test_partition_single_party_and_small_pool():
    X, y = np.zeros((30, 2)), np.zeros(30)
    parties, _ = partition(X, y, 1, 10, 5, seed=0)
    assert len(parties) == 1 and parties[0].n == 10
    with pytest.raises(InsufficientPoolError):
        partition(X, y, 2, 10, 11, seed=0)


def test_minmax_scaling_maps_columns_to_unit_interval(rng):
    X = rng.standard_normal((20, 3)) * 5
    X[:, 2] = 7.0
    scaled = scale_features(X, FeatureScaling.MINMAX)
    assert_allclose(scaled[:, :2].min(axis=0), [0.0, 0.0])
    assert_allclose(scaled[:, :2].max(axis=0), [1.0, 1.0])
    assert_allclose(scaled[:, 2], 0.0)


def test_regression_pool_standardizes_targets():
    config = ExperimentConfig.model_validate(small_config_dict(task_mode="regression"))
    pool = load_pool(config)
    assert_allclose(pool.y.mean(), 0.0, atol=1e-12)
    assert_allclose(pool.y.std(), 1.0)
    assert pool.y_scale > 0


def test_run_experiment_over_every_method(all_methods):
    config = ExperimentConfig.model_validate(small_config_dict(methods=[m.value for m in all_methods], n_seed=2))
    summary = run_experiment(config)

    assert len(summary.trials) == 2 * len(all_methods)
    assert [s.method for s in summary.methods] == all_methods
    for trial in summary.trials:
        assert all(0.0 <= v <= 1.0 for v in trial.per_party)
        expected_parties = 1 if trial.method == Method.CENTRAL else config.K
        assert len(trial.per_party) == expected_parties
    for s in summary.methods:
        trial_means = [t.mean for t in summary.trials if t.method == s.method]
        assert_allclose(s.mean, np.mean(trial_means), atol=1e-12)
        assert s.n_trials == 2 and not s.degenerate
    assert summary.for_method(Method.LOCAL).fit_ms_mean == 0.0


def test_run_experiment_is_deterministic(small_config):
    first = run_experiment(small_config)
    second = run_experiment(small_config)
    assert [t.per_party for t in first.trials] == [t.per_party for t in second.trials]
    assert first.for_method(Method.NKI).degenerate


def test_parallel_trials_match_sequential():
    sequential = run_experiment(ExperimentConfig.model_validate(small_config_dict(n_seed=3)))
    parallel = run_experiment(ExperimentConfig.model_validate(small_config_dict(n_seed=3, jobs=3)))
    assert [(t.method, t.seed, t.per_party) for t in sequential.trials] == [
        (t.method, t.seed, t.per_party) for t in parallel.trials
    ]


def test_timings_come_from_the_injected_clock(small_config):
    ticks = itertools.count()
    summary = run_experiment(small_config, clock=lambda: next(ticks) * 0.002)
    nki = summary.for_method(Method.NKI)
    assert_allclose(nki.fit_ms_mean, 2.0)
    assert_allclose(nki.transform_ms_mean, 2.0)


def test_regression_run_reports_rmse():
    config = ExperimentConfig.model_validate(
        small_config_dict(task_mode="regression", methods=["Local", "NKI", "NKI_TSL", "NKI_TDL"])
    )
    summary = run_experiment(config)
    assert all(s.metric == "rmse" and s.mean > 0 for s in summary.methods)


def test_run_trial_composes_prepare_and_evaluate(small_config):
    pool = load_pool(small_config)
    rest, source = split_trial_pool(small_config, pool, 0)
    ctx = prepare_trial(small_config, rest, source, 0)
    assert ctx.anchor.n_a == small_config.n_a
    assert [A.shape for A in ctx.anchors_tilde] == [(40, 3)] * small_config.K
    result = run_trial(small_config, rest, source, Method.LKI, 0)
    assert result.method == Method.LKI and result.seed == 0


def test_label_graph_methods_fail_fast_without_anchor_labels(party_anchors, small_config):
    with pytest.raises(MissingLabelError):
        fit_integration(Method.NKI_TSL, party_anchors, None, small_config)
    with pytest.raises(ValueError):
        fit_integration(Method.LOCAL, party_anchors, None, small_config)


def test_loglog_slope():
    assert_allclose(loglog_slope(200, 8.0, 400, 64.0), 3.0)
    assert loglog_slope(200, 5.0, 800, 5.0) == 0.0


def _fake_summary(config):
    n = config.n_a
    methods = [
        MethodSummary(
            method=Method.NKI,
            metric="accuracy",
            n_trials=1,
            mean=0.5,
            ci=0.0,
            degenerate=True,
            fit_ms_mean=2.0 * (n / 100) ** 3,
            fit_ms_ci=0.0,
            transform_ms_mean=4.0,
            transform_ms_ci=0.0,
        )
    ]
    return ExperimentSummary(config_hash=config.config_hash(), methods=methods, trials=[])


def test_bench_scaling_slopes(small_config):
    rows = bench_scaling(small_config, [200, 400, 800], methods=[Method.NKI], measure=_fake_summary)
    assert [r.n_a for r in rows] == [200, 400, 800]
    assert rows[0].fit_slope is None
    assert_allclose(rows[-1].fit_slope, 3.0, atol=1e-6)
    assert_allclose(rows[-1].transform_slope, 0.0, atol=1e-12)


def test_bench_scaling_needs_ascending_sizes(small_config):
    with pytest.raises(ConfigError):
        bench_scaling(small_config, [400, 200], measure=_fake_summary)
    with pytest.raises(ConfigError):
        bench_scaling(small_config, [200], measure=_fake_summary)
