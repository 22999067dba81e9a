import numpy as np
import pytest
import torch
from numpy.testing import assert_allclose, assert_array_equal

from app.attacks import (
    AttackKind,
    AttackScenario,
    LinearReconstructor,
    best_attack,
    fit_lr,
    fit_mlp,
    fit_pinv,
    leak_by_label,
    reconstruction_accuracy,
    run_attack_condition,
)
from app.errors import AllAttacksFailedError, EmptyEvaluationError, LabelNotPresentError, TooFewLeaksError
from app.evaluation import fit_knn
from app.models.data import AnchorSet
from app.models.experiment import ExperimentConfig, MLPConfig, ObfuscatorKind
from app.obfuscation import apply, fit_pca
from app.pipeline import load_pool
from tests.conftest import small_config_dict


def _scenario(leaked_A, leaked_A_tilde, eval_X=None, eval_X_tilde=None, eval_y=None):
    n = leaked_A.shape[0]
    eval_X = leaked_A[:1] if eval_X is None else eval_X
    eval_X_tilde = leaked_A_tilde[:1] if eval_X_tilde is None else eval_X_tilde
    eval_y = np.zeros(eval_X.shape[0], dtype=int) if eval_y is None else eval_y
    return AttackScenario(
        leaked_indices=np.arange(n),
        leaked_A=leaked_A,
        leaked_A_tilde=leaked_A_tilde,
        eval_indices=np.arange(n, n + eval_X.shape[0]),
        eval_X=eval_X,
        eval_X_tilde=eval_X_tilde,
        eval_y=eval_y,
    )


@pytest.fixture
def orthogonal_leak(rng):
    """Leaks through an invertible orthogonal obfuscation with d_tilde = d"""
    A = rng.standard_normal((30, 4))
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    mean = A.mean(axis=0)
    return A, (A - mean) @ Q


def test_lr_two_point_line():
    reconstructor = fit_lr(_scenario(np.array([[0.0], [2.0]]), np.array([[0.0], [1.0]])))
    assert_allclose(reconstructor.reconstruct(np.array([[3.0]])), [[6.0]])


def test_lr_recovers_leaked_rows_exactly(orthogonal_leak):
    A, A_tilde = orthogonal_leak
    reconstructor = fit_lr(_scenario(A, A_tilde))
    assert_allclose(reconstructor.reconstruct(A_tilde), A, atol=1e-8)
    assert_allclose(reconstructor.reconstruct(A_tilde.mean(axis=0)), A.mean(axis=0)[None, :], atol=1e-12)


def test_pinv_and_lr_agree_for_square_invertible_maps(orthogonal_leak):
    A, A_tilde = orthogonal_leak
    scenario = _scenario(A, A_tilde)
    points = np.random.default_rng(1).standard_normal((10, 4))
    assert_allclose(fit_pinv(scenario).reconstruct(points), fit_lr(scenario).reconstruct(points), atol=1e-8)


def test_pinv_with_identity_forward_map(rng):
    A = rng.standard_normal((12, 3))
    reconstructor = fit_pinv(_scenario(A, A + 5.0))
    x = rng.standard_normal((4, 3))
    assert_allclose(reconstructor.reconstruct(x), x - (A + 5.0).mean(axis=0) + A.mean(axis=0), atol=1e-10)


def test_pinv_recovers_pca_projection(rng):
    f = fit_pca(rng.standard_normal((50, 5)) @ rng.standard_normal((5, 5)), 3)
    A = rng.standard_normal((40, 5))
    reconstructor = fit_pinv(_scenario(A, apply(f, A)))
    error = np.linalg.norm(reconstructor.forward_map - f.projection) / np.linalg.norm(f.projection)
    assert error < 1e-6
    # pinv of orthonormal columns is the transpose: reconstruction equals the PCA reconstruction
    x = rng.standard_normal((6, 5))
    pca_reconstruction = (x - f.mean) @ f.projection @ f.projection.T + f.mean
    shift = A.mean(axis=0) - f.mean - (A.mean(axis=0) - f.mean) @ f.projection @ f.projection.T
    assert_allclose(reconstructor.reconstruct(apply(f, x)), pca_reconstruction + shift, atol=1e-8)


def test_too_few_leaks(rng):
    one = _scenario(np.ones((1, 2)), np.ones((1, 2)))
    with pytest.raises(TooFewLeaksError):
        fit_lr(one)
    with pytest.raises(TooFewLeaksError):
        fit_pinv(one)
    with pytest.raises(TooFewLeaksError):
        fit_mlp(_scenario(rng.standard_normal((5, 2)), rng.standard_normal((5, 2))))


def test_mlp_without_training_is_the_initialization(rng):
    scenario = _scenario(rng.standard_normal((20, 4)), rng.standard_normal((20, 2)))
    reconstructor = fit_mlp(scenario, MLPConfig(max_epochs=0), seed=3)
    again = fit_mlp(scenario, MLPConfig(max_epochs=0), seed=3)
    out = reconstructor.reconstruct(rng.standard_normal((5, 2)))
    assert out.shape == (5, 4) and np.all(np.isfinite(out))
    assert reconstructor.history == [] and reconstructor.epochs_run == 0
    point = np.ones((1, 2))
    assert_array_equal(reconstructor.reconstruct(point), again.reconstruct(point))


def test_mlp_best_validation_loss_never_increases(rng):
    A_tilde = rng.standard_normal((60, 3))
    scenario = _scenario(A_tilde @ rng.standard_normal((3, 5)), A_tilde)
    reconstructor = fit_mlp(scenario, MLPConfig(max_epochs=40), seed=0)
    assert 1 <= len(reconstructor.history) <= 40
    assert np.all(np.diff(reconstructor.history) <= 0)


@pytest.fixture
def two_class_anchor(rng):
    y = np.repeat([0, 1], 10)
    A = rng.standard_normal((20, 3)) + 4.0 * y[:, None]
    return AnchorSet(A=A, y_a=y, source_count=20, neighbor_count=0)


def test_leak_by_label(two_class_anchor):
    A_tilde = two_class_anchor.A[:, :2]
    scenario = leak_by_label(two_class_anchor, {0}, A_tilde)
    assert scenario.n_leaked == 10
    assert_array_equal(scenario.eval_y, np.ones(10))
    assert_array_equal(scenario.leaked_A_tilde, A_tilde[:10])

    sampled = leak_by_label(two_class_anchor, [0], A_tilde, eval_per_label=4, seed=1)
    assert sampled.eval_y.size == 4

    with pytest.raises(EmptyEvaluationError):
        leak_by_label(two_class_anchor, [0, 1], A_tilde)
    with pytest.raises(LabelNotPresentError):
        leak_by_label(two_class_anchor, [7], A_tilde)


def test_reconstruction_accuracy_counts_label_matches(two_class_anchor):
    A, y = two_class_anchor.A, two_class_anchor.y_a
    oracle = fit_knn(A, y, k=1)
    identity = LinearReconstructor(kind=AttackKind.LR, tilde_mean=np.zeros(3), A_mean=np.zeros(3), W=np.eye(3))
    assert reconstruction_accuracy(identity, A, y, oracle) == 1.0

    # a constant reconstruction lands in one class: half of a balanced two-class set
    zero = LinearReconstructor(kind=AttackKind.LR, tilde_mean=np.zeros(3), A_mean=np.zeros(3), W=np.zeros((3, 3)))
    assert reconstruction_accuracy(zero, A, y, oracle) == 0.5

    order = np.random.default_rng(0).permutation(20)
    assert reconstruction_accuracy(zero, A[order], y[order], oracle) == 0.5
    with pytest.raises(EmptyEvaluationError):
        reconstruction_accuracy(identity, np.zeros((0, 3)), np.zeros(0), oracle)


def test_best_attack_prefers_earlier_attack_on_ties(orthogonal_leak):
    A, A_tilde = orthogonal_leak
    y = (A[:, 0] > np.median(A[:, 0])).astype(int)
    # too few leaks for the MLP: it is excluded and LR wins the LR/PINV tie
    scenario = _scenario(A[:8], A_tilde[:8], A[8:], A_tilde[8:], y[8:])
    oracle = fit_knn(A, y, k=1)
    outcome = best_attack(scenario, oracle)
    assert outcome.kind == AttackKind.LR
    assert outcome.scores[AttackKind.MLP] is None
    assert outcome.scores[AttackKind.LR] == outcome.scores[AttackKind.PINV] == outcome.score


def test_best_attack_fails_when_nothing_fits():
    scenario = _scenario(np.ones((1, 2)), np.ones((1, 2)))
    with pytest.raises(AllAttacksFailedError):
        best_attack(scenario, fit_knn(np.zeros((2, 2)), np.array([0, 1])))


def test_attack_condition_reports_every_attack():
    config = ExperimentConfig.model_validate(
        small_config_dict(n_a=60, oracle_size=100, eval_per_label=10, anchor_mode="real")
    )
    row = run_attack_condition(config, ObfuscatorKind.PCA, 3, 0, load_pool(config))
    assert row["best"] in {"LR", "PINV", "MLP"}
    assert set(row) >= {"obfuscator", "d_tilde", "seed", "LR", "PINV", "MLP", "best_score"}
    assert row["n_leaked"] == 20
    assert 0.0 <= row["best_score"] <= 1.0


@pytest.mark.parametrize("n_leaked, expected_steps", [(300, 4), (250, 1)])
def test_mlp_batching_follows_the_leak_count(rng, monkeypatch, n_leaked, expected_steps):
    A_tilde = rng.standard_normal((n_leaked, 3))
    scenario = _scenario(A_tilde @ rng.standard_normal((3, 4)), A_tilde)
    steps = []
    step = torch.optim.Adam.step
    monkeypatch.setattr(torch.optim.Adam, "step", lambda self, *a, **kw: steps.append(1) or step(self, *a, **kw))

    fit_mlp(scenario, MLPConfig(max_epochs=1), seed=0)
    # 300 leaks: 240 training rows in batches of 64; 250 leaks: one full batch
    assert len(steps) == expected_steps
