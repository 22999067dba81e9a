import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.anchors import anchor_real_only, generate_anchor, split_anchor_source, stratified_indices
from app.errors import ConfigError, DimensionMismatchError, DivisibilityError, InsufficientSourceError
from app.models.experiment import TaskMode
from app.utils.rng import stream


@pytest.fixture
def source(rng):
    y = np.repeat([0, 1, 2], 4)
    X = rng.standard_normal((12, 3)) + 5.0 * y[:, None]
    return X, y


def test_source_rows_come_first(source):
    X, y = source
    anchor = generate_anchor(X, y, 30, 3, balanced=False, seed=0)
    assert anchor.n_a == 30
    assert_array_equal(anchor.A[:12], X)
    assert_array_equal(anchor.y_a[:12], y)
    assert anchor.source_count == 12 and anchor.neighbor_count == 3


def test_balanced_mode_gives_uniform_histogram(source):
    X, y = source
    anchor = generate_anchor(X, y, 30, 3, balanced=True, seed=1)
    assert_array_equal(np.bincount(anchor.y_a), [10, 10, 10])


def test_generated_rows_stay_inside_their_class_box(source):
    X, y = source
    anchor = generate_anchor(X, y, 60, 3, balanced=True, seed=2)
    for A_row, label in zip(anchor.A[12:], anchor.y_a[12:]):
        members = X[y == label]
        assert np.all(A_row >= members.min(axis=0) - 1e-12)
        assert np.all(A_row <= members.max(axis=0) + 1e-12)


def test_same_seed_same_anchor(source):
    X, y = source
    first = generate_anchor(X, y, 24, 2, balanced=False, seed=5)
    second = generate_anchor(X, y, 24, 2, balanced=False, seed=5)
    assert_array_equal(first.A, second.A)
    assert_array_equal(first.y_a, second.y_a)


def test_no_generation_when_n_a_equals_source(source):
    X, y = source
    anchor = generate_anchor(X, y, 12, 3, balanced=False, seed=0)
    assert_array_equal(anchor.A, X)


def test_anchor_errors(source):
    X, y = source
    with pytest.raises(DivisibilityError):
        generate_anchor(X, y, 31, 3, balanced=True, seed=0)
    with pytest.raises(DimensionMismatchError):
        generate_anchor(X, y, 10, 3, balanced=False, seed=0)
    lonely = np.array([0, 0, 0, 1])
    with pytest.raises(InsufficientSourceError):
        generate_anchor(X[:4], lonely, 8, 2, balanced=True, seed=0)


def test_regression_interpolates_targets(rng):
    X = rng.standard_normal((10, 2))
    y = X[:, 0] * 2.0
    anchor = generate_anchor(X, y, 50, 3, balanced=False, seed=0, task_mode=TaskMode.REGRESSION)
    assert anchor.y_a.shape == (50,)
    assert np.all((anchor.y_a >= y.min() - 1e-12) & (anchor.y_a <= y.max() + 1e-12))
    # features and targets share one u, so the linear relation survives
    assert_allclose(anchor.y_a, anchor.A[:, 0] * 2.0, atol=1e-12)
    with pytest.raises(ConfigError):
        generate_anchor(X, y, 50, 3, balanced=True, seed=0, task_mode=TaskMode.REGRESSION)


def test_real_only_anchor_is_stratified_subset(rng):
    y = np.repeat([0, 1, 2], 10)
    X = rng.standard_normal((30, 2))
    anchor = anchor_real_only(X, y, 12, seed=0)
    assert_array_equal(np.bincount(anchor.y_a), [4, 4, 4])
    assert anchor.neighbor_count == 0
    assert all(any(np.array_equal(row, x) for x in X) for row in anchor.A)
    with pytest.raises(InsufficientSourceError):
        anchor_real_only(X, y, 31, seed=0)


def test_stratified_indices_falls_back_to_proportional_quotas():
    y = np.array([0] * 8 + [1] * 2)
    idx = stratified_indices(y, 5, stream(0, "anchor"), TaskMode.CLASSIFICATION)
    assert np.all(np.diff(idx) > 0)
    assert_array_equal(np.bincount(y[idx], minlength=2), [4, 1])


def test_split_anchor_source_is_disjoint(rng):
    y = np.repeat([0, 1], 20)
    X = np.arange(40, dtype=float)[:, None]
    (rest_X, rest_y), (src_X, src_y) = split_anchor_source(X, y, 10, stream(0, "anchor"))
    assert rest_X.shape[0] == 30 and src_X.shape[0] == 10
    assert not set(rest_X.ravel()) & set(src_X.ravel())
    assert_array_equal(np.bincount(src_y), [5, 5])
