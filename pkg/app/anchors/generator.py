from typing import List, Tuple
import logging

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ConfigError, DimensionMismatchError, DivisibilityError, InsufficientSourceError
from ..models.data import AnchorSet
from ..models.experiment import TaskMode
from ..utils.rng import stream

logger = logging.getLogger(__name__)


def _nearest_within(X: np.ndarray, k: int) -> np.ndarray:
    """Indices of each row's k nearest other rows (Euclidean, ties -> lower index)"""
    D = cdist(X, X, "sqeuclidean")
    np.fill_diagonal(D, np.inf)
    return np.argsort(D, axis=1, kind="stable")[:, :k]


def _interpolate(
    X: np.ndarray,
    members: np.ndarray,
    count: int,
    k_nn: int,
    rng: np.random.Generator,
    y: np.ndarray = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw `count` SMOTE rows x_b + u (x_nb - x_b) among `members`"""
    neighbors = _nearest_within(X[members], min(k_nn, members.size - 1))
    bases = rng.integers(members.size, size=count)
    picks = rng.integers(neighbors.shape[1], size=count)
    u = rng.random(count)

    base_rows = X[members[bases]]
    neighbor_rows = X[members[neighbors[bases, picks]]]
    generated = base_rows + u[:, None] * (neighbor_rows - base_rows)
    if y is None:
        return generated, None
    y_base = y[members[bases]]
    y_neighbor = y[members[neighbors[bases, picks]]]
    return generated, y_base + u * (y_neighbor - y_base)


def generate_anchor(
    source_X: np.ndarray,
    source_y: np.ndarray,
    n_a: int,
    k_nn: int,
    balanced: bool,
    seed: int,
    task_mode: TaskMode = TaskMode.CLASSIFICATION,
) -> AnchorSet:
    """
    Build the anchor set from real source rows augmented by SMOTE.

    The first n_s rows are the source rows themselves. Generated rows
    interpolate between a source row and one of its k_nn nearest source
    neighbors with the same label (any neighbor in regression mode), with one
    u ~ U[0, 1) per generated row. Generated rows inherit the base row's label;
    in regression mode the target is interpolated with the same u.
    """
    source_X = np.asarray(source_X, dtype=float)
    source_y = np.asarray(source_y)
    n_s = source_X.shape[0]
    if n_a < n_s:
        raise DimensionMismatchError(f"n_a={n_a} is smaller than the {n_s} source rows")
    if k_nn < 1:
        raise ValueError(f"k_nn must be at least 1, got {k_nn}")

    rng = stream(seed, "anchor", purpose="smote")
    n_generate = n_a - n_s
    blocks_X: List[np.ndarray] = [source_X]
    blocks_y: List[np.ndarray] = [source_y]

    if task_mode == TaskMode.REGRESSION:
        if balanced:
            raise ConfigError("Class-balanced anchors require classification labels")
        if n_generate and n_s < 2:
            raise InsufficientSourceError("SMOTE needs at least 2 source rows")
        if n_generate:
            gen_X, gen_y = _interpolate(
                source_X, np.arange(n_s), n_generate, k_nn, rng, y=source_y.astype(float)
            )
            blocks_X.append(gen_X)
            blocks_y.append(gen_y)
    else:
        classes, counts = np.unique(source_y, return_counts=True)
        if balanced:
            if n_a % classes.size:
                raise DivisibilityError(f"n_a={n_a} is not divisible by {classes.size} classes")
            quota = n_a // classes.size
            needs = quota - counts
            if np.any(needs < 0):
                raise DivisibilityError(
                    f"A class has more than its balanced share of {quota} source rows"
                )
        else:
            # Base rows are drawn uniformly over all sources; per-class counts follow
            needs = np.bincount(
                np.searchsorted(classes, source_y[rng.integers(n_s, size=n_generate)]),
                minlength=classes.size,
            )

        for label, count, need in zip(classes, counts, needs):
            if need == 0:
                continue
            if count < 2:
                raise InsufficientSourceError(
                    f"Class {label} has {count} source row(s); SMOTE needs at least 2"
                )
            members = np.flatnonzero(source_y == label)
            gen_X, _ = _interpolate(source_X, members, int(need), k_nn, rng)
            blocks_X.append(gen_X)
            blocks_y.append(np.full(int(need), label, dtype=source_y.dtype))

    A = np.vstack(blocks_X)
    y_a = np.concatenate(blocks_y)
    logger.debug(f"Generated anchor set: {n_s} source rows + {n_generate} SMOTE rows")
    return AnchorSet(A=A, y_a=y_a, source_count=n_s, neighbor_count=k_nn)


def stratified_indices(y: np.ndarray, n: int, rng: np.random.Generator, task_mode: TaskMode) -> np.ndarray:
    """
    Sorted indices of a class-stratified subsample without replacement.

    Equal per-class quotas when n divides evenly and every class can supply
    its share; otherwise quotas proportional to class sizes (largest
    remainder). Regression targets are sampled uniformly.
    """
    y = np.asarray(y)
    total = y.shape[0]
    if n > total:
        raise InsufficientSourceError(f"Requested {n} rows from a source of {total}")
    if task_mode == TaskMode.REGRESSION:
        return np.sort(rng.choice(total, size=n, replace=False))

    classes, counts = np.unique(y, return_counts=True)
    if n % classes.size == 0 and np.all(counts >= n // classes.size):
        quotas = np.full(classes.size, n // classes.size)
    else:
        raw = counts * n / total
        quotas = np.floor(raw).astype(int)
        remainder = n - quotas.sum()
        order = np.argsort(-(raw - quotas), kind="stable")
        quotas[order[:remainder]] += 1

    picked = [
        rng.choice(np.flatnonzero(y == label), size=int(quota), replace=False)
        for label, quota in zip(classes, quotas)
        if quota > 0
    ]
    return np.sort(np.concatenate(picked)) if picked else np.zeros(0, dtype=int)


def anchor_real_only(
    source_X: np.ndarray,
    source_y: np.ndarray,
    n_a: int,
    seed: int,
    task_mode: TaskMode = TaskMode.CLASSIFICATION,
) -> AnchorSet:
    """Real-data anchors only: a stratified subsample of the source rows"""
    source_X = np.asarray(source_X, dtype=float)
    if source_X.shape[0] < n_a:
        raise InsufficientSourceError(f"Need {n_a} real anchor rows, source has {source_X.shape[0]}")
    rng = stream(seed, "anchor", purpose="real")
    idx = stratified_indices(source_y, n_a, rng, task_mode)
    return AnchorSet(A=source_X[idx], y_a=np.asarray(source_y)[idx], source_count=n_a, neighbor_count=0)


def split_anchor_source(
    X: np.ndarray,
    y: np.ndarray,
    n_source: int,
    rng: np.random.Generator,
    task_mode: TaskMode = TaskMode.CLASSIFICATION,
):
    """Reserve `n_source` rows as anchor source, disjoint from the rest of the pool"""
    idx = stratified_indices(y, n_source, rng, task_mode)
    rest = np.setdiff1d(np.arange(X.shape[0]), idx)
    return (X[rest], y[rest]), (X[idx], y[idx])
