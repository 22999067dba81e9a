from typing import NamedTuple, Sequence
import math

import numpy as np

from ..errors import DimensionMismatchError

# Normal-approximation multiplier for a 95% interval
Z_95 = 1.96


class MeanCI(NamedTuple):
    mean: float
    half_width: float
    degenerate: bool


def _check_lengths(pred: np.ndarray, truth: np.ndarray):
    if pred.shape[0] != truth.shape[0]:
        raise DimensionMismatchError(f"Prediction length {pred.shape[0]} != truth length {truth.shape[0]}")
    if pred.shape[0] == 0:
        raise DimensionMismatchError("Metrics need at least one prediction")


def accuracy(pred, truth) -> float:
    pred, truth = np.asarray(pred), np.asarray(truth)
    _check_lengths(pred, truth)
    return float(np.mean(pred == truth))


def rmse(pred, truth) -> float:
    pred, truth = np.asarray(pred, dtype=float), np.asarray(truth, dtype=float)
    _check_lengths(pred, truth)
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def mean_ci(values: Sequence[float]) -> MeanCI:
    """Mean and 1.96 * sd / sqrt(N) with the sample sd; N = 1 gives a degenerate zero width"""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("mean_ci needs at least one value")
    mean = float(np.mean(values))
    if values.size == 1:
        return MeanCI(mean=mean, half_width=0.0, degenerate=True)
    sd = float(np.std(values, ddof=1))
    return MeanCI(mean=mean, half_width=Z_95 * sd / math.sqrt(values.size), degenerate=False)
