from typing import Tuple

import numpy as np

from ..models.experiment import TaskMode
from ..utils.rng import stream

CLASS_RADIUS = 3.0
MAP_SCALE = 0.5


def make_synthetic(
    n: int,
    d: int = 20,
    n_classes: int = 3,
    seed: int = 0,
    task_mode: TaskMode = TaskMode.CLASSIFICATION,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gaussian classes in R^2 lifted to R^d by a fixed random linear map and a
    coordinate-wise sine warp.

    Class means sit on a circle of radius 3 with unit covariance. In
    regression mode the latent points are a single Gaussian and the target is
    sin(z_0) + 0.5 z_1.
    """
    latent_rng = stream(seed, "synthetic", purpose="latent")
    W = MAP_SCALE * stream(seed, "synthetic", purpose="map").standard_normal((2, d))

    if task_mode == TaskMode.REGRESSION:
        Z = 1.5 * latent_rng.standard_normal((n, 2))
        y = np.sin(Z[:, 0]) + 0.5 * Z[:, 1]
    else:
        y = latent_rng.permutation(np.arange(n) % n_classes)
        angles = 2 * np.pi * np.arange(n_classes) / n_classes
        centers = CLASS_RADIUS * np.column_stack([np.cos(angles), np.sin(angles)])
        Z = centers[y] + latent_rng.standard_normal((n, 2))

    return np.sin(Z @ W), y
