import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from ..errors import DegenerateDataError, DimensionMismatchError
from ..utils.linalg import fix_signs

logger = logging.getLogger(__name__)


class LinearObfuscator(BaseModel):
    """Centered orthonormal projection x -> (x - mean) @ projection"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray
    projection: np.ndarray

    @property
    def d(self) -> int:
        return self.projection.shape[0]

    @property
    def d_tilde(self) -> int:
        return self.projection.shape[1]

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) @ self.projection


def fit_pca(X: np.ndarray, d_tilde: int) -> LinearObfuscator:
    """Top-d_tilde principal axes of the column-centered data, sign-fixed"""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n < 2:
        raise DegenerateDataError(f"PCA needs at least 2 rows, got {n}")
    if not 1 <= d_tilde <= min(n, d):
        raise DimensionMismatchError(f"d_tilde={d_tilde} must lie in [1, min(n, d)] = [1, {min(n, d)}]")
    if np.all(np.ptp(X, axis=0) == 0):
        raise DegenerateDataError("Every column of X has zero variance")

    mean = X.mean(axis=0)
    # Rows of Vt come ordered by descending singular value
    _, _, Vt = linalg.svd(X - mean, full_matrices=False)
    projection = fix_signs(Vt[:d_tilde].T)
    logger.debug(f"Fitted PCA obfuscator {d} -> {d_tilde} on {n} rows")
    return LinearObfuscator(mean=mean, projection=projection)
