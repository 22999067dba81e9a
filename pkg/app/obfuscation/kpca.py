from typing import Optional
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg
from scipy.spatial.distance import cdist, pdist

from ..errors import DegenerateDataError, DimensionMismatchError, RankDeficiencyError
from ..utils.linalg import fix_signs, symmetrize

logger = logging.getLogger(__name__)

KERNELS = ("rbf", "linear")
# Eigenvalues below this fraction of the largest count as zero
EIGEN_RTOL = 1e-10


class KernelObfuscator(BaseModel):
    """Kernel PCA map fitted on a party's own rows"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X_fit: np.ndarray
    gamma_f: float
    alphas: np.ndarray
    row_means: np.ndarray
    grand_mean: float
    offset: np.ndarray
    scale: np.ndarray
    kernel: str = "rbf"

    @property
    def d(self) -> int:
        return self.X_fit.shape[1]

    @property
    def d_tilde(self) -> int:
        return self.alphas.shape[1]

    def _kernel(self, X: np.ndarray) -> np.ndarray:
        return _kernel(self.kernel, (X - self.offset) / self.scale, self.X_fit, self.gamma_f)

    def transform(self, X: np.ndarray) -> np.ndarray:
        Kx = self._kernel(X)
        Kx_centered = Kx - Kx.mean(axis=1, keepdims=True) - self.row_means + self.grand_mean
        return Kx_centered @ self.alphas


def _kernel(kind: str, X: np.ndarray, Y: np.ndarray, gamma: float) -> np.ndarray:
    if kind == "rbf":
        return np.exp(-gamma * cdist(X, Y, "sqeuclidean"))
    return X @ Y.T


def _standardization(X: np.ndarray):
    offset = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return offset, scale


def median_heuristic(X: np.ndarray) -> float:
    """gamma = 1 / median pairwise squared distance of the standardized rows"""
    X = np.asarray(X, dtype=float)
    offset, scale = _standardization(X)
    distances = pdist((X - offset) / scale, "sqeuclidean")
    median = float(np.median(distances)) if distances.size else 0.0
    if median <= 0:
        raise DegenerateDataError("Median pairwise distance is zero; cannot set a kernel bandwidth")
    return 1.0 / median


def party_bandwidth(X: np.ndarray, rng: np.random.Generator, spread: float = 10.0) -> float:
    """Draw gamma log-uniformly from [gamma_med / spread, gamma_med * spread]"""
    exponent = rng.uniform(-1.0, 1.0)
    return median_heuristic(X) * spread ** exponent


def fit_kpca(
    X: np.ndarray,
    d_tilde: int,
    gamma_f: Optional[float] = None,
    kernel: str = "rbf",
    standardize: bool = True,
) -> KernelObfuscator:
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if kernel not in KERNELS:
        raise ValueError(f"Unknown kernel '{kernel}', expected one of {KERNELS}")
    if not 1 <= d_tilde <= n - 1:
        raise DimensionMismatchError(f"d_tilde={d_tilde} must lie in [1, n - 1] = [1, {n - 1}]")
    if gamma_f is None:
        gamma_f = median_heuristic(X) if kernel == "rbf" else 1.0
    if gamma_f <= 0:
        raise ValueError(f"gamma_f must be positive, got {gamma_f}")

    if standardize:
        offset, scale = _standardization(X)
    else:
        offset, scale = np.zeros(X.shape[1]), np.ones(X.shape[1])
    X_fit = (X - offset) / scale

    K = _kernel(kernel, X_fit, X_fit, gamma_f)
    row_means = K.mean(axis=0)
    grand_mean = float(K.mean())
    K_centered = symmetrize(K - row_means[None, :] - row_means[:, None] + grand_mean)

    eigenvalues, eigenvectors = linalg.eigh(K_centered)
    eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
    positive = int(np.sum(eigenvalues > EIGEN_RTOL * max(eigenvalues[0], 0.0)))
    if eigenvalues[0] <= 0 or positive < d_tilde:
        raise RankDeficiencyError(
            f"Centered kernel matrix has {positive} positive eigenvalues, need d_tilde={d_tilde}"
        )

    alphas = fix_signs(eigenvectors[:, :d_tilde]) / np.sqrt(eigenvalues[:d_tilde])
    logger.debug(f"Fitted {kernel} kernel PCA on {n} rows with gamma_f={gamma_f:.4g}")
    return KernelObfuscator(
        X_fit=X_fit,
        gamma_f=float(gamma_f),
        alphas=alphas,
        row_means=row_means,
        grand_mean=grand_mean,
        offset=offset,
        scale=scale,
        kernel=kernel,
    )
