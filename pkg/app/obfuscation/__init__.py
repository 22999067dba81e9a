from typing import Union
import logging

import numpy as np

from ..errors import DimensionMismatchError
from ..models.experiment import ObfuscatorKind
from .kpca import KernelObfuscator, fit_kpca, median_heuristic, party_bandwidth
from .pca import LinearObfuscator, fit_pca

logger = logging.getLogger(__name__)

Obfuscator = Union[LinearObfuscator, KernelObfuscator]


def apply(obf: Obfuscator, X: np.ndarray) -> np.ndarray:
    """Apply f_k row-wise: row i of the output is f_k(row i of X)"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != obf.d:
        raise DimensionMismatchError(f"Obfuscator expects {obf.d} columns, got {X.shape[1]}")
    if X.shape[0] == 0:
        return np.zeros((0, obf.d_tilde))
    return obf.transform(X)


def fit_obfuscator(
    kind: ObfuscatorKind,
    X: np.ndarray,
    d_tilde: int,
    rng: np.random.Generator,
    spread: float = 10.0,
) -> Obfuscator:
    """Fit a party's obfuscator; KPCA bandwidths vary per party through rng"""
    if kind == ObfuscatorKind.PCA:
        return fit_pca(X, d_tilde)
    return fit_kpca(X, d_tilde, gamma_f=party_bandwidth(X, rng, spread))


__all__ = [
    "KernelObfuscator",
    "LinearObfuscator",
    "Obfuscator",
    "apply",
    "fit_kpca",
    "fit_obfuscator",
    "fit_pca",
    "median_heuristic",
    "party_bandwidth",
]
