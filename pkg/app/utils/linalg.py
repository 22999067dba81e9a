from typing import NamedTuple, Optional
import logging

import numpy as np
from scipy import linalg

from ..errors import IndefiniteConstraintError

logger = logging.getLogger(__name__)

# Eigenvalues at or below this are treated as singular when deciding whether
# a constraint matrix needs the epsilon ridge.
SINGULAR_EIGENVALUE = 1e-10
# Relative gap below which the selected eigen/singular subspace is not unique.
DEGENERATE_GAP = 1e-10


class TargetSolution(NamedTuple):
    Z: np.ndarray
    eigenvalues: np.ndarray
    unique: bool
    C_used: Optional[np.ndarray] = None


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def fix_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive (ties -> lowest index)"""
    V = np.array(V, dtype=float, copy=True)
    if V.size == 0:
        return V
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivots, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def rank_tolerance(shape: tuple, largest: float) -> float:
    return max(shape) * largest * np.finfo(float).eps


def numerical_rank(singular_values: np.ndarray, shape: tuple) -> int:
    if singular_values.size == 0:
        return 0
    tol = rank_tolerance(shape, float(singular_values[0]))
    return int(np.sum(singular_values > tol))


def is_separated(values: np.ndarray, k: int, scale: float) -> bool:
    """Whether the k-th and (k+1)-th ordered values differ by more than the degeneracy gap"""
    if k >= values.size:
        return True
    return abs(values[k] - values[k - 1]) >= DEGENERATE_GAP * abs(scale)


def smallest_eigenvalue(C: np.ndarray) -> float:
    return float(linalg.eigh(symmetrize(C), eigvals_only=True, subset_by_index=[0, 0])[0])


def regularize_constraint(C: np.ndarray, epsilon: float) -> np.ndarray:
    """Return C unchanged when positive definite, else C + epsilon * I"""
    if smallest_eigenvalue(C) > SINGULAR_EIGENVALUE:
        return C
    logger.warning(f"Constraint matrix is singular; adding epsilon={epsilon:g} to its diagonal")
    return C + epsilon * np.eye(C.shape[0])


def generalized_eigh_smallest(A: np.ndarray, C: np.ndarray, k: int) -> TargetSolution:
    """
    Solve A u = gamma C u for the k smallest gamma via Cholesky whitening.

    Factor C = L L^T, diagonalize the symmetric matrix L^-1 A L^-T and map the
    eigenvectors back with L^-T, so that U^T C U = I.
    """
    try:
        L = linalg.cholesky(symmetrize(C), lower=True)
    except linalg.LinAlgError as e:
        raise IndefiniteConstraintError(f"Constraint matrix is not positive definite: {e}") from e

    half = linalg.solve_triangular(L, A, lower=True)
    whitened = symmetrize(linalg.solve_triangular(L, half.T, lower=True).T)
    eigenvalues, Y = linalg.eigh(whitened)
    U = linalg.solve_triangular(L.T, Y[:, :k], lower=False)

    unique = is_separated(eigenvalues, k, eigenvalues[-1])
    if not unique:
        logger.warning(f"Eigenvalues {k} and {k + 1} coincide; the selected subspace is not unique")
    return TargetSolution(Z=fix_signs(U), eigenvalues=eigenvalues, unique=unique, C_used=C)
