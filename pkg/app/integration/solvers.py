"""Target-representation solvers for the kernel integration variants."""
from typing import NamedTuple
import logging

import numpy as np
from scipy import linalg

from ..errors import DimensionMismatchError
from ..utils.linalg import (
    SINGULAR_EIGENVALUE,
    TargetSolution,
    fix_signs,
    generalized_eigh_smallest,
    is_separated,
    regularize_constraint,
    smallest_eigenvalue,
    symmetrize,
)
from .graphs import LaplacianPair

logger = logging.getLogger(__name__)


class CenteringReduction(NamedTuple):
    """Mean-zero basis T and the reduced matrices of the centered problem"""
    T: np.ndarray
    M_tilde: np.ndarray
    C_tilde: np.ndarray


def _check_d_hat(d_hat: int, limit: int):
    if not 1 <= d_hat <= limit:
        raise DimensionMismatchError(f"d_hat={d_hat} must lie in [1, {limit}]")


def solve_plain(M_lambda: np.ndarray, d_hat: int) -> TargetSolution:
    """Bottom-d_hat orthonormal eigenvectors of M_lambda"""
    n_a = M_lambda.shape[0]
    _check_d_hat(d_hat, n_a)
    eigenvalues, V = linalg.eigh(symmetrize(M_lambda))
    unique = is_separated(eigenvalues, d_hat, eigenvalues[-1])
    if not unique:
        logger.warning(f"Eigenvalues {d_hat} and {d_hat + 1} of M_lambda coincide; Z* is not unique")
    return TargetSolution(Z=fix_signs(V[:, :d_hat]), eigenvalues=eigenvalues, unique=unique, C_used=np.eye(n_a))


def _unit_trace(M: np.ndarray) -> np.ndarray:
    trace = np.trace(M)
    return M / trace if trace > 0 else M


def graph_objective_matrix(M_lambda: np.ndarray, pair: LaplacianPair) -> np.ndarray:
    """M' = M_lambda / tr(M_lambda) + mu B / tr(B); B is left as is when its trace is zero"""
    return symmetrize(_unit_trace(M_lambda) + pair.mu * _unit_trace(pair.B))


def solve_graph(M_lambda: np.ndarray, pair: LaplacianPair, d_hat: int) -> TargetSolution:
    """Generalized problem M' u = gamma C_used u, d_hat smallest gamma, Z*^T C_used Z* = I"""
    _check_d_hat(d_hat, M_lambda.shape[0])
    C_used = regularize_constraint(pair.C, pair.epsilon)
    return generalized_eigh_smallest(graph_objective_matrix(M_lambda, pair), C_used, d_hat)


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the mean-zero subspace; column j is (1,...,1,-j,0,...,0)/sqrt(j(j+1))"""
    if n < 2:
        raise DimensionMismatchError(f"Helmert basis needs n >= 2, got {n}")
    j = np.arange(1, n)
    rows = np.arange(n)[:, None]
    T = np.where(rows < j, 1.0, 0.0) - np.where(rows == j, j, 0.0)
    return T / np.sqrt(j * (j + 1.0))


def centering_reduction(M_lambda: np.ndarray, pair: LaplacianPair) -> CenteringReduction:
    T = helmert_basis(M_lambda.shape[0])
    M_tilde = symmetrize(T.T @ graph_objective_matrix(M_lambda, pair) @ T)
    C_tilde = symmetrize(T.T @ pair.C @ T)
    return CenteringReduction(T=T, M_tilde=M_tilde, C_tilde=C_tilde)


def solve_centered(M_lambda: np.ndarray, pair: LaplacianPair, d_hat: int) -> TargetSolution:
    """
    Centered problem: Z* = T Y* with Y* from the reduced generalized problem
    M~ y = gamma C~ y, so that 1^T Z* = 0 holds by construction.
    """
    n_a = M_lambda.shape[0]
    _check_d_hat(d_hat, n_a - 1)
    reduction = centering_reduction(M_lambda, pair)
    T = reduction.T

    C_tilde = reduction.C_tilde
    C_used = pair.C
    if smallest_eigenvalue(C_tilde) <= SINGULAR_EIGENVALUE:
        logger.warning(f"Reduced constraint matrix is singular; adding epsilon={pair.epsilon:g}")
        C_tilde = C_tilde + pair.epsilon * np.eye(n_a - 1)
        # Equivalent full-size constraint: C + epsilon (I - 11^T / n_a)
        C_used = pair.C + pair.epsilon * (T @ T.T)

    reduced = generalized_eigh_smallest(reduction.M_tilde, C_tilde, d_hat)
    return TargetSolution(
        Z=fix_signs(T @ reduced.Z),
        eigenvalues=reduced.eigenvalues,
        unique=reduced.unique,
        C_used=C_used,
    )
