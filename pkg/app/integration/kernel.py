from enum import Enum
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg
from scipy.spatial.distance import cdist

from ..errors import DimensionMismatchError, NonFiniteError, PartyIndexError
from ..utils.linalg import TargetSolution, symmetrize
from .graphs import LaplacianPair
from .solvers import solve_centered, solve_graph, solve_plain

logger = logging.getLogger(__name__)


class KernelKind(str, Enum):
    RBF = "RBF"


class NKIVariant(str, Enum):
    PLAIN = "plain"
    GRAPH = "graph"
    CENTERED = "centered"
    GRAPH_CENTERED = "graph_centered"


class KernelSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=1.0, gt=0)
    kind: KernelKind = KernelKind.RBF


class KernelIntegrationModel(BaseModel):
    """Fitted NKI model; g_k(x) = kappa_k(x) Gamma_k with Gamma_k = S_k Z*"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    anchors_tilde: List[np.ndarray]
    kernel: KernelSpec
    lam: float
    Z_star: np.ndarray
    Gamma: List[np.ndarray]
    S: List[np.ndarray]
    kernels: List[np.ndarray]
    M_lambda: np.ndarray
    variant: NKIVariant
    constraint_matrix_used: np.ndarray
    eigenvalues: np.ndarray
    unique: bool = True

    @property
    def K(self) -> int:
        return len(self.Gamma)

    @property
    def d_hat(self) -> int:
        return self.Z_star.shape[1]


def kernel_matrix(spec: KernelSpec, A_tilde_k: np.ndarray) -> np.ndarray:
    """(K_k)_ii' = exp(-gamma ||a_i - a_i'||^2)"""
    return np.exp(-spec.gamma * cdist(A_tilde_k, A_tilde_k, "sqeuclidean"))


def kernel_row(spec: KernelSpec, A_tilde_k: np.ndarray, x: np.ndarray) -> np.ndarray:
    """kappa_k(x) for each row of x against every anchor row"""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != A_tilde_k.shape[1]:
        raise DimensionMismatchError(f"Expected {A_tilde_k.shape[1]} columns, got {x.shape[1]}")
    if x.shape[0] == 0:
        return np.zeros((0, A_tilde_k.shape[0]))
    return np.exp(-spec.gamma * cdist(x, A_tilde_k, "sqeuclidean"))


def _regularized_inverse(K_k: np.ndarray, lam: float) -> np.ndarray:
    """S_k = (K_k + lam I)^-1 by Cholesky solve against the identity"""
    n_a = K_k.shape[0]
    factor = linalg.cho_factor(K_k + lam * np.eye(n_a), lower=True)
    return symmetrize(linalg.cho_solve(factor, np.eye(n_a)))


def build_M(
    anchors_tilde: Sequence[np.ndarray],
    spec: KernelSpec,
    lam: float,
    kernels: Optional[Sequence[np.ndarray]] = None,
) -> Tuple[List[np.ndarray], np.ndarray]:
    """S_k for every party and M_lambda = lam * sum_k S_k"""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if kernels is None:
        kernels = [kernel_matrix(spec, A_k) for A_k in anchors_tilde]
    S = []
    for k, K_k in enumerate(kernels):
        if not np.all(np.isfinite(K_k)):
            raise NonFiniteError(f"Kernel matrix of party {k} has non-finite entries")
        S.append(_regularized_inverse(K_k, lam))
    M_lambda = symmetrize(lam * np.sum(S, axis=0))
    return S, M_lambda


def kernel_objective(kernels: Sequence[np.ndarray], Gammas: Sequence[np.ndarray], Z: np.ndarray, lam: float) -> float:
    """sum_k ||K_k Gamma_k - Z||_F^2 + lam tr(Gamma_k^T K_k Gamma_k)"""
    total = 0.0
    for K_k, G_k in zip(kernels, Gammas):
        KG = K_k @ G_k
        total += np.sum((KG - Z) ** 2) + lam * np.sum(G_k * KG)
    return float(total)


def fit_nki(
    anchors_tilde: Sequence[np.ndarray],
    spec: KernelSpec,
    lam: float,
    d_hat: int,
    variant: NKIVariant = NKIVariant.PLAIN,
    pair: Optional[LaplacianPair] = None,
) -> KernelIntegrationModel:
    """
    Construct NKI integration functions.

    1. kernel matrices K_k of every party's anchor view
    2. S_k = (K_k + lam I)^-1 and M_lambda = lam sum_k S_k
    3. Z* from the variant's reduced problem
    4. Gamma_k = S_k Z*, so g_k(x) = kappa_k(x) S_k Z*
    """
    anchors_tilde = [np.asarray(A_k, dtype=float) for A_k in anchors_tilde]
    n_a = anchors_tilde[0].shape[0]
    if any(A_k.shape[0] != n_a for A_k in anchors_tilde):
        raise DimensionMismatchError("All party anchor matrices must have n_a rows")

    kernels = [kernel_matrix(spec, A_k) for A_k in anchors_tilde]
    S, M_lambda = build_M(anchors_tilde, spec, lam, kernels=kernels)

    if variant in (NKIVariant.GRAPH, NKIVariant.GRAPH_CENTERED) and pair is None:
        raise ValueError(f"Variant '{variant.value}' needs a Laplacian pair")

    solution: TargetSolution
    if variant == NKIVariant.PLAIN:
        solution = solve_plain(M_lambda, d_hat)
    elif variant == NKIVariant.GRAPH:
        solution = solve_graph(M_lambda, pair, d_hat)
    else:
        solution = solve_centered(M_lambda, pair or LaplacianPair.empty(n_a), d_hat)

    Z_star = solution.Z
    Gamma = [S_k @ Z_star for S_k in S]
    logger.debug(f"Fitted NKI ({variant.value}): K={len(S)}, n_a={n_a}, d_hat={d_hat}, lambda={lam:g}")
    return KernelIntegrationModel(
        anchors_tilde=anchors_tilde,
        kernel=spec,
        lam=float(lam),
        Z_star=Z_star,
        Gamma=Gamma,
        S=S,
        kernels=kernels,
        M_lambda=M_lambda,
        variant=variant,
        constraint_matrix_used=solution.C_used,
        eigenvalues=solution.eigenvalues,
        unique=bool(solution.unique),
    )


def apply_nki(model: KernelIntegrationModel, party_k: int, X_tilde: np.ndarray) -> np.ndarray:
    if not 0 <= party_k < model.K:
        raise PartyIndexError(f"Party index {party_k} out of range for {model.K} parties")
    return kernel_row(model.kernel, model.anchors_tilde[party_k], X_tilde) @ model.Gamma[party_k]
