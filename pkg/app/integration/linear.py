from typing import List, Sequence
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from ..errors import DegenerateDataError, DimensionMismatchError, PartyIndexError
from ..utils.linalg import fix_signs, is_separated, numerical_rank

logger = logging.getLogger(__name__)


class LinearIntegrationModel(BaseModel):
    """Target representation Z* and per-party maps G^(k) with x -> x G^(k)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    Z_star: np.ndarray
    G: List[np.ndarray]
    objective_value: float
    ranks: List[int]
    singular_values: np.ndarray
    unique: bool = True

    @property
    def K(self) -> int:
        return len(self.G)

    @property
    def d_hat(self) -> int:
        return self.Z_star.shape[1]


def _thin_svd(A: np.ndarray):
    U, s, Vt = linalg.svd(A, full_matrices=False)
    r = numerical_rank(s, A.shape)
    return U[:, :r], s[:r], Vt[:r]


def _least_squares_maps(anchors_tilde: Sequence[np.ndarray], Z: np.ndarray) -> List[np.ndarray]:
    """Minimum-norm least-squares G^(k) = pinv(A^(k)) Z for every party"""
    maps = []
    for A_k in anchors_tilde:
        U, s, Vt = _thin_svd(A_k)
        maps.append(Vt.T @ ((U.T @ Z) / s[:, None]))
    return maps


def linear_objective(anchors_tilde: Sequence[np.ndarray], Z: np.ndarray) -> float:
    """sum_k ||A^(k) G^(k) - Z||_F^2 with each G^(k) chosen by inner least squares"""
    maps = _least_squares_maps(anchors_tilde, Z)
    return float(sum(np.sum((A_k @ G_k - Z) ** 2) for A_k, G_k in zip(anchors_tilde, maps)))


def fit_lki(anchors_tilde: Sequence[np.ndarray], d_hat: int) -> LinearIntegrationModel:
    """
    Globally optimal linear integration.

    Q^(k) is an orthonormal basis of range(A^(k)), W_Q = [Q^(1), ..., Q^(K)],
    Z* the top-d_hat left singular vectors of W_Q (rotation fixed to the
    identity), and G^(k) = pinv(A^(k)) Z*.
    """
    anchors_tilde = [np.asarray(A_k, dtype=float) for A_k in anchors_tilde]
    n_a = anchors_tilde[0].shape[0]
    if any(A_k.shape[0] != n_a for A_k in anchors_tilde):
        raise DimensionMismatchError("All party anchor matrices must have n_a rows")
    if not 1 <= d_hat <= n_a:
        raise DimensionMismatchError(f"d_hat={d_hat} must lie in [1, n_a] = [1, {n_a}]")

    bases, ranks = [], []
    for k, A_k in enumerate(anchors_tilde):
        if not np.any(A_k):
            raise DegenerateDataError(f"Party {k} anchor representation is all zeros")
        Q_k, _, _ = _thin_svd(A_k)
        bases.append(Q_k)
        ranks.append(Q_k.shape[1])

    W_Q = np.hstack(bases)
    # A thin SVD keeps construction linear in n_a; the full basis is only needed
    # when d_hat exceeds the column count of W_Q.
    U, s, _ = linalg.svd(W_Q, full_matrices=d_hat > min(W_Q.shape))
    Z_star = fix_signs(U[:, :d_hat])

    # Beyond the rank of W_Q the extra columns come from a null space of dimension n_a - rank
    unique = is_separated(s, d_hat, 1.0) and not (s.size < d_hat < n_a)
    if not unique:
        logger.warning(f"Singular values {d_hat} and {d_hat + 1} of W_Q coincide; Z* is not unique")

    G = _least_squares_maps(anchors_tilde, Z_star)
    objective = float(sum(np.sum((A_k @ G_k - Z_star) ** 2) for A_k, G_k in zip(anchors_tilde, G)))
    logger.debug(f"Fitted LKI: K={len(G)}, n_a={n_a}, d_hat={d_hat}, ranks={ranks}, objective={objective:.6g}")
    return LinearIntegrationModel(
        Z_star=Z_star,
        G=G,
        objective_value=objective,
        ranks=ranks,
        singular_values=s,
        unique=bool(unique),
    )


def apply_linear(model: LinearIntegrationModel, party_k: int, X_tilde: np.ndarray) -> np.ndarray:
    if not 0 <= party_k < model.K:
        raise PartyIndexError(f"Party index {party_k} out of range for {model.K} parties")
    X_tilde = np.atleast_2d(np.asarray(X_tilde, dtype=float))
    G_k = model.G[party_k]
    if X_tilde.shape[1] != G_k.shape[0]:
        raise DimensionMismatchError(
            f"Party {party_k} expects {G_k.shape[0]} intermediate columns, got {X_tilde.shape[1]}"
        )
    return X_tilde @ G_k
