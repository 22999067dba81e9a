from enum import Enum
from typing import List, Optional, Sequence
import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial.distance import cdist

from ..errors import InvalidGraphError, MissingLabelError
from ..models.experiment import TaskMode

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10


class GraphKind(str, Enum):
    GL = "GL"
    TSL = "TSL"
    TDL = "TDL"


class GraphSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: GraphKind
    task_mode: TaskMode = TaskMode.CLASSIFICATION
    k_nn: int = 10
    sigma_y: Optional[float] = None

    @model_validator(mode="after")
    def _consistent_fields(self):
        if self.k_nn < 1:
            raise ValueError(f"k_nn must be positive, got {self.k_nn}")
        smooth = self.task_mode == TaskMode.REGRESSION and self.kind != GraphKind.GL
        if smooth and (self.sigma_y is None or self.sigma_y <= 0):
            raise ValueError(f"{self.kind.value} in regression mode needs a positive sigma_y")
        if not smooth and self.sigma_y is not None:
            raise ValueError("sigma_y only applies to TSL/TDL in regression mode")
        return self


class LaplacianPair(BaseModel):
    """Intrinsic-graph Laplacian B and penalty-graph Laplacian C"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    B: np.ndarray
    C: np.ndarray
    mu: float = 1.0
    epsilon: float = 1e-8
    provenance: dict = Field(default_factory=dict)

    @classmethod
    def empty(cls, n_a: int, epsilon: float = 1e-8) -> "LaplacianPair":
        """B = 0, C = I: the pair that leaves the kernel objective untouched"""
        return cls(
            B=np.zeros((n_a, n_a)),
            C=np.eye(n_a),
            mu=0.0,
            epsilon=epsilon,
            provenance={"B": None, "C": "identity"},
        )


def knn_neighbors(A_tilde_k: np.ndarray, k_nn: int) -> np.ndarray:
    """k_nn nearest rows of each anchor row, excluding itself; ties go to the lower index"""
    n_a = A_tilde_k.shape[0]
    if k_nn >= n_a:
        raise InvalidGraphError(f"k_nn={k_nn} must be smaller than n_a={n_a}")
    D = cdist(A_tilde_k, A_tilde_k, "sqeuclidean")
    np.fill_diagonal(D, np.inf)
    return np.argsort(D, axis=1, kind="stable")[:, :k_nn]


def raw_weights(spec: GraphSpec, neighbors: np.ndarray, y_a: Optional[np.ndarray] = None) -> np.ndarray:
    """Per-party directed weights on nearest-neighbor pairs; zero elsewhere"""
    n_a = neighbors.shape[0]
    rows = np.repeat(np.arange(n_a), neighbors.shape[1])
    cols = neighbors.ravel()
    W = np.zeros((n_a, n_a))

    if spec.kind == GraphKind.GL:
        W[rows, cols] = 1.0
        return W
    if y_a is None:
        raise MissingLabelError(f"{spec.kind.value} weights need anchor target variables")

    y_a = np.asarray(y_a)
    if spec.task_mode == TaskMode.CLASSIFICATION:
        same = y_a[rows] == y_a[cols]
        W[rows, cols] = (same if spec.kind == GraphKind.TSL else ~same).astype(float)
    else:
        similarity = np.exp(-((y_a[rows] - y_a[cols]) ** 2) / spec.sigma_y ** 2)
        W[rows, cols] = similarity if spec.kind == GraphKind.TSL else 1.0 - similarity
    return W


def symmetrize(W_hat: np.ndarray) -> np.ndarray:
    if W_hat.ndim != 2 or W_hat.shape[0] != W_hat.shape[1]:
        raise InvalidGraphError(f"Weight matrix must be square, got shape {W_hat.shape}")
    return 0.5 * (W_hat + W_hat.T)


def aggregate(per_party_W: Sequence[np.ndarray]) -> np.ndarray:
    """Entrywise mean over parties"""
    if not per_party_W:
        raise InvalidGraphError("No party weight matrices to aggregate")
    shape = per_party_W[0].shape
    if any(W.shape != shape for W in per_party_W):
        raise InvalidGraphError(f"Party weight matrices differ in shape: {[W.shape for W in per_party_W]}")
    return np.mean(np.stack(per_party_W), axis=0)


def laplacian(W: np.ndarray) -> np.ndarray:
    """L = D - W with D the diagonal of row sums"""
    if np.max(np.abs(W - W.T), initial=0.0) > SYMMETRY_TOL:
        raise InvalidGraphError("Weight matrix is not symmetric")
    return np.diag(W.sum(axis=1)) - W


def aggregated_weights(anchors_tilde: List[np.ndarray], spec: GraphSpec, y_a: Optional[np.ndarray]) -> np.ndarray:
    per_party = [
        symmetrize(raw_weights(spec, knn_neighbors(A_k, spec.k_nn), y_a)) for A_k in anchors_tilde
    ]
    return aggregate(per_party)


def build_laplacian_pair(
    anchors_tilde: List[np.ndarray],
    y_a: Optional[np.ndarray],
    b_spec: Optional[GraphSpec],
    c_spec: Optional[GraphSpec] = None,
    mu: float = 1.0,
    epsilon: float = 1e-8,
) -> LaplacianPair:
    """Build B (GL/TSL) and C (TDL, or the identity when c_spec is None) from party anchor views"""
    n_a = anchors_tilde[0].shape[0]
    B = np.zeros((n_a, n_a)) if b_spec is None else laplacian(aggregated_weights(anchors_tilde, b_spec, y_a))
    C = np.eye(n_a) if c_spec is None else laplacian(aggregated_weights(anchors_tilde, c_spec, y_a))
    logger.debug(
        f"Built Laplacian pair: B={b_spec.kind.value if b_spec else None}, "
        f"C={c_spec.kind.value if c_spec else 'identity'}, K={len(anchors_tilde)}"
    )
    return LaplacianPair(
        B=B,
        C=C,
        mu=mu,
        epsilon=epsilon,
        provenance={
            "B": b_spec.kind.value if b_spec else None,
            "C": c_spec.kind.value if c_spec else "identity",
        },
    )
