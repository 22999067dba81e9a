import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.spatial.distance import cdist

from ..errors import DimensionMismatchError

logger = logging.getLogger(__name__)

CLASSIFY = "classify"
REGRESS = "regress"


class KnnModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    train_X: np.ndarray
    train_y: np.ndarray
    k: int = 5
    mode: str = CLASSIFY

    @model_validator(mode="after")
    def _valid_k_and_mode(self):
        if self.mode not in (CLASSIFY, REGRESS):
            raise ValueError(f"Unknown k-NN mode '{self.mode}'")
        if not 1 <= self.k <= self.train_X.shape[0]:
            raise ValueError(f"k={self.k} must lie in [1, {self.train_X.shape[0]}]")
        return self


def fit_knn(X: np.ndarray, y: np.ndarray, k: int = 5, mode: str = CLASSIFY) -> KnnModel:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if k > X.shape[0]:
        logger.warning(f"k={k} exceeds the {X.shape[0]} training rows; using k={X.shape[0]}")
        k = X.shape[0]
    return KnnModel(train_X=X, train_y=np.asarray(y), k=int(k), mode=mode)


def knn_predict(model: KnnModel, X: np.ndarray) -> np.ndarray:
    """
    Majority vote (classify) or neighbor mean (regress).

    Distance ties go to the lower training index and vote ties to the
    smaller label, so predictions are deterministic.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.train_X.shape[1]:
        raise DimensionMismatchError(
            f"k-NN model expects {model.train_X.shape[1]} features, got {X.shape[1]}"
        )
    if X.shape[0] == 0:
        return np.zeros(0, dtype=model.train_y.dtype)

    D = cdist(X, model.train_X, "sqeuclidean")
    nearest = np.argsort(D, axis=1, kind="stable")[:, : model.k]
    neighbor_y = model.train_y[nearest]
    if model.mode == REGRESS:
        return neighbor_y.astype(float).mean(axis=1)

    predictions = np.empty(X.shape[0], dtype=model.train_y.dtype)
    for i, votes in enumerate(neighbor_y):
        labels, counts = np.unique(votes, return_counts=True)
        # np.unique sorts labels, so argmax picks the smallest label among ties
        predictions[i] = labels[np.argmax(counts)]
    return predictions
