import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import MissingLabelError
from ..models.experiment import ExperimentConfig, FeatureScaling, TaskMode
from ..storage.datasets import load_dataset
from .synthetic import make_synthetic

logger = logging.getLogger(__name__)


class Pool(BaseModel):
    """Preprocessed sample pool; regression targets are standardized and y_scale maps RMSE back"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray
    y: np.ndarray
    y_offset: float = 0.0
    y_scale: float = 1.0

    @property
    def size(self) -> int:
        return self.X.shape[0]

    def take(self, idx: np.ndarray) -> "Pool":
        return Pool(X=self.X[idx], y=self.y[idx], y_offset=self.y_offset, y_scale=self.y_scale)


def scale_features(X: np.ndarray, scaling: FeatureScaling) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if scaling == FeatureScaling.MINMAX:
        low = X.min(axis=0)
        span = X.max(axis=0) - low
        span[span == 0] = 1.0
        return (X - low) / span
    if scaling == FeatureScaling.STANDARDIZE:
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
        return (X - X.mean(axis=0)) / sd
    return X


def load_pool(config: ExperimentConfig) -> Pool:
    if config.dataset == "synthetic":
        X, y = make_synthetic(
            config.synthetic_size,
            d=config.synthetic_dim,
            n_classes=config.synthetic_classes,
            seed=config.synthetic_seed,
            task_mode=config.task_mode,
        )
    else:
        X, y = load_dataset(config.dataset, config.dataset_format, config.labels_path, config.has_label)
    if y is None:
        raise MissingLabelError(f"Dataset {config.dataset} has no target column")

    X = scale_features(X, config.feature_scaling)
    if config.task_mode == TaskMode.REGRESSION:
        y = np.asarray(y, dtype=float)
        offset, scale = float(y.mean()), float(y.std()) or 1.0
        logger.debug(f"Standardized regression targets (mean {offset:.4g}, sd {scale:.4g})")
        return Pool(X=X, y=(y - offset) / scale, y_offset=offset, y_scale=scale)
    return Pool(X=X, y=np.asarray(y))
