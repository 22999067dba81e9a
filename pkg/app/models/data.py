from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class PartyDataset(BaseModel):
    """One party's private feature matrix and target vector"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    X: np.ndarray
    y: np.ndarray
    party_id: int

    @model_validator(mode="after")
    def _rows_match(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError(
                f"Party {self.party_id}: X has shape {self.X.shape} but y has {self.y.shape[0]} entries"
            )
        return self

    @property
    def n(self) -> int:
        return self.X.shape[0]


class AnchorSet(BaseModel):
    """Shared pseudo-data with per-row targets and generation metadata"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    A: np.ndarray
    y_a: Optional[np.ndarray] = None
    source_count: int
    neighbor_count: int

    @model_validator(mode="after")
    def _rows_match(self):
        if self.A.ndim != 2:
            raise ValueError(f"Anchor matrix must be 2-D, got shape {self.A.shape}")
        if self.y_a is not None and self.y_a.shape[0] != self.A.shape[0]:
            raise ValueError(
                f"Anchor matrix has {self.A.shape[0]} rows but {self.y_a.shape[0]} labels"
            )
        return self

    @property
    def n_a(self) -> int:
        return self.A.shape[0]

    @property
    def has_labels(self) -> bool:
        return self.y_a is not None
