from typing import Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..errors import EmptyEvaluationError, LabelNotPresentError
from ..models.data import AnchorSet
from ..utils.rng import stream


class AttackScenario(BaseModel):
    """Leaked (original, intermediate) anchor pairs of one party plus held-out rows to score against"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    leaked_indices: np.ndarray
    leaked_A: np.ndarray
    leaked_A_tilde: np.ndarray
    eval_indices: np.ndarray
    eval_X: np.ndarray
    eval_X_tilde: np.ndarray
    eval_y: np.ndarray

    @model_validator(mode="after")
    def _disjoint(self):
        if np.intersect1d(self.leaked_indices, self.eval_indices).size:
            raise ValueError("Leaked and evaluation rows overlap")
        if self.leaked_A.shape[0] != self.leaked_A_tilde.shape[0]:
            raise ValueError("Leaked original and intermediate rows differ in count")
        return self

    @property
    def n_leaked(self) -> int:
        return self.leaked_indices.size

    @property
    def d(self) -> int:
        return self.leaked_A.shape[1]

    @property
    def d_tilde(self) -> int:
        return self.leaked_A_tilde.shape[1]


def leak_by_label(
    anchor: AnchorSet,
    labels: Iterable[int],
    A_tilde: np.ndarray,
    eval_per_label: Optional[int] = None,
    seed: int = 0,
    party: int = 0,
) -> AttackScenario:
    """
    Leak every anchor row carrying one of `labels`.

    The remaining labels form the evaluation set; with `eval_per_label` set,
    at most that many rows per remaining label are drawn without replacement.
    """
    if not anchor.has_labels:
        raise LabelNotPresentError("Leak-by-label needs a labeled anchor set")
    labels = np.unique(np.asarray(list(labels)))
    present = np.unique(anchor.y_a)
    missing = np.setdiff1d(labels, present)
    if missing.size:
        raise LabelNotPresentError(f"Label(s) {missing.tolist()} not present in the anchor set")

    leaked = np.flatnonzero(np.isin(anchor.y_a, labels))
    remaining = np.setdiff1d(present, labels)
    if remaining.size == 0:
        raise EmptyEvaluationError("Every anchor label was leaked; nothing left to evaluate")

    rng = stream(seed, "attack", party=party, purpose="eval")
    picked = []
    for label in remaining:
        rows = np.flatnonzero(anchor.y_a == label)
        if eval_per_label is not None and rows.size > eval_per_label:
            rows = np.sort(rng.choice(rows, size=eval_per_label, replace=False))
        picked.append(rows)
    evaluated = np.concatenate(picked)

    return AttackScenario(
        leaked_indices=leaked,
        leaked_A=anchor.A[leaked],
        leaked_A_tilde=A_tilde[leaked],
        eval_indices=evaluated,
        eval_X=anchor.A[evaluated],
        eval_X_tilde=A_tilde[evaluated],
        eval_y=anchor.y_a[evaluated],
    )
