from typing import List, Tuple
import logging

import numpy as np

from ..errors import InsufficientPoolError
from ..models.data import PartyDataset
from ..utils.rng import stream

logger = logging.getLogger(__name__)


def partition(
    pool_X: np.ndarray,
    pool_y: np.ndarray,
    K: int,
    n: int,
    test_total: int,
    seed: int,
) -> Tuple[List[PartyDataset], Tuple[np.ndarray, np.ndarray]]:
    """Disjoint uniform split into K parties of n rows plus one test set shared by all parties"""
    needed = K * n + test_total
    if pool_X.shape[0] < needed:
        raise InsufficientPoolError(
            f"Pool has {pool_X.shape[0]} rows, need {needed} ({K} parties x {n} + {test_total} test)"
        )
    order = stream(seed, "partition", purpose="split").permutation(pool_X.shape[0])
    parties = [
        PartyDataset(X=pool_X[rows], y=pool_y[rows], party_id=k)
        for k, rows in enumerate(np.split(order[: K * n], K))
    ]
    test_rows = order[K * n : needed]
    logger.debug(f"Partitioned pool into {K} parties of {n} rows and {test_total} test rows")
    return parties, (pool_X[test_rows], pool_y[test_rows])
