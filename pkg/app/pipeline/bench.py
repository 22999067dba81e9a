from typing import Callable, List, Optional, Sequence
import logging
import math

from pydantic import BaseModel

from ..errors import ConfigError
from ..models.experiment import ExperimentConfig, ExperimentSummary, Method
from .data import Pool
from .runner import run_experiment

logger = logging.getLogger(__name__)

TIMER_RESOLUTION_MS = 1.0


class BenchRow(BaseModel):
    """Mean timings at one anchor size; slopes cover the step ending at this size"""
    method: Method
    n_a: int
    fit_ms: float
    transform_ms: float
    fit_slope: Optional[float] = None
    transform_slope: Optional[float] = None


def loglog_slope(n1: float, t1: float, n2: float, t2: float) -> float:
    if min(n1, n2, t1, t2) <= 0:
        raise ValueError("Log-log slope needs positive sizes and timings")
    return (math.log(t2) - math.log(t1)) / (math.log(n2) - math.log(n1))


def bench_scaling(
    config: ExperimentConfig,
    n_a_list: Sequence[int],
    methods: Optional[Sequence[Method]] = None,
    pool: Optional[Pool] = None,
    measure: Optional[Callable[[ExperimentConfig], ExperimentSummary]] = None,
) -> List[BenchRow]:
    """Fit/transform timings across anchor sizes with the local log-log slope between neighbors"""
    n_a_list = list(n_a_list)
    if len(n_a_list) < 2 or any(b <= a for a, b in zip(n_a_list, n_a_list[1:])):
        raise ConfigError(f"Benchmark anchor sizes must be strictly ascending with at least 2 values, got {n_a_list}")

    methods = list(methods or [m for m in config.methods if not m.is_baseline])
    if measure is None:
        measure = lambda cfg: run_experiment(cfg, pool=pool)

    rows: List[BenchRow] = []
    for n_a in n_a_list:
        summary = measure(config.model_copy(update={"n_a": n_a, "methods": methods, "jobs": 1}))
        for method in methods:
            s = summary.for_method(method)
            rows.append(BenchRow(method=method, n_a=n_a, fit_ms=s.fit_ms_mean, transform_ms=s.transform_ms_mean))

    for method in methods:
        series = [r for r in rows if r.method == method]
        for prev, row in zip(series, series[1:]):
            if min(prev.fit_ms, row.fit_ms) > 0:
                row.fit_slope = loglog_slope(prev.n_a, prev.fit_ms, row.n_a, row.fit_ms)
            if min(prev.transform_ms, row.transform_ms) > 0:
                row.transform_slope = loglog_slope(prev.n_a, prev.transform_ms, row.n_a, row.transform_ms)
        last = series[-1]
        logger.info(
            f"{method.value}: fit slope {last.fit_slope}, transform slope {last.transform_slope} "
            f"at n_a {series[-2].n_a}->{last.n_a}"
        )

    fast = [r for r in rows if min(r.fit_ms, r.transform_ms) < TIMER_RESOLUTION_MS]
    if fast:
        logger.warning(
            f"{len(fast)} benchmark timing(s) below {TIMER_RESOLUTION_MS:g} ms; slopes may reflect timer resolution"
        )
    return rows
