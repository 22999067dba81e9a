from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple
import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..anchors import anchor_real_only, generate_anchor, split_anchor_source
from ..evaluation import CLASSIFY, REGRESS, accuracy, fit_knn, knn_predict, mean_ci, rmse
from ..models.data import AnchorSet, PartyDataset
from ..models.experiment import (
    AnchorMode,
    ExperimentConfig,
    ExperimentSummary,
    Method,
    MethodSummary,
    TaskMode,
    TrialResult,
)
from ..obfuscation import Obfuscator, apply, fit_obfuscator
from ..utils.rng import stream
from .data import Pool, load_pool
from .methods import collaboration_representations, fit_integration, integration_map
from .partition import partition

logger = logging.getLogger(__name__)

Clock = Callable[[], float]
Source = Tuple[np.ndarray, np.ndarray]


class TrialContext(BaseModel):
    """Everything a trial shares across methods: split, anchors, obfuscators and their outputs"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    seed: int
    parties: List[PartyDataset]
    test_X: np.ndarray
    test_y: np.ndarray
    anchor: AnchorSet
    obfuscators: List[Obfuscator]
    anchors_tilde: List[np.ndarray]
    train_tilde: List[np.ndarray]
    test_tilde: List[np.ndarray]
    y_scale: float = 1.0

    @property
    def K(self) -> int:
        return len(self.parties)


def split_trial_pool(config: ExperimentConfig, pool: Pool, seed: int) -> Tuple[Pool, Source]:
    """Reserve this trial's anchor source rows; the rest of the pool feeds the partition"""
    n_source = config.n_a_smote if config.anchor_mode == AnchorMode.SMOTE else config.n_a
    rng = stream(seed, "anchor", purpose="anchor_source")
    (rest_X, rest_y), source = split_anchor_source(pool.X, pool.y, n_source, rng, config.task_mode)
    return Pool(X=rest_X, y=rest_y, y_offset=pool.y_offset, y_scale=pool.y_scale), source


def build_anchor(config: ExperimentConfig, anchor_source: Source, seed: int) -> AnchorSet:
    source_X, source_y = anchor_source
    if config.anchor_mode == AnchorMode.REAL:
        return anchor_real_only(source_X, source_y, config.n_a, seed, config.task_mode)
    return generate_anchor(
        source_X, source_y, config.n_a, config.k_nn, config.balanced, seed, config.task_mode
    )


def prepare_trial(config: ExperimentConfig, pool: Pool, anchor_source: Source, seed: int) -> TrialContext:
    parties, (test_X, test_y) = partition(
        pool.X, pool.y, config.K, config.n_per_party, config.test_total, seed
    )
    anchor = build_anchor(config, anchor_source, seed)

    obfuscators = [
        fit_obfuscator(
            config.obfuscator,
            party.X,
            config.d_tilde,
            stream(seed, "obfuscation", party=party.party_id, purpose="bandwidth"),
            spread=config.kpca_spread,
        )
        for party in parties
    ]
    logger.debug(f"Trial {seed}: fitted {len(obfuscators)} {config.obfuscator.value} obfuscators")
    return TrialContext(
        seed=int(seed),
        parties=parties,
        test_X=test_X,
        test_y=test_y,
        anchor=anchor,
        obfuscators=obfuscators,
        anchors_tilde=[apply(f, anchor.A) for f in obfuscators],
        train_tilde=[apply(f, party.X) for f, party in zip(obfuscators, parties)],
        test_tilde=[apply(f, test_X) for f in obfuscators],
        y_scale=pool.y_scale,
    )


def _score(config: ExperimentConfig, ctx: TrialContext, pred: np.ndarray) -> float:
    if config.task_mode == TaskMode.REGRESSION:
        # Targets were standardized on the pool; report RMSE in original units
        return rmse(pred, ctx.test_y) * ctx.y_scale
    return accuracy(pred, ctx.test_y)


def evaluate_method(
    ctx: TrialContext,
    method: Method,
    config: ExperimentConfig,
    clock: Clock = time.perf_counter,
) -> TrialResult:
    """
    Evaluate one method on a prepared trial.

    Integration methods fit g_k on the anchor views (timed as fit), map every
    party's training rows into the collaboration space (timed as transform),
    train one downstream k-NN on the stacked rows and score h(g_k(f_k(test)))
    for each party. Local trains on each party's raw rows; Central trains on
    all raw rows once.
    """
    mode = REGRESS if config.task_mode == TaskMode.REGRESSION else CLASSIFY
    fit_ms = transform_ms = 0.0

    if method == Method.LOCAL:
        per_party = [
            _score(config, ctx, knn_predict(fit_knn(p.X, p.y, config.downstream_k, mode), ctx.test_X))
            for p in ctx.parties
        ]
    elif method == Method.CENTRAL:
        h = fit_knn(
            np.vstack([p.X for p in ctx.parties]),
            np.concatenate([p.y for p in ctx.parties]),
            config.downstream_k,
            mode,
        )
        per_party = [_score(config, ctx, knn_predict(h, ctx.test_X))]
    else:
        start = clock()
        model = fit_integration(method, ctx.anchors_tilde, ctx.anchor.y_a, config)
        fitted = clock()
        train_hat = collaboration_representations(model, ctx.train_tilde)
        transformed = clock()
        fit_ms = (fitted - start) * 1000.0
        transform_ms = (transformed - fitted) * 1000.0

        h = fit_knn(np.vstack(train_hat), np.concatenate([p.y for p in ctx.parties]), config.downstream_k, mode)
        g = integration_map(model)
        per_party = [
            _score(config, ctx, knn_predict(h, g(k, X_tilde))) for k, X_tilde in enumerate(ctx.test_tilde)
        ]

    return TrialResult(
        method=method,
        seed=ctx.seed,
        metric=config.metric,
        per_party=per_party,
        mean=float(np.mean(per_party)),
        fit_ms=fit_ms,
        transform_ms=transform_ms,
    )


def run_trial(
    config: ExperimentConfig,
    pool: Pool,
    anchor_source: Source,
    method: Method,
    seed: int,
    clock: Clock = time.perf_counter,
) -> TrialResult:
    return evaluate_method(prepare_trial(config, pool, anchor_source, seed), method, config, clock)


def summarize(method: Method, metric: str, trials: List[TrialResult]) -> MethodSummary:
    score = mean_ci([t.mean for t in trials])
    fit = mean_ci([t.fit_ms for t in trials])
    transform = mean_ci([t.transform_ms for t in trials])
    return MethodSummary(
        method=method,
        metric=metric,
        n_trials=len(trials),
        mean=score.mean,
        ci=score.half_width,
        degenerate=score.degenerate,
        fit_ms_mean=fit.mean,
        fit_ms_ci=fit.half_width,
        transform_ms_mean=transform.mean,
        transform_ms_ci=transform.half_width,
    )


def run_experiment(
    config: ExperimentConfig,
    pool: Optional[Pool] = None,
    clock: Clock = time.perf_counter,
) -> ExperimentSummary:
    """Run every configured method over n_seed trials; trial r uses seed config.seed + r"""
    if pool is None:
        pool = load_pool(config)

    def trial(seed: int) -> List[TrialResult]:
        rest, source = split_trial_pool(config, pool, seed)
        ctx = prepare_trial(config, rest, source, seed)
        results = [evaluate_method(ctx, method, config, clock) for method in config.methods]
        logger.debug(f"Trial {seed}: " + ", ".join(f"{r.method.value}={r.mean:.4f}" for r in results))
        return results

    seeds = [config.seed + r for r in range(config.n_seed)]
    logger.info(f"Running {len(seeds)} trial(s) of {[m.value for m in config.methods]} with {config.jobs} job(s)")
    if config.jobs > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as executor:
            batches = list(executor.map(trial, seeds))
    else:
        batches = [trial(seed) for seed in seeds]

    trials = [result for batch in batches for result in batch]
    summaries = [
        summarize(method, config.metric, [t for t in trials if t.method == method]) for method in config.methods
    ]
    for s in summaries:
        logger.info(f"{s.method.value}: {s.metric} {s.mean:.4f} +/- {s.ci:.4f} over {s.n_trials} trial(s)")
    return ExperimentSummary(config_hash=config.config_hash(), methods=summaries, trials=trials)
