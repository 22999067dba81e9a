from typing import Dict, NamedTuple, Optional
import logging

import numpy as np

from ..anchors import anchor_real_only, split_anchor_source
from ..errors import AllAttacksFailedError, DCError, EmptyEvaluationError, InsufficientPoolError
from ..evaluation import KnnModel, fit_knn, knn_predict
from ..models.experiment import ExperimentConfig, MLPConfig, ObfuscatorKind
from ..obfuscation import apply, fit_obfuscator
from ..pipeline.data import Pool
from ..utils.rng import stream
from .reconstructors import AttackKind, Reconstructor, fit_lr, fit_mlp, fit_pinv
from .scenario import AttackScenario, leak_by_label

logger = logging.getLogger(__name__)

ORACLE_K = 5


class AttackOutcome(NamedTuple):
    kind: AttackKind
    score: float
    scores: Dict[AttackKind, Optional[float]]


def reconstruction_accuracy(
    reconstructor: Reconstructor,
    eval_X_tilde: np.ndarray,
    eval_y: np.ndarray,
    oracle: KnnModel,
) -> float:
    """Fraction of evaluation rows whose reconstruction the oracle assigns to the true label"""
    eval_y = np.asarray(eval_y)
    if eval_y.size == 0:
        raise EmptyEvaluationError("Reconstruction accuracy needs at least one evaluation row")
    predicted = knn_predict(oracle, reconstructor.reconstruct(eval_X_tilde))
    return float(np.mean(predicted == eval_y))


def best_attack(
    scenario: AttackScenario,
    oracle: KnnModel,
    cfg: Optional[MLPConfig] = None,
    seed: int = 0,
) -> AttackOutcome:
    """Run LR, PINV and MLP; the highest score wins and ties keep the earlier attack"""
    fitters = {
        AttackKind.LR: lambda: fit_lr(scenario),
        AttackKind.PINV: lambda: fit_pinv(scenario),
        AttackKind.MLP: lambda: fit_mlp(scenario, cfg, seed),
    }
    scores: Dict[AttackKind, Optional[float]] = {}
    best: Optional[AttackKind] = None
    for kind, fit in fitters.items():
        try:
            reconstructor = fit()
        except (DCError, np.linalg.LinAlgError) as e:
            logger.warning(f"{kind.value} attack excluded: {e}")
            scores[kind] = None
            continue
        scores[kind] = reconstruction_accuracy(reconstructor, scenario.eval_X_tilde, scenario.eval_y, oracle)
        if best is None or scores[kind] > scores[best]:
            best = kind

    if best is None:
        raise AllAttacksFailedError("Every reconstruction attack failed to fit")
    return AttackOutcome(kind=best, score=scores[best], scores=scores)


def run_attack_condition(
    config: ExperimentConfig,
    obfuscator: ObfuscatorKind,
    d_tilde: int,
    seed: int,
    pool: Pool,
) -> dict:
    """
    One reconstruction audit: real-data anchors, party 0's obfuscator fitted
    on its own rows, leaked anchor labels, and a k-NN oracle trained on rows
    disjoint from both.
    """
    needed = config.n_a + config.n_per_party + config.oracle_size
    if pool.size < needed:
        raise InsufficientPoolError(f"Attack needs {needed} pool rows, pool has {pool.size}")

    (rest_X, rest_y), (source_X, source_y) = split_anchor_source(
        pool.X, pool.y, config.n_a, stream(seed, "anchor", purpose="anchor_source"), config.task_mode
    )
    anchor = anchor_real_only(source_X, source_y, config.n_a, seed, config.task_mode)

    order = stream(seed, "attack", purpose="split").permutation(rest_X.shape[0])
    party_rows = order[: config.n_per_party]
    oracle_rows = order[config.n_per_party : config.n_per_party + config.oracle_size]

    f = fit_obfuscator(
        obfuscator,
        rest_X[party_rows],
        d_tilde,
        stream(seed, "obfuscation", party=0, purpose="bandwidth"),
        spread=config.kpca_spread,
    )
    scenario = leak_by_label(anchor, config.leak_labels, apply(f, anchor.A), config.eval_per_label, seed)
    oracle = fit_knn(rest_X[oracle_rows], rest_y[oracle_rows], ORACLE_K)

    outcome = best_attack(scenario, oracle, config.mlp, seed)
    logger.info(
        f"{obfuscator.value} d_tilde={d_tilde} seed={seed}: best {outcome.kind.value} "
        f"({outcome.score:.4f}) with {scenario.n_leaked} leaked pairs"
    )
    row = {
        "obfuscator": obfuscator.value,
        "d_tilde": d_tilde,
        "seed": seed,
        "n_leaked": scenario.n_leaked,
        "best": outcome.kind.value,
        "best_score": outcome.score,
    }
    for kind, score in outcome.scores.items():
        row[kind.value] = np.nan if score is None else score
    return row
