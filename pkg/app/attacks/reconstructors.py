from enum import Enum
from typing import List, Optional, Union
import copy
import logging
import math

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg

from ..errors import DimensionMismatchError, TooFewLeaksError
from ..models.experiment import MLPConfig
from ..utils.rng import stream
from .scenario import AttackScenario

logger = logging.getLogger(__name__)

MIN_LINEAR_LEAKS = 2
MIN_MLP_LEAKS = 10


class AttackKind(str, Enum):
    LR = "LR"
    PINV = "PINV"
    MLP = "MLP"


def _check_input(X_tilde: np.ndarray, d_tilde: int) -> np.ndarray:
    X_tilde = np.atleast_2d(np.asarray(X_tilde, dtype=float))
    if X_tilde.shape[1] != d_tilde:
        raise DimensionMismatchError(f"Reconstructor expects {d_tilde} columns, got {X_tilde.shape[1]}")
    return X_tilde


class LinearReconstructor(BaseModel):
    """x_hat = (x_tilde - tilde_mean) W + A_mean; PINV also keeps its estimated forward map"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: AttackKind
    tilde_mean: np.ndarray
    A_mean: np.ndarray
    W: np.ndarray
    forward_map: Optional[np.ndarray] = None

    @property
    def d_tilde(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]

    def reconstruct(self, X_tilde: np.ndarray) -> np.ndarray:
        return (_check_input(X_tilde, self.d_tilde) - self.tilde_mean) @ self.W + self.A_mean


class MLPReconstructor(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: AttackKind
    network: torch.nn.Module
    d_tilde: int
    d: int
    history: List[float] = Field(default_factory=list)
    epochs_run: int = 0

    def reconstruct(self, X_tilde: np.ndarray) -> np.ndarray:
        X_tilde = _check_input(X_tilde, self.d_tilde)
        with torch.no_grad():
            return self.network(torch.from_numpy(X_tilde)).numpy()


Reconstructor = Union[LinearReconstructor, MLPReconstructor]


def _centered(scenario: AttackScenario):
    if scenario.n_leaked < MIN_LINEAR_LEAKS:
        raise TooFewLeaksError(f"Need at least {MIN_LINEAR_LEAKS} leaked pairs, got {scenario.n_leaked}")
    A_mean = scenario.leaked_A.mean(axis=0)
    tilde_mean = scenario.leaked_A_tilde.mean(axis=0)
    return scenario.leaked_A - A_mean, scenario.leaked_A_tilde - tilde_mean, A_mean, tilde_mean


def fit_lr(scenario: AttackScenario) -> LinearReconstructor:
    """Centered minimum-norm least squares from intermediate to original space"""
    A_c, tilde_c, A_mean, tilde_mean = _centered(scenario)
    W, *_ = linalg.lstsq(tilde_c, A_c)
    return LinearReconstructor(kind=AttackKind.LR, tilde_mean=tilde_mean, A_mean=A_mean, W=W)


def fit_pinv(scenario: AttackScenario) -> LinearReconstructor:
    """Estimate the forward map by centered least squares, then invert it with the pseudoinverse"""
    A_c, tilde_c, A_mean, tilde_mean = _centered(scenario)
    F_hat, *_ = linalg.lstsq(A_c, tilde_c)
    return LinearReconstructor(
        kind=AttackKind.PINV,
        tilde_mean=tilde_mean,
        A_mean=A_mean,
        W=linalg.pinv(F_hat),
        forward_map=F_hat,
    )


def _glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> torch.Tensor:
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    # torch stores Linear weights as (out, in)
    return torch.from_numpy(rng.uniform(-bound, bound, size=(fan_out, fan_in)))


def build_network(d_tilde: int, d: int, hidden: int, rng: np.random.Generator) -> torch.nn.Module:
    network = torch.nn.Sequential(
        torch.nn.Linear(d_tilde, hidden),
        torch.nn.ReLU(),
        torch.nn.Linear(hidden, d),
    ).double()
    with torch.no_grad():
        for layer in (network[0], network[2]):
            layer.weight.copy_(_glorot_uniform(rng, layer.in_features, layer.out_features))
            layer.bias.zero_()
    return network


def fit_mlp(scenario: AttackScenario, cfg: Optional[MLPConfig] = None, seed: int = 0) -> MLPReconstructor:
    """
    One-hidden-layer ReLU network trained with Adam on the leaked pairs.

    A seeded split holds out `validation_fraction` of the leaks. Training is
    full-batch when there are at most `full_batch_limit` leaked pairs and
    uses mini-batches of `batch_size` otherwise. It stops once validation MSE
    has not improved by `tolerance` for `patience` epochs. The best validation
    weights are restored.
    """
    cfg = cfg or MLPConfig()
    if scenario.n_leaked < MIN_MLP_LEAKS:
        raise TooFewLeaksError(f"MLP attack needs at least {MIN_MLP_LEAKS} leaked pairs, got {scenario.n_leaked}")

    init_rng = stream(seed, "mlp", purpose="init")
    split_rng = stream(seed, "mlp", purpose="split")
    batch_rng = stream(seed, "mlp", purpose="batches")

    X = torch.from_numpy(np.asarray(scenario.leaked_A_tilde, dtype=float))
    Y = torch.from_numpy(np.asarray(scenario.leaked_A, dtype=float))
    order = split_rng.permutation(scenario.n_leaked)
    n_val = max(1, int(round(cfg.validation_fraction * scenario.n_leaked)))
    val_idx, train_idx = order[:n_val], order[n_val:]
    X_train, Y_train = X[train_idx], Y[train_idx]
    X_val, Y_val = X[val_idx], Y[val_idx]

    network = build_network(scenario.d_tilde, scenario.d, cfg.hidden, init_rng)
    optimizer = torch.optim.Adam(
        network.parameters(), lr=cfg.learning_rate, betas=(cfg.beta1, cfg.beta2), eps=cfg.adam_eps
    )
    loss_fn = torch.nn.MSELoss()
    batch_size = len(train_idx) if scenario.n_leaked <= cfg.full_batch_limit else cfg.batch_size

    best_val = math.inf
    best_state = copy.deepcopy(network.state_dict())
    history: List[float] = []
    stale = 0
    epoch = 0
    for epoch in range(1, cfg.max_epochs + 1):
        network.train()
        perm = torch.from_numpy(batch_rng.permutation(len(train_idx)))
        for start in range(0, len(train_idx), batch_size):
            batch = perm[start : start + batch_size]
            optimizer.zero_grad()
            loss = loss_fn(network(X_train[batch]), Y_train[batch])
            loss.backward()
            optimizer.step()

        network.eval()
        with torch.no_grad():
            val_loss = loss_fn(network(X_val), Y_val).item()
        if val_loss < best_val - cfg.tolerance:
            best_val = val_loss
            best_state = copy.deepcopy(network.state_dict())
            stale = 0
        else:
            stale += 1
        history.append(best_val)
        if stale >= cfg.patience:
            logger.debug(f"MLP attack stopped early at epoch {epoch} (best val MSE {best_val:.6g})")
            break

    network.load_state_dict(best_state)
    network.eval()
    return MLPReconstructor(
        kind=AttackKind.MLP,
        network=network,
        d_tilde=scenario.d_tilde,
        d=scenario.d,
        history=history,
        epochs_run=epoch,
    )
