import json

import numpy as np
import pytest

from app.models.experiment import ExperimentConfig, Method


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def random_orthonormal(rng):
    """Draws n x k matrices with orthonormal columns from the test's generator"""

    def draw(n, k):
        Q, R = np.linalg.qr(rng.standard_normal((n, k)))
        return Q * np.sign(np.diag(R))

    return draw


@pytest.fixture
def party_anchors(rng):
    """Three parties' intermediate views of a 15-row anchor set"""
    return [rng.standard_normal((15, 3)) for _ in range(3)]


@pytest.fixture
def labeled_anchors(rng):
    A = rng.standard_normal((24, 3))
    y = np.repeat([0, 1, 2], 8)
    views = [A @ rng.standard_normal((3, 3)) + 0.1 * rng.standard_normal((24, 3)) for _ in range(2)]
    return views, y


def small_config_dict(**overrides):
    document = {
        "synthetic_size": 400,
        "synthetic_dim": 6,
        "K": 2,
        "n_per_party": 30,
        "test_total": 60,
        "d_tilde": 3,
        "n_a": 40,
        "n_a_smote": 12,
        "k_nn": 5,
        "methods": ["Local", "Central", "LKI", "NKI"],
        "n_seed": 1,
        "mlp": {"max_epochs": 5},
    }
    document.update(overrides)
    return document


@pytest.fixture
def small_config():
    return ExperimentConfig.model_validate(small_config_dict())


@pytest.fixture
def all_methods():
    return list(Method)


@pytest.fixture
def config_file(tmp_path):
    def write(**overrides):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(small_config_dict(**overrides)), encoding="utf-8")
        return path

    return write
