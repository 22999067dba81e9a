from datetime import datetime, timezone
import json
import struct

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.errors import DatasetFormatError
from app.models.data import AnchorSet
from app.models.experiment import DatasetFormat, ExperimentSummary, Method, RunManifest, TrialResult
from app.pipeline.runner import summarize
from app.storage import ResultStorage, load_csv, load_dataset, load_idx_images, load_manifest


def _idx(path, magic, dims, payload):
    path.write_bytes(struct.pack(">I", magic) + struct.pack(f">{len(dims)}I", *dims) + bytes(payload))
    return path


def test_idx_images_are_flattened_and_scaled(tmp_path):
    images = _idx(tmp_path / "images.idx", 0x00000803, (1, 2, 2), [0, 255, 0, 255])
    labels = _idx(tmp_path / "labels.idx", 0x00000801, (1,), [7])
    assert_allclose(load_idx_images(images), [[0.0, 1.0, 0.0, 1.0]])
    X, y = load_dataset(images, DatasetFormat.IDX, labels_path=str(labels))
    assert X.shape == (1, 4) and y.tolist() == [7]


def test_idx_errors_name_the_offset(tmp_path):
    wrong = _idx(tmp_path / "wrong.idx", 0x00000801, (1, 2, 2), [0, 0, 0, 0])
    with pytest.raises(DatasetFormatError, match="offset 0"):
        load_idx_images(wrong)
    short = _idx(tmp_path / "short.idx", 0x00000803, (1, 2, 2), [0, 0])
    with pytest.raises(DatasetFormatError, match="truncated"):
        load_idx_images(short)


def test_csv_last_column_is_the_label(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1,2,3\n", encoding="utf-8")
    X, y = load_dataset(path)
    assert_array_equal(X, [[1.0, 2.0]])
    assert y.tolist() == [3] and y.dtype.kind == "i"
    X, y = load_csv(path, has_label=False)
    assert X.shape == (1, 3) and y is None


def test_csv_reports_non_numeric_cells(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3\n4,x,6\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError, match="line 2, column 2"):
        load_csv(path)
    with pytest.raises(DatasetFormatError, match="not found"):
        load_dataset(tmp_path / "missing.csv")


@pytest.fixture
def summary(small_config):
    trials = [
        TrialResult(method=Method.NKI, seed=s, per_party=[0.5, 0.75], mean=0.625, fit_ms=1.5, transform_ms=0.5)
        for s in range(2)
    ]
    return ExperimentSummary(
        config_hash=small_config.config_hash(),
        methods=[summarize(Method.NKI, "accuracy", trials)],
        trials=trials,
    )


def test_trials_csv_has_one_row_per_trial_and_party(tmp_path, small_config, summary):
    storage = ResultStorage(tmp_path, small_config)
    frame = pd.read_csv(storage.store_trials(summary))
    assert list(frame.columns) == ["config_hash", "method", "seed", "party", "metric", "value"]
    assert len(frame) == 4
    assert set(frame["config_hash"]) == {small_config.config_hash()}

    timings = pd.read_csv(storage.store_timings(summary))
    assert list(timings["fit_ms"]) == [1.5, 1.5]


def test_floats_are_written_with_round_trip_precision(tmp_path, small_config):
    storage = ResultStorage(tmp_path, small_config)
    path = storage.store_table("values.csv", [{"value": 0.1 + 0.2}], ["value"])
    assert float(path.read_text().splitlines()[1].split(",")[1]) == 0.1 + 0.2


def test_summary_and_manifest_round_trip(tmp_path, small_config, summary):
    storage = ResultStorage(tmp_path, small_config)
    manifest = storage.new_manifest(threads=1).model_copy(
        update={"trials": summary.trials, "finished_at": datetime.now(timezone.utc)}
    )
    path = storage.store_summary(summary, manifest)

    document = json.loads(path.read_text())
    assert document["config_hash"] == small_config.config_hash()
    assert document["methods"][0]["method"] == "NKI"
    restored = load_manifest(path)
    assert restored == manifest
    assert restored.config.config_hash() == small_config.config_hash()
    assert restored.environment["threads"] == "1"
    assert RunManifest.model_validate_json(manifest.model_dump_json()) == manifest


def test_anchor_csv_includes_labels(tmp_path, small_config):
    anchor = AnchorSet(A=np.eye(3), y_a=np.array([0, 1, 2]), source_count=3, neighbor_count=0)
    frame = pd.read_csv(ResultStorage(tmp_path, small_config).store_anchors(anchor))
    assert list(frame.columns) == ["config_hash", "f0", "f1", "f2", "label"]
    assert frame["label"].tolist() == [0, 1, 2]
