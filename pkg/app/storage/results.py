from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional
import json
import logging
import platform

import numpy as np
import pandas as pd
import scipy
import torch

from .. import __version__
from ..models.data import AnchorSet
from ..models.experiment import ExperimentConfig, ExperimentSummary, RunManifest

logger = logging.getLogger(__name__)

# Round-trip decimal formatting for every float written to CSV
FLOAT_FORMAT = "%.17g"


def environment_fingerprint(threads: Optional[int] = None) -> Dict[str, str]:
    fingerprint = {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "torch": torch.__version__,
        "threads": str(threads) if threads else "default",
    }
    return fingerprint


class ResultStorage:
    """Writes run artifacts under one output directory; every file carries the config hash"""

    def __init__(self, out_dir, config: ExperimentConfig):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.config_hash = config.config_hash()

    def _write_csv(self, name: str, rows: List[dict], columns: List[str]) -> Path:
        path = self.out_dir / name
        frame = pd.DataFrame(rows, columns=columns)
        frame.insert(0, "config_hash", self.config_hash)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    def store_trials(self, summary: ExperimentSummary) -> Path:
        """One row per trial x party"""
        rows = [
            {
                "method": trial.method.value,
                "seed": trial.seed,
                "party": party,
                "metric": trial.metric,
                "value": value,
            }
            for trial in summary.trials
            for party, value in enumerate(trial.per_party)
        ]
        return self._write_csv("trials.csv", rows, ["method", "seed", "party", "metric", "value"])

    def store_timings(self, summary: ExperimentSummary) -> Path:
        rows = [
            {"method": t.method.value, "seed": t.seed, "fit_ms": t.fit_ms, "transform_ms": t.transform_ms}
            for t in summary.trials
        ]
        return self._write_csv("timings.csv", rows, ["method", "seed", "fit_ms", "transform_ms"])

    def store_summary(self, summary: ExperimentSummary, manifest: RunManifest) -> Path:
        path = self.out_dir / "summary.json"
        document = {
            "config_hash": self.config_hash,
            "methods": [s.model_dump(mode="json") for s in summary.methods],
            "manifest": json.loads(manifest.model_dump_json()),
        }
        path.write_text(json.dumps(document, indent=2), encoding="utf-8")
        logger.info(f"Wrote summary to {path}")
        return path

    def store_table(self, name: str, rows: List[dict], columns: List[str]) -> Path:
        return self._write_csv(name, rows, columns)

    def store_anchors(self, anchor: AnchorSet) -> Path:
        columns = [f"f{j}" for j in range(anchor.A.shape[1])]
        rows = [dict(zip(columns, row)) for row in anchor.A]
        if anchor.y_a is not None:
            for row, label in zip(rows, anchor.y_a):
                row["label"] = label.item()
            columns.append("label")
        return self._write_csv("anchors.csv", rows, columns)

    def new_manifest(self, threads: Optional[int] = None) -> RunManifest:
        return RunManifest(
            config=self.config,
            config_hash=self.config_hash,
            environment=environment_fingerprint(threads),
            started_at=datetime.now(timezone.utc),
        )


def load_manifest(path) -> RunManifest:
    document = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunManifest.model_validate(document["manifest"])
