from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional
import hashlib
import json

from pydantic import BaseModel, ConfigDict, Field, model_validator


class TaskMode(str, Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


class DatasetFormat(str, Enum):
    CSV = "csv"
    IDX = "idx"


class FeatureScaling(str, Enum):
    NONE = "none"
    MINMAX = "minmax"
    STANDARDIZE = "standardize"


class ObfuscatorKind(str, Enum):
    PCA = "PCA"
    KPCA = "KPCA"


class AnchorMode(str, Enum):
    SMOTE = "smote"
    REAL = "real"


class Method(str, Enum):
    LOCAL = "Local"
    CENTRAL = "Central"
    LKI = "LKI"
    NKI = "NKI"
    NKI_CENTER = "NKI_Center"
    NKI_GL = "NKI_GL"
    NKI_GL_CENTER = "NKI_GL_Center"
    NKI_TSL = "NKI_TSL"
    NKI_TSL_CENTER = "NKI_TSL_Center"
    NKI_TDL = "NKI_TDL"

    @property
    def is_baseline(self) -> bool:
        return self in (Method.LOCAL, Method.CENTRAL)

    @property
    def needs_labels(self) -> bool:
        return self in (Method.NKI_TSL, Method.NKI_TSL_CENTER, Method.NKI_TDL)


class MLPConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hidden: int = 128
    max_epochs: int = Field(600, ge=0)
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    patience: int = 10
    tolerance: float = 1e-6
    validation_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    full_batch_limit: int = 256
    batch_size: int = 64


class ExperimentConfig(BaseModel):
    """Flat experiment configuration; one JSON document per run"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    # Data source
    dataset: str = "synthetic"
    dataset_format: DatasetFormat = DatasetFormat.CSV
    labels_path: Optional[str] = None
    has_label: bool = True
    task_mode: TaskMode = TaskMode.CLASSIFICATION
    feature_scaling: Optional[FeatureScaling] = None
    synthetic_size: int = Field(2000, ge=1)
    synthetic_dim: int = Field(20, ge=2)
    synthetic_classes: int = Field(3, ge=1)
    synthetic_seed: int = 0

    # Parties and dimensions
    K: int = Field(4, ge=1)
    n_per_party: int = Field(60, ge=2)
    test_total: Optional[int] = None
    d_tilde: int = Field(4, ge=1)
    d_hat: Optional[int] = None

    # Anchors
    n_a: int = Field(200, ge=2)
    n_a_smote: int = Field(60, ge=1)
    k_nn: int = Field(10, ge=1)
    balanced: bool = False
    anchor_mode: AnchorMode = AnchorMode.SMOTE

    # Methods and parameters
    methods: List[Method] = Field(default_factory=lambda: [Method.NKI])
    obfuscator: ObfuscatorKind = ObfuscatorKind.KPCA
    kpca_spread: float = Field(10.0, ge=1.0)
    gamma: float = Field(1.0, gt=0.0)
    lam: float = Field(1.0, gt=0.0, alias="lambda")
    mu: float = Field(1.0, ge=0.0)
    epsilon: float = Field(1e-8, ge=0.0)
    sigma_y: float = Field(1.0, gt=0.0)
    downstream_k: int = Field(5, ge=1)

    # Trials
    seed: int = 0
    n_seed: int = Field(1, ge=1)
    jobs: int = Field(1, ge=1)

    # Reconstruction attacks
    leak_labels: List[int] = Field(default_factory=lambda: [0])
    eval_per_label: int = Field(50, ge=1)
    oracle_size: int = Field(500, ge=1)
    attack_obfuscators: List[ObfuscatorKind] = Field(
        default_factory=lambda: [ObfuscatorKind.PCA, ObfuscatorKind.KPCA]
    )
    attack_d_tildes: List[int] = Field(default_factory=list)
    mlp: MLPConfig = Field(default_factory=MLPConfig)

    # Scaling benchmark
    bench_n_a: List[int] = Field(default_factory=lambda: [200, 400, 800])

    @model_validator(mode="after")
    def _fill_defaults(self):
        if self.d_hat is None:
            self.d_hat = self.d_tilde
        if self.test_total is None:
            self.test_total = self.n_per_party * self.K
        if self.feature_scaling is None:
            if self.task_mode == TaskMode.REGRESSION:
                self.feature_scaling = FeatureScaling.STANDARDIZE
            elif self.dataset_format == DatasetFormat.IDX:
                # IDX pixels arrive already divided by 255
                self.feature_scaling = FeatureScaling.NONE
            else:
                self.feature_scaling = FeatureScaling.MINMAX
        if not self.attack_d_tildes:
            self.attack_d_tildes = [self.d_tilde]
        if not self.methods:
            raise ValueError("methods must name at least one method")
        return self

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def metric(self) -> str:
        return "rmse" if self.task_mode == TaskMode.REGRESSION else "accuracy"


class TrialResult(BaseModel):
    method: Method
    seed: int
    metric: str = "accuracy"
    per_party: List[float]
    mean: float
    fit_ms: float = 0.0
    transform_ms: float = 0.0

    @model_validator(mode="after")
    def _accuracy_range(self):
        if self.metric == "accuracy" and any(not 0.0 <= v <= 1.0 for v in self.per_party):
            raise ValueError(f"Accuracies must lie in [0, 1], got {self.per_party}")
        return self


class MethodSummary(BaseModel):
    method: Method
    metric: str
    n_trials: int
    mean: float
    ci: float
    degenerate: bool
    fit_ms_mean: float
    fit_ms_ci: float
    transform_ms_mean: float
    transform_ms_ci: float


class ExperimentSummary(BaseModel):
    config_hash: str
    methods: List[MethodSummary]
    trials: List[TrialResult]

    def for_method(self, method: Method) -> MethodSummary:
        return next(s for s in self.methods if s.method == method)


class RunManifest(BaseModel):
    config: ExperimentConfig
    config_hash: str
    trials: List[TrialResult] = Field(default_factory=list)
    environment: Dict[str, str] = Field(default_factory=dict)
    started_at: datetime
    finished_at: Optional[datetime] = None
