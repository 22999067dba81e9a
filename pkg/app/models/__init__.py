from .data import AnchorSet, PartyDataset
from .experiment import (
    AnchorMode,
    DatasetFormat,
    ExperimentConfig,
    ExperimentSummary,
    FeatureScaling,
    Method,
    MethodSummary,
    MLPConfig,
    ObfuscatorKind,
    RunManifest,
    TaskMode,
    TrialResult,
)
