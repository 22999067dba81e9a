from .audit import AttackOutcome, best_attack, reconstruction_accuracy, run_attack_condition
from .reconstructors import (
    AttackKind,
    LinearReconstructor,
    MLPReconstructor,
    Reconstructor,
    build_network,
    fit_lr,
    fit_mlp,
    fit_pinv,
)
from .scenario import AttackScenario, leak_by_label

ATTACK_COLUMNS = ["obfuscator", "d_tilde", "seed", "n_leaked", "best", "best_score"] + [k.value for k in AttackKind]
