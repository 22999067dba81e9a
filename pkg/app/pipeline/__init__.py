from .bench import BenchRow, bench_scaling, loglog_slope
from .data import Pool, load_pool, scale_features
from .methods import PLANS, IntegrationPlan, collaboration_representations, fit_integration, graph_spec
from .partition import partition
from .runner import (
    TrialContext,
    build_anchor,
    evaluate_method,
    prepare_trial,
    run_experiment,
    run_trial,
    split_trial_pool,
    summarize,
)
from .synthetic import make_synthetic
