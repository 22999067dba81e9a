from .graphs import (
    GraphKind,
    GraphSpec,
    LaplacianPair,
    aggregate,
    build_laplacian_pair,
    knn_neighbors,
    laplacian,
    raw_weights,
    symmetrize,
)
from .kernel import (
    KernelIntegrationModel,
    KernelKind,
    KernelSpec,
    NKIVariant,
    apply_nki,
    build_M,
    fit_nki,
    kernel_matrix,
    kernel_objective,
    kernel_row,
)
from .linear import LinearIntegrationModel, apply_linear, fit_lki, linear_objective
from .solvers import CenteringReduction, centering_reduction, helmert_basis, solve_centered, solve_graph, solve_plain
