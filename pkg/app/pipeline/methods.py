from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import MissingLabelError
from ..integration import (
    GraphKind,
    GraphSpec,
    KernelIntegrationModel,
    KernelSpec,
    LaplacianPair,
    LinearIntegrationModel,
    NKIVariant,
    apply_linear,
    apply_nki,
    build_laplacian_pair,
    fit_lki,
    fit_nki,
)
from ..models.experiment import ExperimentConfig, Method, TaskMode

IntegrationModel = Union[LinearIntegrationModel, KernelIntegrationModel]


class IntegrationPlan(BaseModel):
    """How one integration method is fitted: variant plus the graphs feeding B and C"""
    model_config = ConfigDict(frozen=True)

    variant: Optional[NKIVariant]
    b_graph: Optional[GraphKind] = None
    c_graph: Optional[GraphKind] = None

    @property
    def is_linear(self) -> bool:
        return self.variant is None


PLANS = {
    Method.LKI: IntegrationPlan(variant=None),
    Method.NKI: IntegrationPlan(variant=NKIVariant.PLAIN),
    Method.NKI_CENTER: IntegrationPlan(variant=NKIVariant.CENTERED),
    Method.NKI_GL: IntegrationPlan(variant=NKIVariant.GRAPH, b_graph=GraphKind.GL),
    Method.NKI_GL_CENTER: IntegrationPlan(variant=NKIVariant.GRAPH_CENTERED, b_graph=GraphKind.GL),
    Method.NKI_TSL: IntegrationPlan(variant=NKIVariant.GRAPH, b_graph=GraphKind.TSL),
    Method.NKI_TSL_CENTER: IntegrationPlan(variant=NKIVariant.GRAPH_CENTERED, b_graph=GraphKind.TSL),
    Method.NKI_TDL: IntegrationPlan(variant=NKIVariant.GRAPH, b_graph=GraphKind.TSL, c_graph=GraphKind.TDL),
}


def graph_spec(kind: GraphKind, config: ExperimentConfig) -> GraphSpec:
    # sigma_y only enters label graphs built on real-valued targets
    smooth = config.task_mode == TaskMode.REGRESSION and kind != GraphKind.GL
    return GraphSpec(
        kind=kind,
        task_mode=config.task_mode,
        k_nn=config.k_nn,
        sigma_y=config.sigma_y if smooth else None,
    )


def laplacian_pair_for(
    plan: IntegrationPlan,
    anchors_tilde: Sequence[np.ndarray],
    y_a: Optional[np.ndarray],
    config: ExperimentConfig,
) -> Optional[LaplacianPair]:
    if plan.b_graph is None:
        if plan.variant == NKIVariant.CENTERED:
            return LaplacianPair.empty(anchors_tilde[0].shape[0], config.epsilon)
        return None
    return build_laplacian_pair(
        list(anchors_tilde),
        y_a,
        graph_spec(plan.b_graph, config),
        graph_spec(plan.c_graph, config) if plan.c_graph else None,
        mu=config.mu,
        epsilon=config.epsilon,
    )


def fit_integration(
    method: Method,
    anchors_tilde: Sequence[np.ndarray],
    y_a: Optional[np.ndarray],
    config: ExperimentConfig,
) -> IntegrationModel:
    """Fit the integration functions g_k of one DC method on the parties' anchor views"""
    if method not in PLANS:
        raise ValueError(f"{method.value} is a baseline, not an integration method")
    if method.needs_labels and y_a is None:
        raise MissingLabelError(f"{method.value} needs anchor labels but the anchor set has none")

    plan = PLANS[method]
    if plan.is_linear:
        return fit_lki(anchors_tilde, config.d_hat)
    return fit_nki(
        anchors_tilde,
        KernelSpec(gamma=config.gamma),
        config.lam,
        config.d_hat,
        variant=plan.variant,
        pair=laplacian_pair_for(plan, anchors_tilde, y_a, config),
    )


def integration_map(model: IntegrationModel) -> Callable[[int, np.ndarray], np.ndarray]:
    if isinstance(model, LinearIntegrationModel):
        return lambda k, X_tilde: apply_linear(model, k, X_tilde)
    return lambda k, X_tilde: apply_nki(model, k, X_tilde)


def collaboration_representations(model: IntegrationModel, per_party_tilde: Sequence[np.ndarray]) -> List[np.ndarray]:
    g = integration_map(model)
    return [g(k, X_tilde) for k, X_tilde in enumerate(per_party_tilde)]
