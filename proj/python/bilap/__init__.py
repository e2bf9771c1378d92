"""Bi-Laplacian operators on discrete graphs and metric networks.

Thin python surface over the compiled core: graph presets, the discrete
bi-Laplacian and its semigroup, self-adjoint vertex conditions, the
Hermite finite element discretization and the qualitative classifiers.
"""

from ._core import (  # noqa: F401
    BilapNumericalError,
    BilapValidationError,
    ConditionCB,
    ConditionYR,
    Graph,
    MetricGraph,
    ReducedSystem,
    __version__,
    assemble,
    assemble_laplacian_ck,
    bilaplacian_eigenvalues,
    bilaplacian_matrix,
    cb_to_yr,
    classify_discrete,
    conditions_equal,
    connected_graph_count,
    connected_graphs,
    discrete_semigroup,
    discrete_transition_time,
    equilateral,
    kappa,
    laplacian_matrix,
    lp_dissipativity_scan,
    markov_character,
    preset_conditions,
    preset_graph,
    spectral_gap_bounds,
    ultracontractivity_slope,
    yr_to_cb,
)
