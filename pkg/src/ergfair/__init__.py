"""Group social capital from effective resistance, structural group unfairness,
and its mitigation by budgeted edge augmentation."""

__version__ = "0.1.0"

from .graph import (
    UNKNOWN,
    AttributedGraph,
    GraphError,
    GroupPartition,
    add_edge,
    is_connected,
    largest_connected_component,
    partition_by_attribute,
)
from .io import ParseError, load_graph, read_attributes, read_edge_list, write_graph
from .spectral import (
    LaplacianState,
    SingularLaplacianError,
    commute_time_embedding,
    effective_resistance,
    laplacian_state,
    oracle_resistance,
    pseudo_inverse,
    resistance_matrix,
    spectral_gap,
    woodbury_update,
)
from .metrics import (
    DisparityReport,
    GraphSummary,
    GroupMetrics,
    NodeMetrics,
    disparity_report,
    graph_summary,
    group_metrics,
    node_metrics,
)
from .intervention import (
    InterventionConfig,
    InterventionTrace,
    Strategy,
    adjacency_cosine,
    baseline_cos,
    baseline_random,
    erg_link,
    pareto_points,
    run_intervention,
    strong_variant,
)
