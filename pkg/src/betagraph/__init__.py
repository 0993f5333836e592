"""Maximum likelihood fitting and asymptotic inference for the beta-model of
undirected random graphs."""

from betagraph.fisher import (
    ApproxInverse,
    FisherMatrix,
    approx_error,
    build_s,
    build_v,
    exact_inverse,
)
from betagraph.graph import (
    BetaVector,
    DegreeSequence,
    Graph,
    GraphError,
    degree_sequence,
    edge_probability,
    parse_edge_list,
    sample_graph,
)
from betagraph.inference import (
    IntervalEstimate,
    ci_contrast,
    ci_coordinate,
    normal_quantile,
    se_beta,
    z_statistics,
)
from betagraph.montecarlo import (
    CoverageReport,
    Scenario,
    beta_grid,
    export_table1,
    run_scenario,
)
from betagraph.solver import (
    FitConfig,
    FitResult,
    Status,
    regular_closed_form,
    residual,
    solve_mle,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxInverse",
    "BetaVector",
    "CoverageReport",
    "DegreeSequence",
    "FisherMatrix",
    "FitConfig",
    "FitResult",
    "Graph",
    "GraphError",
    "IntervalEstimate",
    "Scenario",
    "Status",
    "approx_error",
    "beta_grid",
    "build_s",
    "build_v",
    "ci_contrast",
    "ci_coordinate",
    "degree_sequence",
    "edge_probability",
    "exact_inverse",
    "export_table1",
    "normal_quantile",
    "parse_edge_list",
    "regular_closed_form",
    "residual",
    "run_scenario",
    "sample_graph",
    "se_beta",
    "solve_mle",
    "z_statistics",
]
