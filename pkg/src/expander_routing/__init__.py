"""Online edge-disjoint path routing in regular expander graphs."""

from .errors import (
    CallerError,
    ExpansionViolation,
    FormatError,
    GenerationError,
    RoutingError,
)
from .expanders import (
    ExpansionReport,
    SpectralReport,
    check_expansion_exhaustive,
    estimate_second_eigenvalue,
    gen_random_regular_digraph,
    gen_random_regular_graph,
)
from .graph import (
    Digraph,
    EdgeSubset,
    UndirectedGraph,
    boundary_counts,
    edges_within,
    format_graph,
    load_graph,
    parse_graph,
    reverse,
    save_graph,
)
from .harness import (
    RunReport,
    TraceCommand,
    gen_workload,
    parse_trace,
    run_trace,
    validate_trace,
)
from .oracle import AuditReport, EdgeOracle
from .preprocess import (
    SplitResult,
    eulerian_orient,
    extract_perfect_matching,
    pre_process,
    split_regular,
)
from .profiles import (
    OracleProfile,
    RouterProfile,
    canonical_oracle_profile,
    derive_profile,
    desk_profile,
    load_profile,
    save_profile,
)
from .router import PathRecord, RoutingEngine, VerifyReport

__version__ = "0.1.0"
