"""Incremental process discovery over process trees with subtree freezing."""

from .alignments import (
    Alignment,
    Move,
    accepting_run,
    check_alignment,
    format_alignment,
    optimal_alignment,
)
from .errors import (
    ContractViolation,
    ExplosionError,
    FreezeSelectionError,
    LogFormatError,
    ParseError,
    SearchBudgetExceeded,
    TreeFreezeError,
)
from .freezing import (
    FrozenSelection,
    FrozenSubtree,
    TraceProjection,
    abstraction_tree,
    freeze,
    freeze_advanced,
    freeze_baseline,
    project_next,
    project_previous,
    reinsert_frozen,
    replace_frozen,
)
from .ipda import (
    IpdaRequest,
    apply_ipda,
    canned_ipda,
    get_ipda,
    reference_ipda,
    register_ipda,
    registered_ipdas,
)
from .logs import EventLog, from_traces, import_csv, import_xes_lite, load_log, variants
from . import running_example  # registers the worked-example discovery step
from .metrics import QualityReport, f_measure, fitness, precision, quality_report
from .semantics import (
    Cardinality,
    accepts,
    enabled_after,
    language_bounded,
    running_sequences_bounded,
    sta,
)
from .sessions import ALGORITHMS, FreezeSession, Snapshot, tree_payload
from .trees import (
    Operator,
    ProcessTree,
    activity,
    choice,
    is_subtree,
    lca,
    loop,
    parallel,
    parse_tree,
    reduce_tree,
    replace_node,
    sequence,
    serialize_tree,
    subtree_at,
    tau,
    to_dot,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
