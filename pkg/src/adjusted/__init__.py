"""Adjusted concurrent objects: analysis, implementations, and benchmarks."""

from adjusted.igraph import (
    FACTORIAL_BOUND,
    IGraph,
    build_graph,
    classes,
    classify_pair,
    consensus_bound,
    dist_classify,
    export_graph,
    import_graph,
    is_left_mover,
    is_permissive,
    is_right_mover,
)
from adjusted.linearizer import (
    History,
    NotLinearizable,
    Recorder,
    Witness,
    check,
    history_from_jsonl,
    interface_spec,
    params_for_history,
    random_workload,
    record,
    stress_profile,
)
from adjusted.objects import ObjectConfig, make_object, object_ids
from adjusted.seqspec import (
    BOTTOM,
    VOID,
    AccessClass,
    AdjustReport,
    DataTypeSpec,
    OpInstance,
    OpTemplate,
    PermissionMap,
    SpecError,
    apply,
    apply_seq,
    catalog,
    check_adjusts,
    complies,
    make_bag,
)

__all__ = [
    "BOTTOM",
    "VOID",
    "AccessClass",
    "AdjustReport",
    "DataTypeSpec",
    "FACTORIAL_BOUND",
    "History",
    "IGraph",
    "NotLinearizable",
    "ObjectConfig",
    "OpInstance",
    "OpTemplate",
    "PermissionMap",
    "Recorder",
    "SpecError",
    "Witness",
    "apply",
    "apply_seq",
    "build_graph",
    "catalog",
    "check",
    "check_adjusts",
    "classes",
    "classify_pair",
    "complies",
    "consensus_bound",
    "dist_classify",
    "export_graph",
    "history_from_jsonl",
    "import_graph",
    "interface_spec",
    "is_left_mover",
    "is_permissive",
    "is_right_mover",
    "make_bag",
    "make_object",
    "object_ids",
    "params_for_history",
    "random_workload",
    "record",
    "stress_profile",
]

__version__ = "0.1.0"
