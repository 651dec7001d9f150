"""cfsynth: learn spreadsheet conditional-formatting rules from examples.

Mark a handful of cells with a format, and the engine infers ranked,
executable rules (boolean combinations of simple cell conditions) that
reproduce the marking and generalize it to the rest of the column. Rules
round-trip through JSON and render as spreadsheet formulas.

Typical library use::

    from cfsynth import Annotation, SuggestRequest, build_column, suggest

    column = build_column("id", ["GW2-T", "AN51-T", "GW18", "GW50-T"])
    response = suggest(
        SuggestRequest(column=column, annotation=Annotation(((2, "bold"),)))
    )
    best = response.suggestions["bold"][0]
    print(best.formula)
"""

from .clustering import Clustering, cluster, distance
from .engine import (
    ApplyResult,
    Diagnostics,
    SuggestRequest,
    SuggestResponse,
    apply,
    oracle_search,
    suggest,
)
from .errors import (
    CfSynthError,
    Degenerate,
    EmptyCluster,
    EmptyTable,
    InvalidAnnotation,
    MalformedInput,
    NoCandidates,
    NoExamples,
    NoPositiveLeaf,
    NoPredicates,
    PoolTooLarge,
    SchemaError,
    TypeMismatch,
    Unsatisfiable,
)
from .predicates import (
    Predicate,
    PredicateKind,
    Provenance,
    column_mask,
    evaluate,
    generate_predicates,
    predicate_from_json,
    predicate_to_json,
    signatures,
)
from .ranking import (
    FeatureVector,
    RankedSuggestion,
    RankerWeights,
    default_weights,
    featurize,
    load_weights,
    rank,
)
from .rules import (
    Literal,
    Rule,
    canonicalize,
    emit_formula,
    execute,
    mask_to_bools,
    parse_rule,
    rule_to_json,
)
from .service import ServiceConfig, create_app, resolve_weights, serve
from .synthesis import (
    Candidate,
    CandidateSet,
    SynthesisConfig,
    TreeNode,
    enumerate_candidates,
    learn_tree,
    tree_to_rule,
)
from .table import (
    Annotation,
    CellValue,
    ColumnType,
    LabelKind,
    PositionalLabeling,
    RowLabel,
    SourceRef,
    TypedColumn,
    annotation_from_json,
    build_column,
    infer_type,
    lowercase_column,
    parse_number,
    parse_table,
    parse_timestamp,
    positional_labels,
    resolve_column,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "ApplyResult",
    "Candidate",
    "CandidateSet",
    "CellValue",
    "CfSynthError",
    "Clustering",
    "ColumnType",
    "Degenerate",
    "Diagnostics",
    "EmptyCluster",
    "EmptyTable",
    "FeatureVector",
    "InvalidAnnotation",
    "LabelKind",
    "Literal",
    "MalformedInput",
    "NoCandidates",
    "NoExamples",
    "NoPositiveLeaf",
    "NoPredicates",
    "PoolTooLarge",
    "PositionalLabeling",
    "Predicate",
    "PredicateKind",
    "Provenance",
    "RankedSuggestion",
    "RankerWeights",
    "RowLabel",
    "Rule",
    "SchemaError",
    "ServiceConfig",
    "SourceRef",
    "SuggestRequest",
    "SuggestResponse",
    "SynthesisConfig",
    "TreeNode",
    "TypeMismatch",
    "TypedColumn",
    "Unsatisfiable",
    "annotation_from_json",
    "apply",
    "build_column",
    "canonicalize",
    "cluster",
    "column_mask",
    "create_app",
    "default_weights",
    "distance",
    "emit_formula",
    "enumerate_candidates",
    "evaluate",
    "execute",
    "featurize",
    "generate_predicates",
    "infer_type",
    "learn_tree",
    "load_weights",
    "lowercase_column",
    "mask_to_bools",
    "oracle_search",
    "parse_number",
    "parse_rule",
    "parse_table",
    "parse_timestamp",
    "positional_labels",
    "predicate_from_json",
    "predicate_to_json",
    "rank",
    "resolve_column",
    "resolve_weights",
    "rule_to_json",
    "serve",
    "signatures",
    "suggest",
    "tree_to_rule",
]
