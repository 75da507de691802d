"""Semantic edit distance between SQL queries, with grading and feedback."""

from .ast_nodes import (
    AggregateKind,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    Clause,
    ColumnReference,
    Constant,
    EMPTY_QUERY,
    Expression,
    FromElement,
    HashValue,
    JoinType,
    Not,
    OrderByElement,
    QueryAst,
    SelectElement,
    SortDirection,
    canonical_equal,
    render,
    replace_expressions,
    structural_hash,
)
from .edits import (
    Edit,
    EditCategory,
    EditSet,
    apply_edit,
    default_edit_set,
    parse_cost_overrides,
)
from .grading import (
    FeedbackReport,
    GradingConfig,
    PathNotFound,
    build_report,
    format_report,
    grade,
    report_to_dict,
)
from .meta import ComponentKind, DepthInfo, MetaInfo, ValueSets, build_meta_info, remaining_depth
from .parser import ParseError, parse_query, parse_schema
from .schema import (
    ExecutabilityError,
    Schema,
    SchemaDeductionError,
    Table,
    check_executable,
    deduce_schema,
    restrict_schema,
)
from .search import (
    NonExecutableDestination,
    PathStep,
    SearchResult,
    SearchStatus,
    difficulty,
    progress,
    shortest_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateKind",
    "AggregationFunction",
    "Asterisk",
    "BinaryExpression",
    "BinaryOp",
    "Clause",
    "ColumnReference",
    "ComponentKind",
    "Constant",
    "DepthInfo",
    "EMPTY_QUERY",
    "Edit",
    "EditCategory",
    "EditSet",
    "ExecutabilityError",
    "Expression",
    "FeedbackReport",
    "FromElement",
    "GradingConfig",
    "HashValue",
    "JoinType",
    "MetaInfo",
    "NonExecutableDestination",
    "Not",
    "OrderByElement",
    "ParseError",
    "PathNotFound",
    "PathStep",
    "QueryAst",
    "Schema",
    "SchemaDeductionError",
    "SearchResult",
    "SearchStatus",
    "SelectElement",
    "SortDirection",
    "Table",
    "ValueSets",
    "apply_edit",
    "build_meta_info",
    "build_report",
    "canonical_equal",
    "check_executable",
    "deduce_schema",
    "default_edit_set",
    "difficulty",
    "format_report",
    "grade",
    "parse_cost_overrides",
    "parse_query",
    "parse_schema",
    "progress",
    "remaining_depth",
    "render",
    "replace_expressions",
    "report_to_dict",
    "restrict_schema",
    "shortest_distance",
    "structural_hash",
]
