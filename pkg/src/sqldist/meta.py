"""Destination-derived bounds that make the implicit search graph finite.

Per clause and per component kind, the destination's component count plus a
slack becomes a hard limit on what edits may create. Value sets (columns,
constants, operators, ...) are likewise read off the destination and the
restricted schema. Together they bound the number of nodes below any given
distance without cutting shortest paths (the slack default of 1 admits one
detour component per kind per clause).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ast_nodes import (
    ALL_CLAUSES,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    Clause,
    ColumnReference,
    Constant,
    JoinType,
    Not,
    QueryAst,
    clause_expression_roots,
    iter_expr_nodes,
)
from .schema import Schema, restrict_schema


class ComponentKind(Enum):
    COLUMN_REFERENCE = "columnReference"
    AGGREGATION = "aggregation"
    BINARY_EXPRESSION = "binaryExpression"
    NOT = "not"
    CONSTANT = "constant"
    ASTERISK = "asterisk"


_N_KINDS = len(ComponentKind)
_KIND_INDEX = {kind: i for i, kind in enumerate(ComponentKind)}
_CLAUSE_INDEX = {clause: i for i, clause in enumerate(ALL_CLAUSES)}

# flat index of (clause, kind) into the measure tuples below
_TYPE_KIND_INDEX = {
    ColumnReference: _KIND_INDEX[ComponentKind.COLUMN_REFERENCE],
    AggregationFunction: _KIND_INDEX[ComponentKind.AGGREGATION],
    BinaryExpression: _KIND_INDEX[ComponentKind.BINARY_EXPRESSION],
    Not: _KIND_INDEX[ComponentKind.NOT],
    Constant: _KIND_INDEX[ComponentKind.CONSTANT],
    Asterisk: _KIND_INDEX[ComponentKind.ASTERISK],
}

LIST_NAMES = ("selectElements", "fromElements", "groupByElements", "orderByElements")


@dataclass(frozen=True)
class QueryMeasures:
    """Component counts, expression levels and list lengths of one query.

    ``kind_counts`` is flat: entry ``clause_index * len(ComponentKind) +
    kind_index``; ``levels`` is indexed by clause.
    """

    kind_counts: tuple
    levels: tuple
    list_lengths: tuple


def measure_query(q: QueryAst) -> QueryMeasures:
    cached = q.__dict__.get("_measures")
    if cached is not None:
        return cached
    counts = [0] * (len(ALL_CLAUSES) * _N_KINDS)
    levels = [0] * len(ALL_CLAUSES)
    for clause_index, clause in enumerate(ALL_CLAUSES):
        base = clause_index * _N_KINDS
        deepest = 0
        for root in clause_expression_roots(q, clause):
            if root is None:
                continue
            stack = [(root, 1)]
            while stack:
                node, level = stack.pop()
                counts[base + _TYPE_KIND_INDEX[type(node)]] += 1
                if level > deepest:
                    deepest = level
                t = type(node)
                if t is BinaryExpression:
                    if node.left is not None:
                        stack.append((node.left, level + 1))
                    if node.right is not None:
                        stack.append((node.right, level + 1))
                elif t is Not or t is AggregationFunction:
                    if node.inner is not None:
                        stack.append((node.inner, level + 1))
        levels[clause_index] = deepest
    measures = QueryMeasures(
        tuple(counts),
        tuple(levels),
        (len(q.select_elements), len(q.from_elements), len(q.group_by), len(q.order_by)),
    )
    object.__setattr__(q, "_measures", measures)
    return measures


@dataclass(frozen=True)
class DepthInfo:
    """Limits per (clause, component kind), expression levels, list lengths.

    The flat tuples mirror QueryMeasures for cheap comparison; the mapping
    views keyed by enums are the readable interface.
    """

    kind_limits: tuple
    level_limits: tuple
    list_limits: tuple

    def kind_limit(self, clause: Clause, kind: ComponentKind) -> int:
        return self.kind_limits[_CLAUSE_INDEX[clause] * _N_KINDS + _KIND_INDEX[kind]]

    def level_limit(self, clause: Clause) -> int:
        return self.level_limits[_CLAUSE_INDEX[clause]]

    def list_limit(self, name: str) -> int:
        return self.list_limits[LIST_NAMES.index(name)]

    def max_position_depth(self, clause: Clause) -> int:
        """Deepest expression position edits may still fill in this clause."""
        return self.level_limits[_CLAUSE_INDEX[clause]] - 1


@dataclass(frozen=True)
class ValueSets:
    table_names: tuple
    columns_by_table: dict
    constants: tuple
    aggregation_kinds: tuple
    operators: tuple
    join_types: tuple
    from_aliases: tuple
    select_aliases: tuple
    # per-clause refinements: only values the destination uses in a clause
    # are worth creating there
    constants_by_clause: dict
    operators_by_clause: dict
    aggregation_kinds_by_clause: dict
    has_qualified_columns: bool
    has_qualified_asterisks: bool


@dataclass(frozen=True)
class MetaInfo:
    depth: DepthInfo
    values: ValueSets
    full_schema: Schema
    restricted_schema: Schema
    usage: dict
    slack: int


def _dedup(items) -> tuple:
    seen = []
    for item in items:
        if item not in seen:
            seen.append(item)
    return tuple(seen)


def build_meta_info(destination: QueryAst, schema: Schema, slack: int = 1) -> MetaInfo:
    """Bounds for a search toward ``destination``; requires it executable.

    Every depth limit is the destination's own measure plus ``slack``; value
    sets hold exactly the values occurring in the destination plus the
    restricted schema's tables and columns. Constants never come from the
    schema.
    """
    if slack < 0:
        raise ValueError("slack must be non-negative")
    measures = measure_query(destination)
    depth = DepthInfo(
        kind_limits=tuple(count + slack for count in measures.kind_counts),
        level_limits=tuple(level + slack for level in measures.levels),
        list_limits=tuple(length + slack for length in measures.list_lengths),
    )

    restricted = restrict_schema(schema, destination)

    constants_by_clause: dict = {}
    operators_by_clause: dict = {}
    kinds_by_clause: dict = {}
    has_qualified_columns = False
    has_qualified_asterisks = False
    for clause in ALL_CLAUSES:
        constants: list = []
        operators: list = []
        kinds: list = []
        for root in clause_expression_roots(destination, clause):
            for node, _ in iter_expr_nodes(root):
                if isinstance(node, Constant):
                    constants.append(node.value)
                elif isinstance(node, AggregationFunction):
                    kinds.append(node.kind)
                elif isinstance(node, BinaryExpression):
                    operators.append(node.operator)
                elif isinstance(node, ColumnReference):
                    if node.qualifier is not None:
                        has_qualified_columns = True
                elif isinstance(node, Asterisk):
                    if node.qualifier is not None:
                        has_qualified_asterisks = True
        constants_by_clause[clause] = _dedup(constants)
        operators_by_clause[clause] = _dedup(operators)
        kinds_by_clause[clause] = _dedup(kinds)

    join_types = [
        fe.join_type for fe in destination.from_elements if fe.join_type is not None
    ]
    join_types.append(JoinType.CROSS)

    values = ValueSets(
        table_names=tuple(t.name for t in restricted.tables),
        columns_by_table={t.name: t.columns for t in restricted.tables},
        constants=_dedup(v for c in ALL_CLAUSES for v in constants_by_clause[c]),
        aggregation_kinds=_dedup(v for c in ALL_CLAUSES for v in kinds_by_clause[c]),
        operators=_dedup(v for c in ALL_CLAUSES for v in operators_by_clause[c]),
        join_types=_dedup(join_types),
        from_aliases=_dedup(
            fe.alias for fe in destination.from_elements if fe.alias is not None
        ),
        select_aliases=_dedup(
            el.alias for el in destination.select_elements if el.alias is not None
        ),
        constants_by_clause=constants_by_clause,
        operators_by_clause=operators_by_clause,
        aggregation_kinds_by_clause=kinds_by_clause,
        has_qualified_columns=has_qualified_columns,
        has_qualified_asterisks=has_qualified_asterisks,
    )
    usage = {t.name: frozenset(t.columns) for t in restricted.tables}
    return MetaInfo(
        depth=depth,
        values=values,
        full_schema=schema,
        restricted_schema=restricted,
        usage=usage,
        slack=slack,
    )


def remaining_depth(
    meta: MetaInfo, clause: Clause, kind: ComponentKind, q: QueryAst
) -> int:
    """How many more components of this kind the clause may still receive."""
    index = _CLAUSE_INDEX[clause] * _N_KINDS + _KIND_INDEX[kind]
    left = meta.depth.kind_limits[index] - measure_query(q).kind_counts[index]
    return left if left > 0 else 0


def list_remaining(meta: MetaInfo, list_name: str, q: QueryAst) -> int:
    index = LIST_NAMES.index(list_name)
    left = meta.depth.list_limits[index] - measure_query(q).list_lengths[index]
    return left if left > 0 else 0


def kind_count(q: QueryAst, clause: Clause, kind: ComponentKind) -> int:
    return measure_query(q).kind_counts[_CLAUSE_INDEX[clause] * _N_KINDS + _KIND_INDEX[kind]]


def expression_levels(q: QueryAst, clause: Clause) -> int:
    return measure_query(q).levels[_CLAUSE_INDEX[clause]]


def within_limits(meta: MetaInfo, candidate: QueryAst, origin: QueryAst) -> bool:
    """Monotone limit filter for edit outputs.

    A candidate may not exceed any limit it was not already exceeding as the
    origin: oversized inputs may shrink or stay, never grow further.
    """
    cm = measure_query(candidate)
    om = measure_query(origin)
    depth = meta.depth
    for c, limit, o in zip(cm.kind_counts, depth.kind_limits, om.kind_counts):
        if c > limit and c > o:
            return False
    for c, limit, o in zip(cm.levels, depth.level_limits, om.levels):
        if c > limit and c > o:
            return False
    for c, limit, o in zip(cm.list_lengths, depth.list_limits, om.list_lengths):
        if c > limit and c > o:
            return False
    return True
