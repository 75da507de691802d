"""The edit catalog: cost-weighted neighbor functions over query ASTs.

An edit maps one query to a set of canonically distinct queries, never
including its input, with every output kept inside the MetaInfo bounds.
Atomic add/remove and set/unset edits exist for every component and
attribute, which keeps the whole graph connected; horizontal edits reorder
or revalue without changing tree size; equivalence edits cost 0 and connect
queries considered semantically equal. All costs are non-negative integers
and can be overridden per edit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Optional

from .ast_nodes import (
    ARITHMETIC_OPS,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    COMPARISON_OPS,
    CONDITIONED_JOINS,
    Clause,
    ColumnReference,
    Constant,
    Expression,
    FromElement,
    JoinType,
    MIRRORED_COMPARISON,
    Not,
    OrderByElement,
    QueryAst,
    SelectElement,
    SortDirection,
    contains_aggregation,
    iter_expr_nodes,
    replace_expressions,
)
from .meta import (
    ComponentKind,
    MetaInfo,
    expression_levels,
    kind_count,
    list_remaining,
    remaining_depth,
    within_limits,
)
from .schema import Schema


class EditCategory(Enum):
    ATOMIC = "atomic"
    HORIZONTAL = "horizontal"
    SHORTCUT = "shortcut"
    EQUIVALENCE = "equivalence"


class EditCatalogError(ValueError):
    pass


class UnknownEditNameError(EditCatalogError):
    pass


class DuplicateEditNameError(EditCatalogError):
    pass


class NegativeCostError(EditCatalogError):
    pass


Generator = Callable[[QueryAst, Schema, MetaInfo], Iterable[QueryAst]]


@dataclass(frozen=True)
class Edit:
    name: str
    description: str
    cost: int
    category: EditCategory
    generate: Generator

    def __post_init__(self) -> None:
        if type(self.cost) is not int:
            raise EditCatalogError(f"cost of {self.name!r} must be an integer")
        if self.cost < 0:
            raise NegativeCostError(f"cost of {self.name!r} must be non-negative")

    def perform(self, q: QueryAst, schema: Schema, meta: MetaInfo) -> tuple:
        """Duplicate-free neighbors of ``q``, never containing ``q`` itself."""
        seen: dict = {}
        for candidate in self.generate(q, schema, meta):
            if candidate == q:
                continue
            if not within_limits(meta, candidate, q):
                continue
            if candidate not in seen:
                seen[candidate] = None
        return tuple(seen)

    def with_cost(self, cost: int) -> "Edit":
        return replace(self, cost=cost)


def apply_edit(edit: Edit, q: QueryAst, schema: Schema, meta: MetaInfo) -> tuple:
    return edit.perform(q, schema, meta)


class EditSet:
    """Edits sorted ascending by cost; immutable after construction."""

    def __init__(self, edits: Iterable[Edit]):
        edits = tuple(edits)
        names = [e.name for e in edits]
        for name in names:
            if names.count(name) > 1:
                raise DuplicateEditNameError(f"edit {name!r} registered twice")
        self.edits: tuple = tuple(sorted(edits, key=lambda e: e.cost))
        self._by_name = {e.name: e for e in self.edits}

    def __iter__(self):
        return iter(self.edits)

    def __len__(self) -> int:
        return len(self.edits)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> Edit:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownEditNameError(f"unknown edit {name!r}") from None

    def configure_costs(self, overrides: dict) -> "EditSet":
        for name, cost in overrides.items():
            if name not in self._by_name:
                raise UnknownEditNameError(f"unknown edit {name!r}")
            if type(cost) is not int:
                raise EditCatalogError(f"cost for {name!r} must be an integer")
            if cost < 0:
                raise NegativeCostError(f"cost for {name!r} must be non-negative")
        return EditSet(
            e.with_cost(overrides[e.name]) if e.name in overrides else e for e in self.edits
        )

    def register(self, edit: Edit) -> "EditSet":
        if edit.name in self._by_name:
            raise DuplicateEditNameError(f"edit {edit.name!r} already registered")
        return EditSet(self.edits + (edit,))


def parse_cost_overrides(text: str) -> dict:
    """Parse the flat cost-override format: one ``editName = integer`` per line."""
    overrides: dict = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        name = name.strip()
        value = value.strip()
        if not sep or not name:
            raise EditCatalogError(f"line {number}: expected 'editName = integer'")
        try:
            cost = int(value)
        except ValueError:
            raise EditCatalogError(f"line {number}: cost {value!r} is not an integer") from None
        overrides[name] = cost
    return overrides


# -- catalog helpers ------------------------------------------------------------


def _visible(q: QueryAst) -> list:
    return [(fe.alias if fe.alias is not None else fe.table, fe.table) for fe in q.from_elements]


def _column_values(q: QueryAst, meta: MetaInfo) -> list:
    """Unqualified references to restricted columns reachable via FROM."""
    out: list = []
    for _, table in _visible(q):
        for column in meta.values.columns_by_table.get(table, ()):
            ref = ColumnReference(None, column)
            if ref not in out:
                out.append(ref)
    return out


def _qualifier_owners(q: QueryAst, meta: MetaInfo, column: str) -> list:
    """Visible FROM names whose restricted table carries the column."""
    return [
        visible
        for visible, table in _visible(q)
        if column in meta.values.columns_by_table.get(table, ())
    ]


def _walk_depth(q: QueryAst, clause: Clause) -> int:
    # deep enough to visit every existing node of the clause
    return expression_levels(q, clause)


_AGG_CLAUSES = (Clause.SELECT, Clause.HAVING, Clause.ORDER_BY)

_CLAUSE_NAME = {
    Clause.SELECT: "Select",
    Clause.WHERE: "Where",
    Clause.GROUP_BY: "GroupBy",
    Clause.HAVING: "Having",
    Clause.ORDER_BY: "OrderBy",
    Clause.JOIN_CONDITION: "JoinCondition",
}

_CLAUSE_PHRASE = {
    Clause.SELECT: "a SELECT element",
    Clause.WHERE: "the WHERE clause",
    Clause.GROUP_BY: "a GROUP BY element",
    Clause.HAVING: "the HAVING clause",
    Clause.ORDER_BY: "an ORDER BY element",
    Clause.JOIN_CONDITION: "a join condition",
}


# -- expression edits, one family per clause -------------------------------------


def _gen_add_column_reference(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.COLUMN_REFERENCE, q) < 1:
            return ()
        values = _column_values(q, meta)
        if not values:
            return ()

        def multimap(e, stack):
            return values if e is None else ()

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


_KIND_OF_TYPE = {
    ColumnReference: ComponentKind.COLUMN_REFERENCE,
    Constant: ComponentKind.CONSTANT,
    Asterisk: ComponentKind.ASTERISK,
    Not: ComponentKind.NOT,
    AggregationFunction: ComponentKind.AGGREGATION,
    BinaryExpression: ComponentKind.BINARY_EXPRESSION,
}


def _gen_remove_kind(clause: Clause, kinds: tuple) -> Generator:
    component_kinds = tuple(_KIND_OF_TYPE[t] for t in kinds)

    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not any(kind_count(q, clause, k) for k in component_kinds):
            return ()

        def multimap(e, stack):
            if not isinstance(e, kinds):
                return ()
            if isinstance(e, Not):
                return (e.inner,)
            if isinstance(e, AggregationFunction):
                return (e.inner,) if not e.is_distinct else ()
            if isinstance(e, BinaryExpression):
                if e.left is None:
                    return (e.right,)
                if e.right is None:
                    return (e.left,)
                return ()
            # leaves with a qualifier set keep it until it is unset
            if isinstance(e, (ColumnReference, Asterisk)) and e.qualifier is not None:
                return ()
            return (None,)

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_change_column(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.COLUMN_REFERENCE):
            return ()

        def multimap(e, stack):
            if not isinstance(e, ColumnReference):
                return ()
            if e.qualifier is None:
                columns: list = []
                for _, table in _visible(q):
                    for c in meta.values.columns_by_table.get(table, ()):
                        if c != e.column and c not in columns:
                            columns.append(c)
            else:
                columns = []
                for visible, table in _visible(q):
                    if visible == e.qualifier:
                        columns = [
                            c
                            for c in meta.values.columns_by_table.get(table, ())
                            if c != e.column
                        ]
                        break
            return tuple(ColumnReference(e.qualifier, c) for c in columns)

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_set_column_qualifier(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not meta.values.has_qualified_columns:
            return ()
        if not kind_count(q, clause, ComponentKind.COLUMN_REFERENCE):
            return ()

        def multimap(e, stack):
            if not isinstance(e, ColumnReference) or e.qualifier is not None:
                return ()
            return tuple(
                ColumnReference(v, e.column) for v in _qualifier_owners(q, meta, e.column)
            )

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_unset_column_qualifier(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.COLUMN_REFERENCE):
            return ()

        def multimap(e, stack):
            if isinstance(e, ColumnReference) and e.qualifier is not None:
                return (ColumnReference(None, e.column),)
            return ()

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_change_column_qualifier(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not meta.values.has_qualified_columns:
            return ()
        if not kind_count(q, clause, ComponentKind.COLUMN_REFERENCE):
            return ()

        def multimap(e, stack):
            if not isinstance(e, ColumnReference) or e.qualifier is None:
                return ()
            return tuple(
                ColumnReference(v, e.column)
                for v in _qualifier_owners(q, meta, e.column)
                if v != e.qualifier
            )

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_add_constant(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.CONSTANT, q) < 1:
            return ()
        constants = meta.values.constants_by_clause[clause]
        if not constants:
            return ()
        values = tuple(Constant(v) for v in constants)

        def multimap(e, stack):
            return values if e is None else ()

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


def _gen_change_constant(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.CONSTANT):
            return ()

        def multimap(e, stack):
            if not isinstance(e, Constant):
                return ()
            return tuple(
                Constant(v)
                for v in meta.values.constants_by_clause[clause]
                if v != e.value
            )

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_add_binary(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.BINARY_EXPRESSION, q) < 1:
            return ()
        ops = meta.values.operators_by_clause[clause]
        if not ops:
            return ()

        def multimap(e, stack):
            # a right-side wrap only matters for non-mirrorable operators;
            # commutation and comparison flips cover the rest at cost 0
            out = []
            for op in ops:
                if e is None:
                    out.append(BinaryExpression(op, None, None))
                else:
                    out.append(BinaryExpression(op, e, None))
                    if op in ARITHMETIC_OPS:
                        out.append(BinaryExpression(op, None, e))
            return out

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


def _gen_change_operator(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.BINARY_EXPRESSION):
            return ()

        def multimap(e, stack):
            if not isinstance(e, BinaryExpression):
                return ()
            return tuple(
                BinaryExpression(op, e.left, e.right)
                for op in meta.values.operators_by_clause[clause]
                if op is not e.operator
            )

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_add_not(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.NOT, q) < 1:
            return ()

        def multimap(e, stack):
            return (Not(e),)

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


def _gen_add_aggregation(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.AGGREGATION, q) < 1:
            return ()
        kinds = meta.values.aggregation_kinds_by_clause[clause]
        if not kinds:
            return ()

        def multimap(e, stack):
            if any(isinstance(a, AggregationFunction) for a in stack):
                return ()
            if e is not None and contains_aggregation(e):
                return ()
            return tuple(AggregationFunction(kind, False, e) for kind in kinds)

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


def _gen_change_aggregation_kind(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.AGGREGATION):
            return ()

        def multimap(e, stack):
            if not isinstance(e, AggregationFunction):
                return ()
            return tuple(
                AggregationFunction(kind, e.is_distinct, e.inner)
                for kind in meta.values.aggregation_kinds_by_clause[clause]
                if kind is not e.kind
            )

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_set_aggregation_distinct(clause: Clause, value: bool) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if not kind_count(q, clause, ComponentKind.AGGREGATION):
            return ()

        def multimap(e, stack):
            if isinstance(e, AggregationFunction) and e.is_distinct != value:
                return (AggregationFunction(e.kind, value, e.inner),)
            return ()

        return replace_expressions(q, clause, multimap, _walk_depth(q, clause))

    return generate


def _gen_add_asterisk(clause: Clause) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if remaining_depth(meta, clause, ComponentKind.ASTERISK, q) < 1:
            return ()

        def multimap(e, stack):
            if e is not None:
                return ()
            at_select_root = clause is Clause.SELECT and not stack
            inside_aggregate = bool(stack) and isinstance(stack[-1], AggregationFunction)
            if at_select_root or inside_aggregate:
                return (Asterisk(None),)
            return ()

        return replace_expressions(q, clause, multimap, meta.depth.max_position_depth(clause))

    return generate


def _gen_asterisk_qualifier(mode: str) -> Generator:
    # pooled across all clauses; asterisks are rare outside SELECT
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        if mode != "unset" and not meta.values.has_qualified_asterisks:
            return ()
        visibles = [v for v, _ in _visible(q)]

        def multimap(e, stack):
            if not isinstance(e, Asterisk):
                return ()
            if mode == "set" and e.qualifier is None:
                return tuple(Asterisk(v) for v in visibles)
            if mode == "unset" and e.qualifier is not None:
                return (Asterisk(None),)
            if mode == "change" and e.qualifier is not None:
                return tuple(Asterisk(v) for v in visibles if v != e.qualifier)
            return ()

        out = []
        for clause in Clause:
            if kind_count(q, clause, ComponentKind.ASTERISK):
                out.extend(replace_expressions(q, clause, multimap, _walk_depth(q, clause)))
        return out

    return generate


# -- structural edits -------------------------------------------------------------


def _gen_add_select_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    if list_remaining(meta, "selectElements", q) < 1:
        return ()
    element = SelectElement(None, None)
    return tuple(
        q.insert_select_element(i, element) for i in range(len(q.select_elements) + 1)
    )


def _gen_remove_select_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    empty = SelectElement(None, None)
    return tuple(
        q.remove_select_element(i)
        for i, el in enumerate(q.select_elements)
        if el == empty
    )


def _gen_set_select_alias(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, el in enumerate(q.select_elements):
        if el.alias is None:
            for alias in meta.values.select_aliases:
                out.append(q.replace_select_element(i, replace(el, alias=alias)))
    return out


def _gen_unset_select_alias(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(
        q.replace_select_element(i, replace(el, alias=None))
        for i, el in enumerate(q.select_elements)
        if el.alias is not None
    )


def _gen_change_select_alias(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, el in enumerate(q.select_elements):
        if el.alias is not None:
            for alias in meta.values.select_aliases:
                if alias != el.alias:
                    out.append(q.replace_select_element(i, replace(el, alias=alias)))
    return out


def _swap_pairs(n: int):
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def _gen_swap_select_elements(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, j in _swap_pairs(len(q.select_elements)):
        elements = list(q.select_elements)
        elements[i], elements[j] = elements[j], elements[i]
        out.append(replace(q, select_elements=tuple(elements)))
    return out


def _gen_add_from_table(q: QueryAst, schema: Schema, meta: MetaInfo):
    if list_remaining(meta, "fromElements", q) < 1:
        return ()
    out = []
    for table in meta.values.table_names:
        for position in range(len(q.from_elements) + 1):
            if position == 0:
                elements = [FromElement(table, None, None, None)]
                for k, fe in enumerate(q.from_elements):
                    if k == 0:
                        elements.append(replace(fe, join_type=JoinType.CROSS))
                    else:
                        elements.append(fe)
                out.append(replace(q, from_elements=tuple(elements)))
            else:
                for join_type in meta.values.join_types:
                    out.append(
                        q.insert_from_element(
                            position, FromElement(table, None, join_type, None)
                        )
                    )
    return out


def _gen_remove_from_table(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, fe in enumerate(q.from_elements):
        if fe.alias is not None or fe.join_condition is not None:
            continue
        if i == 0 and len(q.from_elements) > 1:
            successor = q.from_elements[1]
            if successor.join_type is not JoinType.CROSS or successor.join_condition is not None:
                continue
            elements = (replace(successor, join_type=None),) + q.from_elements[2:]
            out.append(replace(q, from_elements=elements))
        else:
            out.append(q.remove_from_element(i))
    return out


def _gen_set_from_alias(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, fe in enumerate(q.from_elements):
        if fe.alias is None:
            for alias in meta.values.from_aliases:
                out.append(q.replace_from_element(i, replace(fe, alias=alias)))
    return out


def _gen_unset_from_alias(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(
        q.replace_from_element(i, replace(fe, alias=None))
        for i, fe in enumerate(q.from_elements)
        if fe.alias is not None
    )


def _gen_change_join_type(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    targets = tuple(meta.values.join_types)
    for i, fe in enumerate(q.from_elements):
        if fe.join_type is None:
            continue
        for target in targets:
            if target is fe.join_type:
                continue
            if target is JoinType.CROSS:
                if fe.join_condition is not None:
                    continue
                out.append(q.replace_from_element(i, replace(fe, join_type=target)))
            else:
                out.append(q.replace_from_element(i, replace(fe, join_type=target)))
    return out


def _gen_swap_from_elements(q: QueryAst, schema: Schema, meta: MetaInfo):
    # only the (table, alias) payloads move; join structure stays positional
    out = []
    for i, j in _swap_pairs(len(q.from_elements)):
        elements = list(q.from_elements)
        a, b = elements[i], elements[j]
        elements[i] = replace(a, table=b.table, alias=b.alias)
        elements[j] = replace(b, table=a.table, alias=a.alias)
        out.append(replace(q, from_elements=tuple(elements)))
    return out


def _gen_add_group_by_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    if list_remaining(meta, "groupByElements", q) < 1:
        return ()
    return tuple(q.insert_group_by_element(i, None) for i in range(len(q.group_by) + 1))


def _gen_remove_group_by_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(q.remove_group_by_element(i) for i, e in enumerate(q.group_by) if e is None)


def _gen_swap_group_by_elements(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, j in _swap_pairs(len(q.group_by)):
        elements = list(q.group_by)
        elements[i], elements[j] = elements[j], elements[i]
        out.append(replace(q, group_by=tuple(elements)))
    return out


def _gen_add_order_by_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    if list_remaining(meta, "orderByElements", q) < 1:
        return ()
    element = OrderByElement(None, SortDirection.ASC)
    return tuple(q.insert_order_by_element(i, element) for i in range(len(q.order_by) + 1))


def _gen_remove_order_by_element(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(
        q.remove_order_by_element(i)
        for i, el in enumerate(q.order_by)
        if el.expression is None and el.direction is SortDirection.ASC
    )


def _gen_set_order_direction(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(
        q.replace_order_by_element(i, replace(el, direction=SortDirection.DESC))
        for i, el in enumerate(q.order_by)
        if el.direction is SortDirection.ASC
    )


def _gen_unset_order_direction(q: QueryAst, schema: Schema, meta: MetaInfo):
    return tuple(
        q.replace_order_by_element(i, replace(el, direction=SortDirection.ASC))
        for i, el in enumerate(q.order_by)
        if el.direction is SortDirection.DESC
    )


def _gen_swap_order_by_elements(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, j in _swap_pairs(len(q.order_by)):
        elements = list(q.order_by)
        elements[i], elements[j] = elements[j], elements[i]
        out.append(replace(q, order_by=tuple(elements)))
    return out


def _gen_set_distinct(q: QueryAst, schema: Schema, meta: MetaInfo):
    return () if q.distinct else (q.set_distinct(True),)


def _gen_unset_distinct(q: QueryAst, schema: Schema, meta: MetaInfo):
    return (q.set_distinct(False),) if q.distinct else ()


# -- equivalence edits ------------------------------------------------------------


def _gen_inner_join_to_cross_where(q: QueryAst, schema: Schema, meta: MetaInfo):
    out = []
    for i, fe in enumerate(q.from_elements):
        if fe.join_type is not JoinType.INNER or fe.join_condition is None:
            continue
        condition = fe.join_condition
        new_where = (
            condition
            if q.where is None
            else BinaryExpression(BinaryOp.AND, q.where, condition)
        )
        moved = q.replace_from_element(
            i, replace(fe, join_type=JoinType.CROSS, join_condition=None)
        )
        out.append(moved.set_where(new_where))
    return out


def _and_conjuncts(e: Expression) -> list:
    if isinstance(e, BinaryExpression) and e.operator is BinaryOp.AND:
        left = _and_conjuncts(e.left) if e.left is not None else [None]
        right = _and_conjuncts(e.right) if e.right is not None else [None]
        return left + right
    return [e]


def _rebuild_conjunction(conjuncts: list) -> Optional[Expression]:
    if not conjuncts:
        return None
    expr = conjuncts[0]
    for part in conjuncts[1:]:
        expr = BinaryExpression(BinaryOp.AND, expr, part)
    return expr


def _resolves_within_prefix(
    e: Optional[Expression], q: QueryAst, schema: Schema, prefix_end: int
) -> bool:
    """All references of ``e`` resolve uniquely to FROM elements 0..prefix_end."""
    scope = []
    for i, fe in enumerate(q.from_elements):
        visible = fe.alias if fe.alias is not None else fe.table
        scope.append((visible, schema.table(fe.table), i))
    for node, _ in iter_expr_nodes(e):
        if isinstance(node, ColumnReference):
            if node.qualifier is not None:
                matches = [i for v, _, i in scope if v == node.qualifier]
            else:
                matches = [
                    i
                    for _, t, i in scope
                    if t is not None and node.column in t.columns
                ]
            if len(matches) != 1 or matches[0] > prefix_end:
                return False
        elif isinstance(node, Asterisk):
            return False
    return True


def _gen_cross_where_to_inner_join(q: QueryAst, schema: Schema, meta: MetaInfo):
    if q.where is None:
        return ()
    conjuncts = _and_conjuncts(q.where)
    out = []
    for i, fe in enumerate(q.from_elements):
        if i == 0 or fe.join_type is not JoinType.CROSS:
            continue
        for k, conjunct in enumerate(conjuncts):
            if conjunct is None:
                continue
            if not _resolves_within_prefix(conjunct, q, schema, i):
                continue
            rest = _rebuild_conjunction(conjuncts[:k] + conjuncts[k + 1 :])
            joined = q.replace_from_element(
                i, replace(fe, join_type=JoinType.INNER, join_condition=conjunct)
            )
            out.append(joined.set_where(rest))
    return out


def _gen_commutation(op: BinaryOp) -> Generator:
    def generate(q: QueryAst, schema: Schema, meta: MetaInfo):
        def multimap(e, stack):
            if isinstance(e, BinaryExpression) and e.operator is op:
                return (BinaryExpression(op, e.right, e.left),)
            return ()

        out = []
        for clause in (Clause.WHERE, Clause.HAVING, Clause.JOIN_CONDITION):
            if kind_count(q, clause, ComponentKind.BINARY_EXPRESSION):
                out.extend(replace_expressions(q, clause, multimap, _walk_depth(q, clause)))
        return out

    return generate


def _gen_comparison_flip(q: QueryAst, schema: Schema, meta: MetaInfo):
    def multimap(e, stack):
        if isinstance(e, BinaryExpression) and e.operator in COMPARISON_OPS:
            return (
                BinaryExpression(MIRRORED_COMPARISON[e.operator], e.right, e.left),
            )
        return ()

    out = []
    for clause in (Clause.WHERE, Clause.HAVING, Clause.JOIN_CONDITION):
        if kind_count(q, clause, ComponentKind.BINARY_EXPRESSION):
            out.extend(replace_expressions(q, clause, multimap, _walk_depth(q, clause)))
    return out


def _gen_drop_redundant_distinct(q: QueryAst, schema: Schema, meta: MetaInfo):
    """DISTINCT is redundant when SELECT covers a primary key of every table."""
    if not q.distinct or not q.from_elements:
        return ()
    if q.group_by or q.having is not None:
        return ()
    for el in q.select_elements:
        if contains_aggregation(el.expression):
            return ()

    full = meta.full_schema
    scope = []
    for i, fe in enumerate(q.from_elements):
        visible = fe.alias if fe.alias is not None else fe.table
        scope.append((visible, full.table(fe.table), i))

    covered: dict = {i: set() for i in range(len(q.from_elements))}
    for el in q.select_elements:
        e = el.expression
        if isinstance(e, Asterisk):
            if e.qualifier is None:
                for _, table, i in scope:
                    if table is not None:
                        covered[i].update(table.columns)
            else:
                for visible, table, i in scope:
                    if visible == e.qualifier and table is not None:
                        covered[i].update(table.columns)
        elif isinstance(e, ColumnReference):
            if e.qualifier is not None:
                matches = [i for v, _, i in scope if v == e.qualifier]
                if len(matches) == 1:
                    covered[matches[0]].add(e.column)
            else:
                owners = [
                    i for _, t, i in scope if t is not None and e.column in t.columns
                ]
                if len(owners) == 1:
                    covered[owners[0]].add(e.column)

    for visible, table, i in scope:
        if table is None or table.primary_key is None:
            return ()
        if not all(col in covered[i] for col in table.primary_key):
            return ()
    return (q.set_distinct(False),)


# -- the default catalog -----------------------------------------------------------


def _expression_family(clause: Clause) -> list:
    name = _CLAUSE_NAME[clause]
    where = _CLAUSE_PHRASE[clause]
    edits = [
        Edit(
            f"add{name}ColumnReference",
            f"Add a column reference in {where}",
            1,
            EditCategory.ATOMIC,
            _gen_add_column_reference(clause),
        ),
        Edit(
            f"remove{name}ColumnReference",
            f"Remove a column reference from {where}",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (ColumnReference,)),
        ),
        Edit(
            f"change{name}ColumnReferenceColumn",
            f"Change which column a reference in {where} points to",
            1,
            EditCategory.HORIZONTAL,
            _gen_change_column(clause),
        ),
        Edit(
            f"set{name}ColumnReferenceQualifier",
            f"Qualify a column reference in {where} with its table",
            1,
            EditCategory.ATOMIC,
            _gen_set_column_qualifier(clause),
        ),
        Edit(
            f"unset{name}ColumnReferenceQualifier",
            f"Drop the table qualifier of a column reference in {where}",
            1,
            EditCategory.ATOMIC,
            _gen_unset_column_qualifier(clause),
        ),
        Edit(
            f"change{name}ColumnReferenceQualifier",
            f"Change the table qualifier of a column reference in {where}",
            1,
            EditCategory.HORIZONTAL,
            _gen_change_column_qualifier(clause),
        ),
        Edit(
            f"add{name}Constant",
            f"Add a constant in {where}",
            1,
            EditCategory.ATOMIC,
            _gen_add_constant(clause),
        ),
        Edit(
            f"remove{name}Constant",
            f"Remove a constant from {where}",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (Constant,)),
        ),
        Edit(
            f"change{name}ConstantValue",
            f"Change the value of a constant in {where}",
            1,
            EditCategory.HORIZONTAL,
            _gen_change_constant(clause),
        ),
        Edit(
            f"add{name}BinaryExpression",
            f"Add a binary expression in {where}",
            1,
            EditCategory.ATOMIC,
            _gen_add_binary(clause),
        ),
        Edit(
            f"remove{name}BinaryExpression",
            f"Remove a binary expression from {where}, keeping its operand",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (BinaryExpression,)),
        ),
        Edit(
            f"change{name}BinaryExpressionOperator",
            f"Change the operator of a binary expression in {where}",
            1,
            EditCategory.HORIZONTAL,
            _gen_change_operator(clause),
        ),
        Edit(
            f"add{name}Not",
            f"Negate a part of {where} with NOT",
            1,
            EditCategory.ATOMIC,
            _gen_add_not(clause),
        ),
        Edit(
            f"remove{name}Not",
            f"Remove a NOT from {where}, keeping its operand",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (Not,)),
        ),
        Edit(
            f"remove{name}AggregationFunction",
            f"Remove an aggregation function from {where}, keeping its argument",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (AggregationFunction,)),
        ),
        Edit(
            f"remove{name}Asterisk",
            f"Remove an asterisk from {where}",
            1,
            EditCategory.ATOMIC,
            _gen_remove_kind(clause, (Asterisk,)),
        ),
    ]
    if clause in _AGG_CLAUSES:
        edits.extend(
            [
                Edit(
                    f"add{name}AggregationFunction",
                    f"Add (missing) aggregation function to {where}",
                    1,
                    EditCategory.ATOMIC,
                    _gen_add_aggregation(clause),
                ),
                Edit(
                    f"change{name}AggregationFunctionKind",
                    f"Change the kind of an aggregation function in {where}",
                    1,
                    EditCategory.HORIZONTAL,
                    _gen_change_aggregation_kind(clause),
                ),
                Edit(
                    f"set{name}AggregationDistinct",
                    f"Make an aggregation function in {where} DISTINCT",
                    1,
                    EditCategory.ATOMIC,
                    _gen_set_aggregation_distinct(clause, True),
                ),
                Edit(
                    f"unset{name}AggregationDistinct",
                    f"Drop the DISTINCT of an aggregation function in {where}",
                    1,
                    EditCategory.ATOMIC,
                    _gen_set_aggregation_distinct(clause, False),
                ),
                Edit(
                    f"add{name}Asterisk",
                    f"Add an asterisk in {where}",
                    1,
                    EditCategory.ATOMIC,
                    _gen_add_asterisk(clause),
                ),
            ]
        )
    return edits


def _build_default_edits() -> list:
    edits = [
        # equivalence edits: cost 0 connects semantically equal queries
        Edit(
            "innerJoinToCrossWhere",
            "Turn an INNER JOIN into a cross join, moving its condition into the WHERE clause",
            0,
            EditCategory.EQUIVALENCE,
            _gen_inner_join_to_cross_where,
        ),
        Edit(
            "crossWhereToInnerJoin",
            "Turn a cross join into an INNER JOIN, moving a WHERE conjunct into its condition",
            0,
            EditCategory.EQUIVALENCE,
            _gen_cross_where_to_inner_join,
        ),
        Edit(
            "andCommutation",
            "Swap the operands of an AND",
            0,
            EditCategory.EQUIVALENCE,
            _gen_commutation(BinaryOp.AND),
        ),
        Edit(
            "orCommutation",
            "Swap the operands of an OR",
            0,
            EditCategory.EQUIVALENCE,
            _gen_commutation(BinaryOp.OR),
        ),
        Edit(
            "comparisonFlip",
            "Mirror a comparison, swapping its operands",
            0,
            EditCategory.EQUIVALENCE,
            _gen_comparison_flip,
        ),
        Edit(
            "dropRedundantDistinct",
            "Drop a DISTINCT that cannot change the result because SELECT covers a primary key",
            0,
            EditCategory.EQUIVALENCE,
            _gen_drop_redundant_distinct,
        ),
        # query attributes
        Edit(
            "setDistinct",
            "Add the DISTINCT marker to the query",
            2,
            EditCategory.ATOMIC,
            _gen_set_distinct,
        ),
        Edit(
            "unsetDistinct",
            "Remove the DISTINCT marker from the query",
            2,
            EditCategory.ATOMIC,
            _gen_unset_distinct,
        ),
        # SELECT list structure
        Edit(
            "addSelectElement",
            "Add an empty SELECT element",
            1,
            EditCategory.ATOMIC,
            _gen_add_select_element,
        ),
        Edit(
            "removeSelectElement",
            "Remove an empty SELECT element",
            1,
            EditCategory.ATOMIC,
            _gen_remove_select_element,
        ),
        Edit(
            "setSelectAlias",
            "Give a SELECT element an output alias",
            1,
            EditCategory.ATOMIC,
            _gen_set_select_alias,
        ),
        Edit(
            "unsetSelectAlias",
            "Drop the output alias of a SELECT element",
            1,
            EditCategory.ATOMIC,
            _gen_unset_select_alias,
        ),
        Edit(
            "changeSelectAlias",
            "Change the output alias of a SELECT element",
            1,
            EditCategory.HORIZONTAL,
            _gen_change_select_alias,
        ),
        Edit(
            "swapSelectElements",
            "Swap the positions of two SELECT elements",
            1,
            EditCategory.HORIZONTAL,
            _gen_swap_select_elements,
        ),
        # FROM structure
        Edit(
            "addFromTable",
            "Add a table to the FROM clause",
            1,
            EditCategory.ATOMIC,
            _gen_add_from_table,
        ),
        Edit(
            "removeFromTable",
            "Remove a table from the FROM clause",
            1,
            EditCategory.ATOMIC,
            _gen_remove_from_table,
        ),
        Edit(
            "setFromAlias",
            "Give a FROM table an alias",
            1,
            EditCategory.ATOMIC,
            _gen_set_from_alias,
        ),
        Edit(
            "unsetFromAlias",
            "Drop the alias of a FROM table",
            1,
            EditCategory.ATOMIC,
            _gen_unset_from_alias,
        ),
        Edit(
            "changeJoinType",
            "Change how a FROM table is joined",
            1,
            EditCategory.ATOMIC,
            _gen_change_join_type,
        ),
        Edit(
            "swapFromElements",
            "Swap the positions of two FROM tables",
            1,
            EditCategory.HORIZONTAL,
            _gen_swap_from_elements,
        ),
        # GROUP BY structure
        Edit(
            "addGroupByElement",
            "Add an empty GROUP BY element",
            1,
            EditCategory.ATOMIC,
            _gen_add_group_by_element,
        ),
        Edit(
            "removeGroupByElement",
            "Remove an empty GROUP BY element",
            1,
            EditCategory.ATOMIC,
            _gen_remove_group_by_element,
        ),
        Edit(
            "swapGroupByElements",
            "Swap the positions of two GROUP BY elements",
            1,
            EditCategory.HORIZONTAL,
            _gen_swap_group_by_elements,
        ),
        # ORDER BY structure
        Edit(
            "addOrderByElement",
            "Add an empty ORDER BY element",
            1,
            EditCategory.ATOMIC,
            _gen_add_order_by_element,
        ),
        Edit(
            "removeOrderByElement",
            "Remove an empty ORDER BY element",
            1,
            EditCategory.ATOMIC,
            _gen_remove_order_by_element,
        ),
        Edit(
            "setOrderByDirection",
            "Sort an ORDER BY element descending",
            1,
            EditCategory.ATOMIC,
            _gen_set_order_direction,
        ),
        Edit(
            "unsetOrderByDirection",
            "Sort an ORDER BY element ascending again",
            1,
            EditCategory.ATOMIC,
            _gen_unset_order_direction,
        ),
        Edit(
            "swapOrderByElements",
            "Swap the positions of two ORDER BY elements",
            1,
            EditCategory.HORIZONTAL,
            _gen_swap_order_by_elements,
        ),
        # asterisk qualifiers, pooled over all clauses
        Edit(
            "setAsteriskQualifier",
            "Restrict an asterisk to one table",
            1,
            EditCategory.ATOMIC,
            _gen_asterisk_qualifier("set"),
        ),
        Edit(
            "unsetAsteriskQualifier",
            "Widen an asterisk to all tables",
            1,
            EditCategory.ATOMIC,
            _gen_asterisk_qualifier("unset"),
        ),
        Edit(
            "changeAsteriskQualifier",
            "Point a qualified asterisk at another table",
            1,
            EditCategory.HORIZONTAL,
            _gen_asterisk_qualifier("change"),
        ),
    ]
    for clause in Clause:
        edits.extend(_expression_family(clause))
    return edits


_DEFAULT_SET: Optional[EditSet] = None


def default_edit_set() -> EditSet:
    """The built-in catalog with default costs."""
    global _DEFAULT_SET
    if _DEFAULT_SET is None:
        _DEFAULT_SET = EditSet(_build_default_edits())
    return _DEFAULT_SET
