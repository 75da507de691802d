"""Schema model, executability checking, schema deduction and restriction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast_nodes import (
    ARITHMETIC_OPS,
    COMPARISON_OPS,
    CONDITIONED_JOINS,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    ColumnReference,
    Constant,
    Expression,
    JoinType,
    LOGICAL_OPS,
    Not,
    QueryAst,
    iter_expr_nodes,
)


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple
    primary_key: Optional[tuple] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        if len(set(self.columns)) != len(self.columns):
            raise ValueError(f"duplicate column in table {self.name!r}")
        if self.primary_key is not None:
            object.__setattr__(self, "primary_key", tuple(self.primary_key))
            for col in self.primary_key:
                if col not in self.columns:
                    raise ValueError(f"primary-key column {col!r} not in table {self.name!r}")


@dataclass(frozen=True)
class Schema:
    tables: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tables", tuple(self.tables))
        names = [t.name for t in self.tables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate table name in schema")

    def table(self, name: str) -> Optional[Table]:
        for t in self.tables:
            if t.name == name:
                return t
        return None

    def __contains__(self, name: str) -> bool:
        return self.table(name) is not None


EMPTY_SCHEMA = Schema()


class ExecutabilityError(Exception):
    """Why a query cannot run against a schema.

    Categories: hole, unknownTable, unknownColumn, ambiguousColumn,
    illegalAggregation, ungroupedColumn, typeShape.
    """

    def __init__(self, category: str, location: str, message: str):
        super().__init__(f"{category} at {location}: {message}")
        self.category = category
        self.location = location
        self.message = message


class SchemaDeductionError(Exception):
    pass


def _visible_elements(q: QueryAst, schema: Schema) -> list:
    """(visible name, table, element index) per FROM element."""
    out = []
    for i, fe in enumerate(q.from_elements):
        visible = fe.alias if fe.alias is not None else fe.table
        out.append((visible, schema.table(fe.table), i))
    return out


class _Checker:
    def __init__(self, q: QueryAst, schema: Schema):
        self.q = q
        self.schema = schema
        self.scope = _visible_elements(q, schema)
        self.select_aliases = {
            el.alias: el.expression for el in q.select_elements if el.alias is not None
        }

    def fail(self, category: str, location: str, message: str) -> None:
        raise ExecutabilityError(category, location, message)

    # -- name resolution --

    def resolve_qualifier(self, qualifier: str, location: str) -> tuple:
        matches = [(v, t, i) for v, t, i in self.scope if v == qualifier]
        if not matches:
            self.fail("unknownTable", location, f"{qualifier!r} does not name a FROM element")
        if len(matches) > 1:
            self.fail("ambiguousColumn", location, f"qualifier {qualifier!r} is ambiguous")
        return matches[0]

    def resolve_column(self, ref: ColumnReference, location: str) -> tuple:
        """-> (element index, column name)"""
        if ref.qualifier is not None:
            visible, table, index = self.resolve_qualifier(ref.qualifier, location)
            if table is None or ref.column not in table.columns:
                self.fail(
                    "unknownColumn",
                    location,
                    f"table of {ref.qualifier!r} has no column {ref.column!r}",
                )
            return index, ref.column
        owners = [
            (v, t, i) for v, t, i in self.scope if t is not None and ref.column in t.columns
        ]
        if not owners:
            self.fail("unknownColumn", location, f"no FROM table has column {ref.column!r}")
        if len(owners) > 1:
            self.fail(
                "ambiguousColumn", location, f"column name {ref.column!r} is ambiguous"
            )
        return owners[0][2], ref.column

    def resolved_key(self, e: Optional[Expression], location: str):
        """Structure of an expression with column references resolved.

        Used to compare GROUP BY entries with SELECT/HAVING/ORDER BY parts
        independently of qualifier spelling.
        """
        if e is None:
            return ("hole",)
        if isinstance(e, ColumnReference):
            return ("col",) + self.resolve_column(e, location)
        if isinstance(e, Asterisk):
            return ("ast", e.qualifier)
        if isinstance(e, Constant):
            return ("const", e.value)
        if isinstance(e, Not):
            return ("not", self.resolved_key(e.inner, location))
        if isinstance(e, AggregationFunction):
            return (
                "agg", e.kind, e.is_distinct, self.resolved_key(e.inner, location)
            )
        if isinstance(e, BinaryExpression):
            return (
                "bin",
                e.operator,
                self.resolved_key(e.left, location),
                self.resolved_key(e.right, location),
            )
        raise TypeError(e)

    # -- structural walks --

    def check_no_holes(self, e: Optional[Expression], location: str) -> None:
        if e is None:
            self.fail("hole", location, "missing expression")
        for slot_holder, _ in iter_expr_nodes(e):
            if isinstance(slot_holder, Not) and slot_holder.inner is None:
                self.fail("hole", location, "NOT is missing its operand")
            if isinstance(slot_holder, AggregationFunction) and slot_holder.inner is None:
                self.fail("hole", location, "aggregation function has no argument")
            if isinstance(slot_holder, BinaryExpression):
                if slot_holder.left is None or slot_holder.right is None:
                    self.fail("hole", location, "binary expression is missing an operand")

    def check_references(self, e: Expression, location: str, in_aggregate: bool) -> None:
        if isinstance(e, ColumnReference):
            self.resolve_column(e, location)
            return
        if isinstance(e, Asterisk):
            if e.qualifier is not None:
                self.resolve_qualifier(e.qualifier, location)
            return
        if isinstance(e, AggregationFunction):
            if in_aggregate:
                self.fail(
                    "illegalAggregation", location, "aggregation nested inside aggregation"
                )
            self.check_references(e.inner, location, in_aggregate=True)
            return
        if isinstance(e, Not):
            self.check_references(e.inner, location, in_aggregate)
            return
        if isinstance(e, BinaryExpression):
            self.check_references(e.left, location, in_aggregate)
            self.check_references(e.right, location, in_aggregate)
            return
        if isinstance(e, Constant):
            return
        raise TypeError(e)

    def check_no_aggregation(self, e: Expression, location: str) -> None:
        for node, _ in iter_expr_nodes(e):
            if isinstance(node, AggregationFunction):
                self.fail(
                    "illegalAggregation", location, "aggregation is not allowed here"
                )

    def check_shape(self, e: Expression, location: str, boolean: bool) -> None:
        """Shape-only type check: boolean positions vs value positions."""
        if isinstance(e, BinaryExpression):
            if e.operator in LOGICAL_OPS:
                if not boolean:
                    self.fail("typeShape", location, f"{e.operator.value} used as a value")
                self.check_shape(e.left, location, boolean=True)
                self.check_shape(e.right, location, boolean=True)
            elif e.operator in COMPARISON_OPS:
                if not boolean:
                    self.fail("typeShape", location, "comparison used as a value")
                self.check_shape(e.left, location, boolean=False)
                self.check_shape(e.right, location, boolean=False)
            else:
                if boolean:
                    self.fail("typeShape", location, "arithmetic used as a condition")
                self.check_shape(e.left, location, boolean=False)
                self.check_shape(e.right, location, boolean=False)
            return
        if isinstance(e, Not):
            if not boolean:
                self.fail("typeShape", location, "NOT used as a value")
            self.check_shape(e.inner, location, boolean=True)
            return
        if isinstance(e, AggregationFunction):
            if boolean:
                self.fail("typeShape", location, "aggregation used as a condition")
            if isinstance(e.inner, Asterisk):
                return
            self.check_shape(e.inner, location, boolean=False)
            return
        if isinstance(e, Asterisk):
            if boolean:
                self.fail("typeShape", location, "asterisk used as a condition")
            return
        # column references and constants are plain values
        if boolean:
            self.fail("typeShape", location, "value used as a condition")

    # -- grouping rules --

    def grouped_keys(self) -> set:
        return {self.resolved_key(e, "group by") for e in self.q.group_by}

    def check_grouped(self, e: Expression, location: str, grouped: set) -> None:
        """Outside aggregates, every column-bearing part must be grouped."""
        if self.resolved_key(e, location) in grouped:
            return
        if isinstance(e, AggregationFunction):
            return
        if isinstance(e, ColumnReference):
            self.fail(
                "ungroupedColumn", location, f"{e.column!r} is neither grouped nor aggregated"
            )
        if isinstance(e, Asterisk):
            self.fail("ungroupedColumn", location, "asterisk under grouping")
        if isinstance(e, Not):
            self.check_grouped(e.inner, location, grouped)
        if isinstance(e, BinaryExpression):
            self.check_grouped(e.left, location, grouped)
            self.check_grouped(e.right, location, grouped)

    def run(self) -> None:
        q = self.q
        if not q.select_elements:
            self.fail("hole", "select", "query has no SELECT elements")
        if not q.from_elements:
            self.fail("hole", "from", "query has no FROM elements")
        for i, fe in enumerate(q.from_elements):
            location = f"from element {i + 1}"
            if fe.table not in self.schema:
                self.fail("unknownTable", location, f"unknown table {fe.table!r}")
        # duplicate visible names make every qualified use ambiguous
        visibles = [v for v, _, _ in self.scope]
        for i, fe in enumerate(q.from_elements):
            location = f"from element {i + 1}"
            visible = fe.alias if fe.alias is not None else fe.table
            if visibles.count(visible) > 1:
                self.fail(
                    "ambiguousColumn", location, f"FROM name {visible!r} appears twice"
                )
        for i, fe in enumerate(q.from_elements):
            location = f"join condition {i + 1}"
            if fe.join_type in CONDITIONED_JOINS:
                self.check_no_holes(fe.join_condition, location)
                self.check_no_aggregation(fe.join_condition, location)
                self.check_references(fe.join_condition, location, in_aggregate=False)
                self.check_shape(fe.join_condition, location, boolean=True)

        for i, el in enumerate(q.select_elements):
            location = f"select element {i + 1}"
            self.check_no_holes(el.expression, location)
            self.check_references(el.expression, location, in_aggregate=False)
            if not (isinstance(el.expression, Asterisk) and el.expression.qualifier is None):
                self.check_shape(el.expression, location, boolean=False)

        if q.where is not None:
            self.check_no_holes(q.where, "where")
            self.check_no_aggregation(q.where, "where")
            self.check_references(q.where, "where", in_aggregate=False)
            self.check_shape(q.where, "where", boolean=True)

        for i, e in enumerate(q.group_by):
            location = f"group by element {i + 1}"
            self.check_no_holes(e, location)
            self.check_no_aggregation(e, location)
            self.check_references(e, location, in_aggregate=False)
            self.check_shape(e, location, boolean=False)

        if q.having is not None:
            self.check_no_holes(q.having, "having")
            self.check_references(q.having, "having", in_aggregate=False)
            self.check_shape(q.having, "having", boolean=True)

        for i, el in enumerate(q.order_by):
            location = f"order by element {i + 1}"
            self.check_no_holes(el.expression, location)
            if (
                isinstance(el.expression, ColumnReference)
                and el.expression.qualifier is None
                and el.expression.column in self.select_aliases
            ):
                continue  # reference to a SELECT alias
            self.check_references(el.expression, location, in_aggregate=False)
            self.check_shape(el.expression, location, boolean=False)

        # grouping discipline: explicit GROUP BY, HAVING, or any aggregate in
        # SELECT puts the query into grouped mode
        has_aggregate = any(
            isinstance(n, AggregationFunction)
            for el in q.select_elements
            for n, _ in iter_expr_nodes(el.expression)
        )
        if q.group_by or q.having is not None or has_aggregate:
            grouped = self.grouped_keys()
            for i, el in enumerate(q.select_elements):
                self.check_grouped(el.expression, f"select element {i + 1}", grouped)
            if q.having is not None:
                self.check_grouped(q.having, "having", grouped)
            for i, el in enumerate(q.order_by):
                location = f"order by element {i + 1}"
                expr = el.expression
                if (
                    isinstance(expr, ColumnReference)
                    and expr.qualifier is None
                    and expr.column in self.select_aliases
                ):
                    expr = self.select_aliases[expr.column]
                self.check_grouped(expr, location, grouped)


def check_executable(q: QueryAst, schema: Schema) -> Optional[ExecutabilityError]:
    """None when the query can run against the schema, the error otherwise."""
    try:
        _Checker(q, schema).run()
    except ExecutabilityError as err:
        return err
    return None


def deduce_schema(destination: QueryAst) -> Schema:
    """Derive a schema from a completely unambiguous destination query.

    Only tables named in FROM and columns attributed to them by qualified
    references (or unqualified ones over a single table) appear; anything the
    query does not mention is missing. Raises SchemaDeductionError when an
    unqualified reference could belong to more than one table, or on holes.
    """
    table_names = []
    for fe in destination.from_elements:
        if fe.table not in table_names:
            table_names.append(fe.table)
    columns: dict = {name: [] for name in table_names}
    visible: dict = {}
    for fe in destination.from_elements:
        name = fe.alias if fe.alias is not None else fe.table
        if name not in visible:
            visible[name] = fe.table

    def attribute(ref: ColumnReference) -> None:
        if ref.qualifier is not None:
            if ref.qualifier not in visible:
                raise SchemaDeductionError(
                    f"qualifier {ref.qualifier!r} does not name a FROM element"
                )
            owner = visible[ref.qualifier]
        else:
            if len(table_names) != 1:
                raise SchemaDeductionError(
                    f"unqualified column {ref.column!r} could belong to more than one table"
                )
            owner = table_names[0]
        if ref.column not in columns[owner]:
            columns[owner].append(ref.column)

    def walk(e) -> None:
        for node, _ in iter_expr_nodes(e):
            if isinstance(node, ColumnReference):
                attribute(node)
            if isinstance(node, Asterisk) and node.qualifier is not None:
                if node.qualifier not in visible:
                    raise SchemaDeductionError(
                        f"qualifier {node.qualifier!r} does not name a FROM element"
                    )
            if isinstance(node, Not) and node.inner is None:
                raise SchemaDeductionError("cannot deduce a schema from a query with holes")
            if isinstance(node, AggregationFunction) and node.inner is None:
                raise SchemaDeductionError("cannot deduce a schema from a query with holes")
            if isinstance(node, BinaryExpression) and (
                node.left is None or node.right is None
            ):
                raise SchemaDeductionError("cannot deduce a schema from a query with holes")

    for el in destination.select_elements:
        if el.expression is None:
            raise SchemaDeductionError("cannot deduce a schema from a query with holes")
        walk(el.expression)
    walk(destination.where)
    for e in destination.group_by:
        if e is None:
            raise SchemaDeductionError("cannot deduce a schema from a query with holes")
        walk(e)
    walk(destination.having)
    for el in destination.order_by:
        if el.expression is None:
            raise SchemaDeductionError("cannot deduce a schema from a query with holes")
        walk(el.expression)
    for fe in destination.from_elements:
        if fe.join_type in CONDITIONED_JOINS:
            if fe.join_condition is None:
                raise SchemaDeductionError("cannot deduce a schema from a query with holes")
            walk(fe.join_condition)

    return Schema(tuple(Table(name, tuple(columns[name]), None) for name in table_names))


def restrict_schema(schema: Schema, destination: QueryAst) -> Schema:
    """Filter the schema down to the parts the destination actually uses.

    Asterisks keep whole tables. The result is a sub-schema of the input;
    primary keys survive only when all their columns do.
    """
    scope = _visible_elements(destination, schema)
    used_tables = {fe.table for fe in destination.from_elements}
    full_tables: set = set()
    used_columns: dict = {t: set() for t in used_tables}

    def resolve(ref: ColumnReference) -> None:
        if ref.qualifier is not None:
            for visible, table, _ in scope:
                if visible == ref.qualifier and table is not None:
                    used_columns.setdefault(table.name, set()).add(ref.column)
                    return
            return
        owners = [
            t for _, t, _ in scope if t is not None and ref.column in t.columns
        ]
        if len(owners) == 1:
            used_columns.setdefault(owners[0].name, set()).add(ref.column)

    def walk(root) -> None:
        for node, _ in iter_expr_nodes(root):
            if isinstance(node, ColumnReference):
                resolve(node)
            elif isinstance(node, Asterisk):
                if node.qualifier is None:
                    full_tables.update(used_tables)
                else:
                    for visible, table, _ in scope:
                        if visible == node.qualifier and table is not None:
                            full_tables.add(table.name)

    for el in destination.select_elements:
        walk(el.expression)
    walk(destination.where)
    for e in destination.group_by:
        walk(e)
    walk(destination.having)
    for el in destination.order_by:
        walk(el.expression)
    for fe in destination.from_elements:
        walk(fe.join_condition)

    tables = []
    for table in schema.tables:
        if table.name not in used_tables:
            continue
        if table.name in full_tables:
            kept = table.columns
        else:
            wanted = used_columns.get(table.name, set())
            kept = tuple(c for c in table.columns if c in wanted)
        key = table.primary_key
        if key is not None and not all(c in kept for c in key):
            key = None
        tables.append(Table(table.name, kept, key))
    return Schema(tuple(tables))
