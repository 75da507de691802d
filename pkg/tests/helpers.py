"""Shared test support: generators, a tiny SQL executor, independent counters.

The executor evaluates a query AST directly over in-memory rows and is the
semantic oracle for equivalence-edit checks; it shares no code with the
package's comparison machinery.
"""

from __future__ import annotations

import random
from typing import Optional

from sqldist import (
    AggregateKind,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    ColumnReference,
    Constant,
    FromElement,
    JoinType,
    Not,
    OrderByElement,
    QueryAst,
    Schema,
    SelectElement,
    SortDirection,
    check_executable,
    parse_query,
    parse_schema,
)
from sqldist.ast_nodes import CONDITIONED_JOINS, child_slots


def q(sql: str) -> QueryAst:
    return parse_query(sql)


def sch(text: str) -> Schema:
    return parse_schema(text)


# -- independent position enumeration for recursivelyReplace checks --------------


def enumerate_positions(root, max_depth: int) -> list:
    """All (slot value, depth) expression positions up to max_depth."""
    positions = []

    def walk(e, depth):
        if depth <= max_depth:
            positions.append((e, depth))
        if e is not None and depth < max_depth:
            for _, child in child_slots(e):
                walk(child, depth + 1)

    walk(root, 0)
    return positions


# -- independent component counting for the greedy-removal bound ----------------


def component_count(query: QueryAst) -> int:
    """Number of removals/unsets needed to empty the query, counted directly."""
    count = 0
    if query.distinct:
        count += 1

    def expr_nodes(e) -> int:
        if e is None:
            return 0
        total = 1
        if isinstance(e, (ColumnReference,)) and e.qualifier is not None:
            total += 1
        if isinstance(e, Asterisk) and e.qualifier is not None:
            total += 1
        if isinstance(e, AggregationFunction):
            if e.is_distinct:
                total += 1
            total += expr_nodes(e.inner)
        if isinstance(e, Not):
            total += expr_nodes(e.inner)
        if isinstance(e, BinaryExpression):
            total += expr_nodes(e.left) + expr_nodes(e.right)
        return total

    for el in query.select_elements:
        count += 1 + expr_nodes(el.expression)
        if el.alias is not None:
            count += 1
    for fe in query.from_elements:
        count += 1 + expr_nodes(fe.join_condition)
        if fe.alias is not None:
            count += 1
    count += expr_nodes(query.where)
    for e in query.group_by:
        count += 1 + expr_nodes(e)
    count += expr_nodes(query.having)
    for el in query.order_by:
        count += 1 + expr_nodes(el.expression)
        if el.direction is SortDirection.DESC:
            count += 1
    return count


def greedy_dismantle(query: QueryAst, schema, meta, edit_set, step_limit: int) -> list:
    """Repeatedly apply the first applicable remove/unset edit.

    Returns the sequence of intermediate queries, ending at the empty query;
    fails the caller's assertion by exceeding step_limit otherwise.
    """
    removals = [
        e
        for e in edit_set
        if e.name.startswith("remove") or e.name.startswith("unset")
    ]
    trace = [query]
    current = query
    empty = QueryAst()
    while current != empty and len(trace) <= step_limit + 1:
        for edit in removals:
            neighbors = edit.perform(current, schema, meta)
            if neighbors:
                current = neighbors[0]
                trace.append(current)
                break
        else:
            break
    return trace


def constructive_dismantle(query: QueryAst, schema, meta, edit_set, step_limit: int):
    """A removal order whose reverse is a pure add/set build script.

    Each step must be undoable by a single add/set edit, so reversing the
    returned trace reconstructs the query from scratch one atomic edit at a
    time. Returns None when no such order is found within the step limit.
    """
    def priority(edit) -> int:
        # dismantle expression content before aliases, aliases before
        # elements, FROM tables last, so every reversed step can re-add
        if edit.name == "removeFromTable":
            return 3
        if edit.name == "unsetFromAlias":
            return 2
        if edit.name in (
            "removeSelectElement",
            "removeGroupByElement",
            "removeOrderByElement",
            "unsetSelectAlias",
            "unsetDistinct",
            "unsetOrderByDirection",
        ):
            return 1
        return 0

    removals = sorted(
        (e for e in edit_set if e.name.startswith(("remove", "unset"))), key=priority
    )
    builders = [e for e in edit_set if e.name.startswith(("add", "set"))]
    empty = QueryAst()

    def single_edit_rebuilds(source, target) -> bool:
        return any(
            any(candidate == target for candidate in b.perform(source, schema, meta))
            for b in builders
        )

    dead_ends = set()

    def dfs(current, budget):
        if current == empty:
            return [current]
        if budget <= 0 or current in dead_ends:
            return None
        for edit in removals:
            for neighbor in edit.perform(current, schema, meta):
                if single_edit_rebuilds(neighbor, current):
                    rest = dfs(neighbor, budget - 1)
                    if rest is not None:
                        return [current] + rest
        dead_ends.add(current)
        return None

    return dfs(query, step_limit)


# -- tiny in-memory SQL executor (semantic oracle) -------------------------------


class MiniDb:
    """Rows per table; executes ASTs directly. Test-only, desk scale."""

    def __init__(self, schema: Schema, rows: dict):
        self.schema = schema
        self.rows = rows

    def _scope(self, query: QueryAst) -> list:
        return [
            (fe.alias if fe.alias is not None else fe.table, fe.table)
            for fe in query.from_elements
        ]

    def _resolve(self, env: dict, scope: list, ref: ColumnReference):
        if ref.qualifier is not None:
            row = env[ref.qualifier]
            return None if row is None else row[ref.column]
        owners = [
            v
            for v, t in scope
            if ref.column in self.schema.table(t).columns
        ]
        if len(owners) != 1:
            raise ValueError(f"ambiguous or unknown column {ref.column}")
        row = env[owners[0]]
        return None if row is None else row[ref.column]

    def _eval(self, e, env: dict, scope: list):
        if isinstance(e, ColumnReference):
            return self._resolve(env, scope, e)
        if isinstance(e, Constant):
            return e.value
        if isinstance(e, Not):
            inner = self._eval(e.inner, env, scope)
            return None if inner is None else not inner
        if isinstance(e, BinaryExpression):
            left = self._eval(e.left, env, scope)
            right = self._eval(e.right, env, scope)
            op = e.operator
            if op is BinaryOp.AND:
                return bool(left) and bool(right)
            if op is BinaryOp.OR:
                return bool(left) or bool(right)
            if left is None or right is None:
                return None if op in (BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV) else False
            if op is BinaryOp.EQ:
                return left == right
            if op is BinaryOp.NE:
                return left != right
            if op is BinaryOp.LT:
                return left < right
            if op is BinaryOp.LE:
                return left <= right
            if op is BinaryOp.GT:
                return left > right
            if op is BinaryOp.GE:
                return left >= right
            if op is BinaryOp.ADD:
                return left + right
            if op is BinaryOp.SUB:
                return left - right
            if op is BinaryOp.MUL:
                return left * right
            if op is BinaryOp.DIV:
                return left / right
        raise ValueError(f"cannot evaluate {e!r}")

    def _eval_aggregate(self, e, group: list, scope: list):
        if isinstance(e, AggregationFunction):
            if isinstance(e.inner, Asterisk):
                if e.kind is AggregateKind.COUNT:
                    return len(group)
                raise ValueError("asterisk only inside COUNT")
            values = [self._eval(e.inner, env, scope) for env in group]
            values = [v for v in values if v is not None]
            if e.is_distinct:
                seen: list = []
                for v in values:
                    if v not in seen:
                        seen.append(v)
                values = seen
            if e.kind is AggregateKind.COUNT:
                return len(values)
            if not values:
                return None
            if e.kind is AggregateKind.SUM:
                return sum(values)
            if e.kind is AggregateKind.AVG:
                return sum(values) / len(values)
            if e.kind is AggregateKind.MIN:
                return min(values)
            if e.kind is AggregateKind.MAX:
                return max(values)
        if isinstance(e, BinaryExpression):
            left = self._eval_aggregate(e.left, group, scope)
            right = self._eval_aggregate(e.right, group, scope)
            return self._combine(e.operator, left, right)
        if isinstance(e, Not):
            inner = self._eval_aggregate(e.inner, group, scope)
            return None if inner is None else not inner
        # plain expression: evaluate against the group's first row
        return self._eval(e, group[0], scope)

    def _combine(self, op, left, right):
        if op is BinaryOp.AND:
            return bool(left) and bool(right)
        if op is BinaryOp.OR:
            return bool(left) or bool(right)
        if left is None or right is None:
            return None if op in (BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV) else False
        return {
            BinaryOp.EQ: lambda: left == right,
            BinaryOp.NE: lambda: left != right,
            BinaryOp.LT: lambda: left < right,
            BinaryOp.LE: lambda: left <= right,
            BinaryOp.GT: lambda: left > right,
            BinaryOp.GE: lambda: left >= right,
            BinaryOp.ADD: lambda: left + right,
            BinaryOp.SUB: lambda: left - right,
            BinaryOp.MUL: lambda: left * right,
            BinaryOp.DIV: lambda: left / right,
        }[op]()

    def _from_rows(self, query: QueryAst) -> list:
        scope = self._scope(query)
        envs = [dict()]
        for i, fe in enumerate(query.from_elements):
            visible = scope[i][0]
            table_rows = self.rows.get(fe.table, [])
            if i == 0:
                envs = [{visible: row} for row in table_rows]
                continue
            joined = []
            if fe.join_type is JoinType.CROSS:
                for env in envs:
                    for row in table_rows:
                        joined.append({**env, visible: row})
            else:
                matched_right = set()
                for env in envs:
                    hit = False
                    for k, row in enumerate(table_rows):
                        candidate = {**env, visible: row}
                        if bool(self._eval(fe.join_condition, candidate, scope)):
                            joined.append(candidate)
                            matched_right.add(k)
                            hit = True
                    if not hit and fe.join_type in (
                        JoinType.LEFT_OUTER,
                        JoinType.FULL_OUTER,
                    ):
                        joined.append({**env, visible: None})
                if fe.join_type in (JoinType.RIGHT_OUTER, JoinType.FULL_OUTER):
                    null_env = {v: None for v, _ in scope[:i]}
                    for k, row in enumerate(table_rows):
                        if k not in matched_right:
                            joined.append({**null_env, visible: row})
            envs = joined
        return envs

    def _select_columns(self, query: QueryAst, element: SelectElement, scope: list):
        """Expand one SELECT element into per-row value extractors."""
        e = element.expression
        if isinstance(e, Asterisk):
            extractors = []
            for visible, table in scope:
                if e.qualifier is not None and visible != e.qualifier:
                    continue
                for column in self.schema.table(table).columns:
                    extractors.append(ColumnReference(visible, column))
            return extractors
        return [e]

    def execute(self, query: QueryAst):
        scope = self._scope(query)
        envs = self._from_rows(query)
        if query.where is not None:
            envs = [env for env in envs if bool(self._eval(query.where, env, scope))]

        def has_aggregate(e) -> bool:
            if e is None:
                return False
            if isinstance(e, AggregationFunction):
                return True
            return any(has_aggregate(c) for _, c in child_slots(e))

        grouped = bool(query.group_by) or query.having is not None or any(
            has_aggregate(el.expression) for el in query.select_elements
        )
        extractor_lists = [self._select_columns(query, el, scope) for el in query.select_elements]

        rows_out = []
        if grouped:
            groups: dict = {}
            for env in envs:
                key = tuple(
                    self._make_key(self._eval(e, env, scope)) for e in query.group_by
                )
                groups.setdefault(key, []).append(env)
            for key in groups:
                group = groups[key]
                if query.having is not None and not bool(
                    self._eval_aggregate(query.having, group, scope)
                ):
                    continue
                row = tuple(
                    self._eval_aggregate(e, group, scope)
                    for extractors in extractor_lists
                    for e in extractors
                )
                rows_out.append((row, group))
        else:
            for env in envs:
                row = tuple(
                    self._eval(e, env, scope)
                    for extractors in extractor_lists
                    for e in extractors
                )
                rows_out.append((row, [env]))

        if query.distinct:
            seen = set()
            unique = []
            for row, group in rows_out:
                key = self._make_key(row)
                if key not in seen:
                    seen.add(key)
                    unique.append((row, group))
            rows_out = unique

        if query.order_by:
            for el in reversed(query.order_by):
                reverse = el.direction is SortDirection.DESC
                rows_out.sort(
                    key=lambda item, el=el: self._make_key(
                        self._eval_aggregate(el.expression, item[1], scope)
                        if grouped
                        else self._eval(el.expression, item[1][0], scope)
                    ),
                    reverse=reverse,
                )
        return [row for row, _ in rows_out]

    @staticmethod
    def _make_key(value):
        # total order across None/int/str for grouping and sorting
        if isinstance(value, tuple):
            return tuple(MiniDb._make_key(v) for v in value)
        if value is None:
            return (0, "")
        if isinstance(value, bool):
            return (1, int(value))
        if isinstance(value, (int, float)):
            return (2, value)
        return (3, str(value))


def result_multiset(rows) -> list:
    return sorted(MiniDb._make_key(tuple(row)) for row in rows)


# -- randomized query generation --------------------------------------------------


def random_destination(
    rng: random.Random,
    schema: Schema,
    max_select: int = 3,
    max_from: int = 2,
    max_depth: int = 2,
) -> QueryAst:
    """A random executable destination within the stated bounds."""
    for _ in range(200):
        candidate = _random_query(rng, schema, max_select, max_from, max_depth)
        if check_executable(candidate, schema) is None:
            return candidate
    raise AssertionError("could not generate an executable destination")


def _columns(schema: Schema, tables: list) -> list:
    out = []
    for name in tables:
        for column in schema.table(name).columns:
            out.append((name, column))
    return out


def _random_query(rng, schema, max_select, max_from, max_depth) -> QueryAst:
    n_from = rng.randint(1, max_from)
    table_names = [t.name for t in schema.tables]
    tables = rng.sample(table_names, min(n_from, len(table_names)))
    from_elements = []
    for i, name in enumerate(tables):
        if i == 0:
            from_elements.append(FromElement(name))
        elif rng.random() < 0.5:
            from_elements.append(FromElement(name, None, JoinType.CROSS, None))
        else:
            left = rng.choice(_columns(schema, tables[:1]))
            right = rng.choice(_columns(schema, [name]))
            condition = BinaryExpression(
                BinaryOp.EQ,
                ColumnReference(left[0], left[1]),
                ColumnReference(name, right[1]),
            )
            from_elements.append(FromElement(name, None, JoinType.INNER, condition))

    pairs = _columns(schema, tables)
    multi = len(tables) > 1

    def colref(pair) -> ColumnReference:
        table, column = pair
        ambiguous = sum(1 for t, c in pairs if c == column) > 1
        if multi and (ambiguous or rng.random() < 0.4):
            return ColumnReference(table, column)
        return ColumnReference(None, column)

    n_select = rng.randint(1, max_select)
    use_aggregate = rng.random() < 0.2
    select_elements = []
    if use_aggregate:
        kind = rng.choice(list(AggregateKind))
        inner = (
            Asterisk(None)
            if kind is AggregateKind.COUNT and rng.random() < 0.5
            else colref(rng.choice(pairs))
        )
        select_elements.append(SelectElement(AggregationFunction(kind, False, inner)))
    else:
        for _ in range(n_select):
            if rng.random() < 0.1:
                select_elements.append(SelectElement(Asterisk(None)))
            else:
                element = SelectElement(colref(rng.choice(pairs)))
                select_elements.append(element)

    where = None
    if rng.random() < 0.5:
        pair = rng.choice(pairs)
        op = rng.choice((BinaryOp.GT, BinaryOp.LT, BinaryOp.EQ))
        where = BinaryExpression(op, colref(pair), Constant(rng.randint(0, 30)))
        if rng.random() < 0.2 and max_depth >= 2:
            other = rng.choice(pairs)
            second = BinaryExpression(BinaryOp.NE, colref(other), Constant(rng.randint(0, 30)))
            where = BinaryExpression(BinaryOp.AND, where, second)

    order_by = ()
    if not use_aggregate and rng.random() < 0.2:
        direction = rng.choice((SortDirection.ASC, SortDirection.DESC))
        order_by = (OrderByElement(select_elements[0].expression, direction),)

    return QueryAst(
        distinct=rng.random() < 0.2,
        select_elements=tuple(select_elements),
        from_elements=tuple(from_elements),
        where=where,
        group_by=(),
        having=None,
        order_by=order_by,
    )


def mutate_query(rng: random.Random, query: QueryAst, schema: Schema, steps: int) -> QueryAst:
    """Student-style random tweaks; the result stays a valid AST."""
    current = query
    for _ in range(steps):
        mutators = rng.sample(_MUTATORS, len(_MUTATORS))
        for mutate in mutators:
            result = mutate(rng, current, schema)
            if result is not None:
                current = result
                break
    return current


def _mut_toggle_distinct(rng, query, schema):
    return query.set_distinct(not query.distinct)


def _mut_change_column(rng, query, schema):
    if not query.select_elements:
        return None
    index = rng.randrange(len(query.select_elements))
    element = query.select_elements[index]
    if not isinstance(element.expression, ColumnReference):
        return None
    table = rng.choice(schema.tables)
    column = rng.choice(table.columns)
    return query.replace_select_element(
        index, SelectElement(ColumnReference(element.expression.qualifier, column), element.alias)
    )


def _mut_drop_select(rng, query, schema):
    if len(query.select_elements) < 2:
        return None
    return query.remove_select_element(rng.randrange(len(query.select_elements)))


def _mut_dup_select(rng, query, schema):
    if not query.select_elements:
        return None
    index = rng.randrange(len(query.select_elements))
    return query.insert_select_element(index, query.select_elements[index])


def _mut_swap_select(rng, query, schema):
    if len(query.select_elements) < 2:
        return None
    elements = list(query.select_elements)
    i, j = rng.sample(range(len(elements)), 2)
    elements[i], elements[j] = elements[j], elements[i]
    return QueryAst(
        query.distinct,
        tuple(elements),
        query.from_elements,
        query.where,
        query.group_by,
        query.having,
        query.order_by,
    )


def _mut_drop_where(rng, query, schema):
    if query.where is None:
        return None
    return query.set_where(None)


def _mut_tweak_where(rng, query, schema):
    if not isinstance(query.where, BinaryExpression):
        return None
    w = query.where
    if isinstance(w.right, Constant) and isinstance(w.right.value, int):
        return query.set_where(
            BinaryExpression(w.operator, w.left, Constant(w.right.value + rng.randint(1, 5)))
        )
    flips = {BinaryOp.GT: BinaryOp.LT, BinaryOp.LT: BinaryOp.GT, BinaryOp.EQ: BinaryOp.NE}
    if w.operator in flips:
        return query.set_where(BinaryExpression(flips[w.operator], w.left, w.right))
    return None


def _mut_hole_select(rng, query, schema):
    if not query.select_elements:
        return None
    index = rng.randrange(len(query.select_elements))
    element = query.select_elements[index]
    if element.expression is None:
        return None
    return query.replace_select_element(index, SelectElement(None, element.alias))


def _mut_drop_order(rng, query, schema):
    if not query.order_by:
        return None
    return query.remove_order_by_element(rng.randrange(len(query.order_by)))


_MUTATORS = [
    _mut_toggle_distinct,
    _mut_change_column,
    _mut_drop_select,
    _mut_dup_select,
    _mut_swap_select,
    _mut_drop_where,
    _mut_tweak_where,
    _mut_hole_select,
    _mut_drop_order,
]
