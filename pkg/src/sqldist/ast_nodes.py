"""Immutable AST types for the supported SELECT-query subset.

Queries are value objects: every "setter" returns a fresh tree, untouched
subtrees are shared between old and new values. Any expression slot may be
empty (``None``), so arbitrarily incomplete queries are representable; an
empty slot renders as ``_``.

Two queries compare equal when their structures match after FROM aliases on
both sides have been renamed positionally ("a1", "a2", ...). Alias spelling
never distinguishes two queries, alias presence does. The structural hash is
a mixed-radix fold over the canonicalized tree and is stable across runs and
processes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Iterator, Optional, Union


class BinaryOp(Enum):
    EQ = "="
    NE = "<>"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    AND = "AND"
    OR = "OR"
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"


COMPARISON_OPS = frozenset(
    {BinaryOp.EQ, BinaryOp.NE, BinaryOp.LT, BinaryOp.LE, BinaryOp.GT, BinaryOp.GE}
)
LOGICAL_OPS = frozenset({BinaryOp.AND, BinaryOp.OR})
ARITHMETIC_OPS = frozenset({BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV})

#: mirror image of a comparison, used when operand order is swapped
MIRRORED_COMPARISON = {
    BinaryOp.EQ: BinaryOp.EQ,
    BinaryOp.NE: BinaryOp.NE,
    BinaryOp.LT: BinaryOp.GT,
    BinaryOp.GT: BinaryOp.LT,
    BinaryOp.LE: BinaryOp.GE,
    BinaryOp.GE: BinaryOp.LE,
}


class AggregateKind(Enum):
    COUNT = "COUNT"
    SUM = "SUM"
    AVG = "AVG"
    MIN = "MIN"
    MAX = "MAX"


class JoinType(Enum):
    INNER = "INNER"
    LEFT_OUTER = "LEFT_OUTER"
    RIGHT_OUTER = "RIGHT_OUTER"
    FULL_OUTER = "FULL_OUTER"
    CROSS = "CROSS"


#: join types that carry an ON condition slot
CONDITIONED_JOINS = frozenset(
    {JoinType.INNER, JoinType.LEFT_OUTER, JoinType.RIGHT_OUTER, JoinType.FULL_OUTER}
)


class SortDirection(Enum):
    ASC = "ASC"
    DESC = "DESC"


class Expression:
    """Marker base for the closed set of expression variants."""

    __slots__ = ()


def _check_identifier(name: object, what: str) -> None:
    if not isinstance(name, str) or not name:
        raise ValueError(f"{what} must be a non-empty identifier, got {name!r}")


@dataclass(frozen=True)
class Asterisk(Expression):
    qualifier: Optional[str] = None

    def __post_init__(self) -> None:
        if self.qualifier is not None:
            _check_identifier(self.qualifier, "asterisk qualifier")


@dataclass(frozen=True)
class ColumnReference(Expression):
    qualifier: Optional[str]
    column: str

    def __post_init__(self) -> None:
        if self.qualifier is not None:
            _check_identifier(self.qualifier, "column qualifier")
        _check_identifier(self.column, "column name")


@dataclass(frozen=True)
class Constant(Expression):
    value: Union[int, str]

    def __post_init__(self) -> None:
        if type(self.value) not in (int, str):
            raise ValueError(f"constant must be int or str, got {self.value!r}")


@dataclass(frozen=True)
class Not(Expression):
    inner: Optional[Expression] = None


@dataclass(frozen=True)
class AggregationFunction(Expression):
    kind: AggregateKind
    is_distinct: bool = False
    inner: Optional[Expression] = None


@dataclass(frozen=True)
class BinaryExpression(Expression):
    operator: BinaryOp
    left: Optional[Expression] = None
    right: Optional[Expression] = None


@dataclass(frozen=True)
class SelectElement:
    expression: Optional[Expression] = None
    alias: Optional[str] = None

    def __post_init__(self) -> None:
        if self.alias is not None:
            _check_identifier(self.alias, "select alias")


@dataclass(frozen=True)
class FromElement:
    table: str
    alias: Optional[str] = None
    join_type: Optional[JoinType] = None
    join_condition: Optional[Expression] = None

    def __post_init__(self) -> None:
        _check_identifier(self.table, "table name")
        if self.alias is not None:
            _check_identifier(self.alias, "table alias")
        if self.join_condition is not None and self.join_type not in CONDITIONED_JOINS:
            raise ValueError("join condition requires a conditioned join type")


@dataclass(frozen=True)
class OrderByElement:
    expression: Optional[Expression] = None
    direction: SortDirection = SortDirection.ASC

    def __post_init__(self) -> None:
        if not isinstance(self.direction, SortDirection):
            raise ValueError("order-by direction must always be set")


class Clause(Enum):
    """Places where expression trees live inside a query."""

    SELECT = "select"
    WHERE = "where"
    GROUP_BY = "groupBy"
    HAVING = "having"
    ORDER_BY = "orderBy"
    JOIN_CONDITION = "joinCondition"


ALL_CLAUSES = tuple(Clause)

#: multimap signature for recursive replacement: (slot value, ancestor stack,
#: outermost first) -> replacement slot values. ``None`` means "empty slot".
Multimap = Callable[[Optional[Expression], tuple], Iterable[Optional[Expression]]]


@dataclass(frozen=True, eq=False)
class QueryAst:
    """One SELECT query, possibly incomplete. The search-graph node type.

    Equality and hashing are canonical: FROM aliases are positionally renamed
    on both sides before comparison, so alias spelling never separates nodes.
    """

    distinct: bool = False
    select_elements: tuple = ()
    from_elements: tuple = ()
    where: Optional[Expression] = None
    group_by: tuple = ()
    having: Optional[Expression] = None
    order_by: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "select_elements", tuple(self.select_elements))
        object.__setattr__(self, "from_elements", tuple(self.from_elements))
        object.__setattr__(self, "group_by", tuple(self.group_by))
        object.__setattr__(self, "order_by", tuple(self.order_by))
        for i, fe in enumerate(self.from_elements):
            if i == 0:
                if fe.join_type is not None:
                    raise ValueError("first FROM element cannot have a join type")
            elif fe.join_type is None:
                raise ValueError("every FROM element after the first needs a join type")

    # -- canonical comparison ------------------------------------------------

    def canonical(self) -> "QueryAst":
        cached = self.__dict__.get("_canonical")
        if cached is None:
            cached = _canonicalize(self)
            object.__setattr__(self, "_canonical", cached)
        return cached

    def canonical_hash(self) -> int:
        cached = self.__dict__.get("_canonical_hash")
        if cached is None:
            cached = structural_hash(self).value
            object.__setattr__(self, "_canonical_hash", cached)
        return cached

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, QueryAst):
            return NotImplemented
        if self.canonical_hash() != other.canonical_hash():
            return False
        return _fields_equal(self.canonical(), other.canonical())

    def __hash__(self) -> int:
        return self.canonical_hash() % ((1 << 61) - 1)

    def __str__(self) -> str:
        return render(self)

    # -- setters (all return fresh values) -----------------------------------

    def set_distinct(self, value: bool) -> "QueryAst":
        return replace(self, distinct=bool(value))

    def set_where(self, expression: Optional[Expression]) -> "QueryAst":
        return replace(self, where=expression)

    def set_having(self, expression: Optional[Expression]) -> "QueryAst":
        return replace(self, having=expression)

    def insert_select_element(self, index: int, element: SelectElement) -> "QueryAst":
        return replace(self, select_elements=_insert(self.select_elements, index, element))

    def remove_select_element(self, index: int) -> "QueryAst":
        return replace(self, select_elements=_remove(self.select_elements, index))

    def replace_select_element(self, index: int, element: SelectElement) -> "QueryAst":
        return replace(self, select_elements=_set(self.select_elements, index, element))

    def insert_from_element(self, index: int, element: FromElement) -> "QueryAst":
        return replace(self, from_elements=_insert(self.from_elements, index, element))

    def remove_from_element(self, index: int) -> "QueryAst":
        return replace(self, from_elements=_remove(self.from_elements, index))

    def replace_from_element(self, index: int, element: FromElement) -> "QueryAst":
        return replace(self, from_elements=_set(self.from_elements, index, element))

    def insert_group_by_element(self, index: int, expr: Optional[Expression]) -> "QueryAst":
        return replace(self, group_by=_insert(self.group_by, index, expr))

    def remove_group_by_element(self, index: int) -> "QueryAst":
        return replace(self, group_by=_remove(self.group_by, index))

    def replace_group_by_element(self, index: int, expr: Optional[Expression]) -> "QueryAst":
        return replace(self, group_by=_set(self.group_by, index, expr))

    def insert_order_by_element(self, index: int, element: OrderByElement) -> "QueryAst":
        return replace(self, order_by=_insert(self.order_by, index, element))

    def remove_order_by_element(self, index: int) -> "QueryAst":
        return replace(self, order_by=_remove(self.order_by, index))

    def replace_order_by_element(self, index: int, element: OrderByElement) -> "QueryAst":
        return replace(self, order_by=_set(self.order_by, index, element))

    # -- recursive replacement entry points ----------------------------------

    def replace_select(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.SELECT, multimap, max_depth)

    def replace_where(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.WHERE, multimap, max_depth)

    def replace_group_by(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.GROUP_BY, multimap, max_depth)

    def replace_having(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.HAVING, multimap, max_depth)

    def replace_order_by(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.ORDER_BY, multimap, max_depth)

    def replace_join_conditions(self, multimap: Multimap, max_depth: int) -> list:
        return replace_expressions(self, Clause.JOIN_CONDITION, multimap, max_depth)


EMPTY_QUERY = QueryAst()


def _insert(items: tuple, index: int, value) -> tuple:
    if not 0 <= index <= len(items):
        raise IndexError(f"insert position {index} out of range for {len(items)} items")
    return items[:index] + (value,) + items[index:]


def _remove(items: tuple, index: int) -> tuple:
    if not 0 <= index < len(items):
        raise IndexError(f"index {index} out of range for {len(items)} items")
    return items[:index] + items[index + 1 :]


def _set(items: tuple, index: int, value) -> tuple:
    if not 0 <= index < len(items):
        raise IndexError(f"index {index} out of range for {len(items)} items")
    return items[:index] + (value,) + items[index + 1 :]


def _fields_equal(a: QueryAst, b: QueryAst) -> bool:
    return (
        a.distinct == b.distinct
        and a.select_elements == b.select_elements
        and a.from_elements == b.from_elements
        and a.where == b.where
        and a.group_by == b.group_by
        and a.having == b.having
        and a.order_by == b.order_by
    )


def canonical_equal(a: QueryAst, b: QueryAst) -> bool:
    """Equality modulo positional FROM-alias renaming."""
    return a == b


# -- alias canonicalization ----------------------------------------------------


def _canonicalize(q: QueryAst) -> QueryAst:
    mapping: dict = {}
    for fe in q.from_elements:
        if fe.alias is not None and fe.alias not in mapping:
            mapping[fe.alias] = f"a{len(mapping) + 1}"
    if not mapping:
        return q

    def requalify(e: Optional[Expression]) -> Optional[Expression]:
        if e is None:
            return None
        if isinstance(e, Asterisk):
            if e.qualifier in mapping:
                return Asterisk(mapping[e.qualifier])
            return e
        if isinstance(e, ColumnReference):
            if e.qualifier in mapping:
                return ColumnReference(mapping[e.qualifier], e.column)
            return e
        if isinstance(e, Not):
            return Not(requalify(e.inner))
        if isinstance(e, AggregationFunction):
            return AggregationFunction(e.kind, e.is_distinct, requalify(e.inner))
        if isinstance(e, BinaryExpression):
            return BinaryExpression(e.operator, requalify(e.left), requalify(e.right))
        return e

    return QueryAst(
        distinct=q.distinct,
        select_elements=tuple(
            SelectElement(requalify(el.expression), el.alias) for el in q.select_elements
        ),
        from_elements=tuple(
            FromElement(
                fe.table,
                mapping.get(fe.alias, fe.alias) if fe.alias is not None else None,
                fe.join_type,
                requalify(fe.join_condition),
            )
            for fe in q.from_elements
        ),
        where=requalify(q.where),
        group_by=tuple(requalify(e) for e in q.group_by),
        having=requalify(q.having),
        order_by=tuple(
            OrderByElement(requalify(el.expression), el.direction) for el in q.order_by
        ),
    )


# -- structural hashing --------------------------------------------------------


@dataclass(frozen=True)
class HashValue:
    """A hash together with the exclusive bound of its value space.

    Folding a child into a parent shifts the parent into the child's radix:
    ``combine(p, c).value == p.value * c.max + c.value``. Values are exact
    integers, so the bound invariant holds without wrap-around.
    """

    value: int
    max: int

    def __post_init__(self) -> None:
        if self.max < 2:
            raise ValueError("hash space must be at least 2")
        if not 0 <= self.value < self.max:
            raise ValueError("hash value out of bounds")


def combine(parent: HashValue, child: HashValue) -> HashValue:
    return HashValue(parent.value * child.max + child.value, parent.max * child.max)


_WORD = 1 << 64

# variant tags; one shared space keeps different node types separated
_TAGS = {
    QueryAst: 1,
    SelectElement: 2,
    FromElement: 3,
    OrderByElement: 4,
    Asterisk: 5,
    ColumnReference: 6,
    Constant: 7,
    Not: 8,
    AggregationFunction: 9,
    BinaryExpression: 10,
}
_TAG_SPACE = 16

_BINOP_INDEX = {op: i for i, op in enumerate(BinaryOp)}
_AGG_INDEX = {k: i for i, k in enumerate(AggregateKind)}
_JOIN_INDEX = {j: i for i, j in enumerate(JoinType)}
_DIR_INDEX = {d: i for i, d in enumerate(SortDirection)}

_STRING_HASHES: dict = {}


def _fnv64(text: str) -> int:
    h = _STRING_HASHES.get(text)
    if h is None:
        h = 0xCBF29CE484222325
        for b in text.encode("utf-8"):
            h = ((h ^ b) * 0x100000001B3) % _WORD
        _STRING_HASHES[text] = h
    return h


# The fold below works on plain (value, max) integer pairs; HashValue only
# wraps the result at the API boundary. Both obey the same combine law.


def _hash_node(node) -> tuple:
    t = type(node)
    v, m = _TAGS[t], _TAG_SPACE
    if t is ColumnReference:
        if node.qualifier is None:
            v, m = v * 2, m * 2
        else:
            v, m = (v * 2 + 1) * _WORD + _fnv64(node.qualifier), m * 2 * _WORD
        return v * _WORD + _fnv64(node.column), m * _WORD
    if t is Constant:
        if isinstance(node.value, int):
            return (v * 2) * _WORD + node.value % _WORD, m * 2 * _WORD
        return (v * 2 + 1) * _WORD + _fnv64(node.value), m * 2 * _WORD
    if t is Asterisk:
        if node.qualifier is None:
            return v * 2, m * 2
        return (v * 2 + 1) * _WORD + _fnv64(node.qualifier), m * 2 * _WORD
    if t is BinaryExpression:
        v = v * len(BinaryOp) + _BINOP_INDEX[node.operator]
        m = m * len(BinaryOp)
        v, m = _fold_opt(v, m, node.left)
        return _fold_opt(v, m, node.right)
    if t is Not:
        return _fold_opt(v, m, node.inner)
    if t is AggregationFunction:
        v = (v * len(AggregateKind) + _AGG_INDEX[node.kind]) * 2 + node.is_distinct
        m = m * len(AggregateKind) * 2
        return _fold_opt(v, m, node.inner)
    if t is SelectElement:
        v, m = _fold_opt(v, m, node.expression)
        if node.alias is None:
            return v * 2, m * 2
        return (v * 2 + 1) * _WORD + _fnv64(node.alias), m * 2 * _WORD
    if t is FromElement:
        v, m = v * _WORD + _fnv64(node.table), m * _WORD
        if node.alias is None:
            v, m = v * 2, m * 2
        else:
            v, m = (v * 2 + 1) * _WORD + _fnv64(node.alias), m * 2 * _WORD
        if node.join_type is None:
            v, m = v * 2, m * 2
        else:
            v = (v * 2 + 1) * len(JoinType) + _JOIN_INDEX[node.join_type]
            m = m * 2 * len(JoinType)
        return _fold_opt(v, m, node.join_condition)
    if t is OrderByElement:
        v, m = _fold_opt(v, m, node.expression)
        return v * 2 + _DIR_INDEX[node.direction], m * 2
    if t is QueryAst:
        v, m = v * 2 + node.distinct, m * 2
        v, m = _fold_list(v, m, node.select_elements)
        v, m = _fold_list(v, m, node.from_elements)
        v, m = _fold_opt(v, m, node.where)
        v, m = _fold_list(v, m, node.group_by, opt=True)
        v, m = _fold_opt(v, m, node.having)
        return _fold_list(v, m, node.order_by)
    raise TypeError(f"not an AST component: {node!r}")


def _fold_opt(v: int, m: int, node) -> tuple:
    if node is None:
        return v * 2, m * 2
    cv, cm = _hash_node(node)
    return (v * 2 + 1) * cm + cv, m * 2 * cm


def _fold_list(v: int, m: int, items: tuple, opt: bool = False) -> tuple:
    v, m = v * _WORD + len(items), m * _WORD
    for item in items:
        if opt:
            v, m = _fold_opt(v, m, item)
        else:
            cv, cm = _hash_node(item)
            v, m = v * cm + cv, m * cm
    return v, m


def structural_hash(node) -> HashValue:
    """Deterministic hash of any AST component.

    Whole queries are hashed after alias canonicalization, so canonically
    equal queries always hash alike.
    """
    if isinstance(node, QueryAst):
        value, space = _hash_node(node.canonical())
    else:
        value, space = _hash_node(node)
    return HashValue(value, space)


# -- traversal helpers ---------------------------------------------------------

_CHILD_SLOTS = {
    Not: ("inner",),
    AggregationFunction: ("inner",),
    BinaryExpression: ("left", "right"),
}


def child_slots(e: Expression) -> tuple:
    """(slot name, child-or-None) pairs of a node's nested expression slots."""
    names = _CHILD_SLOTS.get(type(e), ())
    return tuple((n, getattr(e, n)) for n in names)


def iter_expr_nodes(root: Optional[Expression], depth: int = 0) -> Iterator[tuple]:
    """Yield (node, depth) for every present node under ``root``."""
    if root is None:
        return
    yield root, depth
    for _, child in child_slots(root):
        yield from iter_expr_nodes(child, depth + 1)


def contains_aggregation(root: Optional[Expression]) -> bool:
    return any(isinstance(n, AggregationFunction) for n, _ in iter_expr_nodes(root))


def clause_expression_roots(q: QueryAst, clause: Clause) -> tuple:
    """Root expression slots of a clause (entries may be None)."""
    if clause is Clause.SELECT:
        return tuple(el.expression for el in q.select_elements)
    if clause is Clause.WHERE:
        return (q.where,)
    if clause is Clause.GROUP_BY:
        return q.group_by
    if clause is Clause.HAVING:
        return (q.having,)
    if clause is Clause.ORDER_BY:
        return tuple(el.expression for el in q.order_by)
    if clause is Clause.JOIN_CONDITION:
        return tuple(
            fe.join_condition for fe in q.from_elements if fe.join_type in CONDITIONED_JOINS
        )
    raise ValueError(clause)


def _replace_slot(
    e: Optional[Expression],
    stack: tuple,
    multimap: Multimap,
    max_depth: int,
    depth: int = 0,
) -> list:
    out = []
    if depth <= max_depth:
        out.extend(multimap(e, stack))
    if e is not None and depth < max_depth:
        child_stack = stack + (e,)
        for slot, child in child_slots(e):
            for new_child in _replace_slot(child, child_stack, multimap, max_depth, depth + 1):
                out.append(replace(e, **{slot: new_child}))
    return out


def replace_expressions(
    q: QueryAst, clause: Clause, multimap: Multimap, max_depth: int
) -> list:
    """Apply ``multimap`` at every expression position of ``clause``.

    A position is any expression slot (occupied or empty) whose depth, counted
    in expression ancestors from the clause root, is at most ``max_depth``.
    One new query is returned per produced replacement; ``q`` is untouched.
    """
    if max_depth < 0:
        return []
    results: list = []
    if clause is Clause.SELECT:
        for i, el in enumerate(q.select_elements):
            for new in _replace_slot(el.expression, (), multimap, max_depth):
                results.append(q.replace_select_element(i, replace(el, expression=new)))
    elif clause is Clause.WHERE:
        for new in _replace_slot(q.where, (), multimap, max_depth):
            results.append(q.set_where(new))
    elif clause is Clause.GROUP_BY:
        for i, expr in enumerate(q.group_by):
            for new in _replace_slot(expr, (), multimap, max_depth):
                results.append(q.replace_group_by_element(i, new))
    elif clause is Clause.HAVING:
        for new in _replace_slot(q.having, (), multimap, max_depth):
            results.append(q.set_having(new))
    elif clause is Clause.ORDER_BY:
        for i, el in enumerate(q.order_by):
            for new in _replace_slot(el.expression, (), multimap, max_depth):
                results.append(q.replace_order_by_element(i, replace(el, expression=new)))
    elif clause is Clause.JOIN_CONDITION:
        for i, fe in enumerate(q.from_elements):
            if fe.join_type not in CONDITIONED_JOINS:
                continue
            for new in _replace_slot(fe.join_condition, (), multimap, max_depth):
                results.append(q.replace_from_element(i, replace(fe, join_condition=new)))
    else:
        raise ValueError(clause)
    return results


# -- rendering -----------------------------------------------------------------

_PRECEDENCE = {BinaryOp.OR: 1, BinaryOp.AND: 2}
_PRECEDENCE.update({op: 4 for op in COMPARISON_OPS})
_PRECEDENCE.update({BinaryOp.ADD: 5, BinaryOp.SUB: 5})
_PRECEDENCE.update({BinaryOp.MUL: 6, BinaryOp.DIV: 6})
_NOT_PRECEDENCE = 3

_JOIN_SQL = {
    JoinType.INNER: "INNER JOIN",
    JoinType.LEFT_OUTER: "LEFT OUTER JOIN",
    JoinType.RIGHT_OUTER: "RIGHT OUTER JOIN",
    JoinType.FULL_OUTER: "FULL OUTER JOIN",
}


def _render_expr(e: Optional[Expression], parent_prec: int = 0, right_side: bool = False) -> str:
    if e is None:
        return "_"
    if isinstance(e, Asterisk):
        return f"{e.qualifier}.*" if e.qualifier else "*"
    if isinstance(e, ColumnReference):
        return f"{e.qualifier}.{e.column}" if e.qualifier else e.column
    if isinstance(e, Constant):
        if isinstance(e.value, int):
            return str(e.value)
        escaped = e.value.replace("'", "''")
        return f"'{escaped}'"
    if isinstance(e, AggregationFunction):
        prefix = "DISTINCT " if e.is_distinct else ""
        return f"{e.kind.value}({prefix}{_render_expr(e.inner)})"
    if isinstance(e, Not):
        text = f"NOT {_render_expr(e.inner, _NOT_PRECEDENCE)}"
        if parent_prec > _NOT_PRECEDENCE:
            return f"({text})"
        return text
    if isinstance(e, BinaryExpression):
        prec = _PRECEDENCE[e.operator]
        left = _render_expr(e.left, prec)
        right = _render_expr(e.right, prec, right_side=True)
        text = f"{left} {e.operator.value} {right}"
        if prec < parent_prec or (prec == parent_prec and right_side):
            return f"({text})"
        return text
    raise TypeError(f"not an expression: {e!r}")


def _render_select_element(el: SelectElement) -> str:
    text = _render_expr(el.expression)
    if el.alias is not None:
        text += f" AS {el.alias}"
    return text


def _render_from(from_elements: tuple) -> str:
    parts = []
    for i, fe in enumerate(from_elements):
        name = fe.table if fe.alias is None else f"{fe.table} {fe.alias}"
        if i == 0:
            parts.append(name)
        elif fe.join_type is JoinType.CROSS:
            parts.append(f", {name}")
        else:
            cond = _render_expr(fe.join_condition)
            parts.append(f" {_JOIN_SQL[fe.join_type]} {name} ON {cond}")
    return "".join(parts)


def render(q: QueryAst, separator: str = "\n") -> str:
    """Deterministic SQL-like text, one clause per line; empty slots as "_"."""
    lines = []
    select = ", ".join(_render_select_element(el) for el in q.select_elements) or "_"
    lines.append(f"SELECT DISTINCT {select}" if q.distinct else f"SELECT {select}")
    if q.from_elements:
        lines.append(f"FROM {_render_from(q.from_elements)}")
    if q.where is not None:
        lines.append(f"WHERE {_render_expr(q.where)}")
    if q.group_by:
        lines.append("GROUP BY " + ", ".join(_render_expr(e) for e in q.group_by))
    if q.having is not None:
        lines.append(f"HAVING {_render_expr(q.having)}")
    if q.order_by:
        lines.append(
            "ORDER BY "
            + ", ".join(
                f"{_render_expr(el.expression)} {el.direction.value}" for el in q.order_by
            )
        )
    return separator.join(lines)
