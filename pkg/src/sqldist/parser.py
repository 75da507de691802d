"""Parsers for the query subset (holes included) and the schema text format.

The query parser is a hand-written recursive descent over a small grammar so
that student fragments survive: ``_`` is accepted wherever an expression is
expected, aggregation arguments may be empty (``AVG( )``), and a trailing
binary operator ("WHERE age >") leaves an empty right operand.
"""

from __future__ import annotations

from typing import Optional, Union

from .ast_nodes import (
    AggregateKind,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    ColumnReference,
    Constant,
    Expression,
    FromElement,
    JoinType,
    Not,
    OrderByElement,
    QueryAst,
    SelectElement,
    SortDirection,
)
from .schema import Schema, Table


class ParseError(Exception):
    """Input that cannot be shaped into even an incomplete AST."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.message = message
        self.position = position


_KEYWORDS = {
    "SELECT", "DISTINCT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER",
    "ASC", "DESC", "AS", "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER",
    "CROSS", "ON", "NOT", "AND", "OR",
    "COUNT", "SUM", "AVG", "MIN", "MAX",
}

_SYMBOLS = ("<>", "<=", ">=", "=", "<", ">", "+", "-", "*", "/", "(", ")", ",", ".", ";")

_AGGREGATES = {k.value: k for k in AggregateKind}

_COMPARISONS = {
    "=": BinaryOp.EQ, "<>": BinaryOp.NE, "<": BinaryOp.LT,
    "<=": BinaryOp.LE, ">": BinaryOp.GT, ">=": BinaryOp.GE,
}
_ADDITIVE = {"+": BinaryOp.ADD, "-": BinaryOp.SUB}
_MULTIPLICATIVE = {"*": BinaryOp.MUL, "/": BinaryOp.DIV}


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind  # IDENT, KEYWORD, INT, STRING, SYMBOL, HOLE, EOF
        self.text = text
        self.pos = pos

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"_Token({self.kind}, {self.text!r}, {self.pos})"


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("--", i):
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        pos = _byte_offset(text, i)
        if c == "'":
            j = i + 1
            chunks = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", pos)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        chunks.append("'")
                        j += 2
                        continue
                    break
                chunks.append(text[j])
                j += 1
            tokens.append(_Token("STRING", "".join(chunks), pos))
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], pos))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "_":
                tokens.append(_Token("HOLE", word, pos))
            elif word.upper() in _KEYWORDS:
                tokens.append(_Token("KEYWORD", word.upper(), pos))
            else:
                tokens.append(_Token("IDENT", word, pos))
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token("SYMBOL", sym, pos))
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", pos)
    tokens.append(_Token("EOF", "", _byte_offset(text, n)))
    return tokens


class _QueryParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    # -- token helpers --

    @property
    def cur(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.index += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        return self.cur.kind == "KEYWORD" and self.cur.text in words

    def at_symbol(self, *symbols: str) -> bool:
        return self.cur.kind == "SYMBOL" and self.cur.text in symbols

    def accept_keyword(self, *words: str) -> bool:
        if self.at_keyword(*words):
            self.advance()
            return True
        return False

    def accept_symbol(self, *symbols: str) -> bool:
        if self.at_symbol(*symbols):
            self.advance()
            return True
        return False

    def expect_symbol(self, symbol: str) -> None:
        if not self.accept_symbol(symbol):
            raise ParseError(f"expected {symbol!r}", self.cur.pos)

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.cur.pos)

    # -- grammar --

    def parse(self) -> QueryAst:
        distinct = False
        select_elements: list = []
        from_elements: list = []
        where = having = None
        group_by: list = []
        order_by: list = []

        if self.accept_keyword("SELECT"):
            distinct = self.accept_keyword("DISTINCT")
            select_elements = self.parse_select_list()
        if self.accept_keyword("FROM"):
            from_elements = self.parse_from_list()
        if self.accept_keyword("WHERE"):
            where = self.parse_expression()
        if self.accept_keyword("GROUP"):
            if not self.accept_keyword("BY"):
                raise self.error("expected BY after GROUP")
            group_by = self.parse_expression_list()
        if self.accept_keyword("HAVING"):
            having = self.parse_expression()
        if self.accept_keyword("ORDER"):
            if not self.accept_keyword("BY"):
                raise self.error("expected BY after ORDER")
            order_by = self.parse_order_by_list()
        self.accept_symbol(";")
        if self.cur.kind != "EOF":
            raise self.error(f"unexpected {self.cur.text!r}")
        return QueryAst(
            distinct=distinct,
            select_elements=tuple(select_elements),
            from_elements=tuple(from_elements),
            where=where,
            group_by=tuple(group_by),
            having=having,
            order_by=tuple(order_by),
        )

    def at_clause_boundary(self) -> bool:
        return self.cur.kind == "EOF" or self.at_keyword(
            "FROM", "WHERE", "GROUP", "HAVING", "ORDER"
        ) or self.at_symbol(";")

    def parse_select_list(self) -> list:
        elements: list = []
        if self.at_clause_boundary():
            return elements
        while True:
            expression = None
            # a bare alias slot: "SELECT AS x"
            if not self.at_keyword("AS") and not self.at_symbol(","):
                expression = self.parse_expression()
            alias = None
            if self.accept_keyword("AS"):
                alias = self.expect_identifier("alias")
            elif self.cur.kind == "IDENT":
                alias = self.advance().text
            elements.append(SelectElement(expression, alias))
            if not self.accept_symbol(","):
                break
            if self.at_clause_boundary():
                elements.append(SelectElement(None, None))
                break
        return elements

    def expect_identifier(self, what: str) -> str:
        if self.cur.kind != "IDENT":
            raise self.error(f"expected {what}")
        return self.advance().text

    def parse_from_list(self) -> list:
        elements: list = []
        if self.at_clause_boundary():
            return elements
        elements.append(self.parse_from_element(None))
        while True:
            if self.accept_symbol(","):
                elements.append(self.parse_from_element(JoinType.CROSS))
                continue
            join_type = self.parse_join_type()
            if join_type is None:
                break
            element = self.parse_from_element(join_type)
            if join_type is not JoinType.CROSS and self.accept_keyword("ON"):
                condition = self.parse_expression()
                element = FromElement(element.table, element.alias, join_type, condition)
            elements.append(element)
        return elements

    def parse_join_type(self) -> Optional[JoinType]:
        if self.accept_keyword("JOIN"):
            return JoinType.INNER
        if self.at_keyword("INNER", "LEFT", "RIGHT", "FULL", "CROSS"):
            word = self.advance().text
            self.accept_keyword("OUTER")
            if not self.accept_keyword("JOIN"):
                raise self.error("expected JOIN")
            return {
                "INNER": JoinType.INNER,
                "LEFT": JoinType.LEFT_OUTER,
                "RIGHT": JoinType.RIGHT_OUTER,
                "FULL": JoinType.FULL_OUTER,
                "CROSS": JoinType.CROSS,
            }[word]
        return None

    def parse_from_element(self, join_type: Optional[JoinType]) -> FromElement:
        table = self.expect_identifier("table name")
        alias = None
        if self.accept_keyword("AS"):
            alias = self.expect_identifier("alias")
        elif self.cur.kind == "IDENT":
            alias = self.advance().text
        return FromElement(table, alias, join_type, None)

    def parse_expression_list(self) -> list:
        expressions = [self.parse_expression()]
        while self.accept_symbol(","):
            if self.at_clause_boundary():
                expressions.append(None)
                break
            expressions.append(self.parse_expression())
        return expressions

    def parse_order_by_list(self) -> list:
        elements = []
        while True:
            expression = self.parse_expression()
            direction = SortDirection.ASC
            if self.accept_keyword("DESC"):
                direction = SortDirection.DESC
            else:
                self.accept_keyword("ASC")
            elements.append(OrderByElement(expression, direction))
            if not self.accept_symbol(","):
                break
        return elements

    # expression precedence: OR < AND < NOT < comparisons < additive < multiplicative

    def parse_expression(self) -> Optional[Expression]:
        return self.parse_binary_level(0)

    _LEVELS = (
        {"OR": BinaryOp.OR},
        {"AND": BinaryOp.AND},
        None,  # NOT
        _COMPARISONS,
        _ADDITIVE,
        _MULTIPLICATIVE,
    )

    def parse_binary_level(self, level: int) -> Optional[Expression]:
        if level >= len(self._LEVELS):
            return self.parse_primary()
        ops = self._LEVELS[level]
        if ops is None:
            if self.accept_keyword("NOT"):
                return Not(self.parse_binary_level(level))
            return self.parse_binary_level(level + 1)
        keyword_level = level < 2
        left = self.parse_binary_level(level + 1)
        while True:
            if keyword_level:
                if not self.at_keyword(*ops):
                    return left
                op = ops[self.advance().text]
            else:
                if not (self.cur.kind == "SYMBOL" and self.cur.text in ops):
                    return left
                op = ops[self.advance().text]
            right = None
            if self.can_start_operand():
                right = self.parse_binary_level(level + 1)
            left = BinaryExpression(op, left, right)
            if right is None:
                return left

    def can_start_operand(self) -> bool:
        tok = self.cur
        if tok.kind in ("IDENT", "INT", "STRING", "HOLE"):
            return True
        if tok.kind == "SYMBOL" and tok.text in ("(", "*"):
            return True
        if tok.kind == "KEYWORD" and (tok.text == "NOT" or tok.text in _AGGREGATES):
            return True
        return False

    def parse_primary(self) -> Optional[Expression]:
        tok = self.cur
        if tok.kind == "HOLE":
            self.advance()
            return None
        if tok.kind == "INT":
            self.advance()
            return Constant(int(tok.text))
        if tok.kind == "STRING":
            self.advance()
            return Constant(tok.text)
        if self.accept_symbol("("):
            inner = self.parse_expression()
            self.expect_symbol(")")
            return inner
        if self.accept_symbol("*"):
            return Asterisk(None)
        if tok.kind == "KEYWORD" and tok.text in _AGGREGATES:
            kind = _AGGREGATES[self.advance().text]
            self.expect_symbol("(")
            is_distinct = self.accept_keyword("DISTINCT")
            inner = None
            if not self.at_symbol(")"):
                inner = self.parse_expression()
            self.expect_symbol(")")
            return AggregationFunction(kind, is_distinct, inner)
        if tok.kind == "IDENT":
            name = self.advance().text
            if self.accept_symbol("."):
                if self.accept_symbol("*"):
                    return Asterisk(name)
                column = self.expect_identifier("column name")
                return ColumnReference(name, column)
            return ColumnReference(None, name)
        raise self.error(f"expected expression, found {tok.text or 'end of input'!r}")


def parse_query(text: str) -> QueryAst:
    """Parse SQL text, tolerating holes; raises ParseError otherwise.

    The empty string parses to the empty query.
    """
    return _QueryParser(text).parse()


def parse_schema(text: str) -> Schema:
    """Parse the line-oriented schema format.

    One table per non-blank line: ``name(col1, col2, ...)``; a ``*`` prefix
    marks a primary-key column. Raises ParseError on malformed lines or
    duplicate table/column names.
    """
    tables = []
    seen_tables = set()
    offset = 0
    for raw_line in text.splitlines(keepends=True):
        line = raw_line.rstrip("\n").rstrip("\r")
        position = len(text[:offset].encode("utf-8"))
        offset += len(raw_line)
        stripped = line.strip()
        if not stripped or stripped.startswith("--"):
            continue
        if not stripped.endswith(")") or "(" not in stripped:
            raise ParseError(f"malformed schema line {stripped!r}", position)
        name, _, rest = stripped.partition("(")
        name = name.strip()
        if not name.isidentifier():
            raise ParseError(f"invalid table name {name!r}", position)
        if name in seen_tables:
            raise ParseError(f"duplicate table {name!r}", position)
        seen_tables.add(name)
        body = rest[:-1].strip()
        if not body:
            raise ParseError(f"table {name!r} has no columns", position)
        columns = []
        primary = []
        for part in body.split(","):
            col = part.strip()
            is_key = col.startswith("*")
            if is_key:
                col = col[1:].strip()
            if not col.isidentifier():
                raise ParseError(f"invalid column name {col!r} in table {name!r}", position)
            if col in columns:
                raise ParseError(f"duplicate column {col!r} in table {name!r}", position)
            columns.append(col)
            if is_key:
                primary.append(col)
        tables.append(Table(name, tuple(columns), tuple(primary) if primary else None))
    return Schema(tuple(tables))
