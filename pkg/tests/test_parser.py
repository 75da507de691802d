import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import q, random_destination, sch
from sqldist import (
    AggregateKind,
    AggregationFunction,
    Asterisk,
    BinaryExpression,
    BinaryOp,
    ColumnReference,
    Constant,
    EMPTY_QUERY,
    JoinType,
    Not,
    ParseError,
    QueryAst,
    SortDirection,
    canonical_equal,
    parse_query,
    parse_schema,
    render,
)

STUDENTS = sch("students(id, name, age)")


class TestParseQuery:
    def test_paper_query(self):
        query = q("SELECT s.id AS ID FROM students AS s WHERE s.age > 21")
        (element,) = query.select_elements
        assert element.expression == ColumnReference("s", "id")
        assert element.alias == "ID"
        (table,) = query.from_elements
        assert table.table == "students" and table.alias == "s"
        assert query.where == BinaryExpression(
            BinaryOp.GT, ColumnReference("s", "age"), Constant(21)
        )

    def test_incomplete_aggregation(self):
        query = q("SELECT AVG( ) FROM students")
        (element,) = query.select_elements
        assert element.expression == AggregationFunction(AggregateKind.AVG, False, None)

    def test_empty_input(self):
        assert q("") == EMPTY_QUERY
        assert q("   \n  ") == EMPTY_QUERY

    def test_case_insensitive_keywords(self):
        assert canonical_equal(
            q("select distinct name from students order by name desc"),
            q("SELECT DISTINCT name FROM students ORDER BY name DESC"),
        )

    def test_identifier_case_preserved(self):
        query = q("SELECT Name FROM Students")
        assert query.select_elements[0].expression == ColumnReference(None, "Name")
        assert query.from_elements[0].table == "Students"

    def test_hole_token(self):
        query = q("SELECT _ FROM students")
        assert query.select_elements[0].expression is None

    def test_trailing_operator(self):
        query = q("SELECT name FROM students WHERE age >")
        assert query.where == BinaryExpression(
            BinaryOp.GT, ColumnReference(None, "age"), None
        )

    def test_bare_alias_slot(self):
        query = q("SELECT AS total FROM students")
        (element,) = query.select_elements
        assert element.expression is None
        assert element.alias == "total"

    def test_trailing_comma_makes_hole_element(self):
        query = q("SELECT id, FROM students")
        assert len(query.select_elements) == 2
        assert query.select_elements[1].expression is None

    def test_join_forms(self):
        query = q(
            "SELECT * FROM a JOIN b ON x = y LEFT OUTER JOIN c ON x = z, d"
        )
        kinds = [fe.join_type for fe in query.from_elements]
        assert kinds == [None, JoinType.INNER, JoinType.LEFT_OUTER, JoinType.CROSS]

    def test_join_without_on_is_hole(self):
        query = q("SELECT * FROM a JOIN b")
        assert query.from_elements[1].join_type is JoinType.INNER
        assert query.from_elements[1].join_condition is None
        assert "ON _" in render(query)

    def test_count_star_and_distinct(self):
        query = q("SELECT COUNT(DISTINCT name), COUNT(*) FROM students")
        first, second = (el.expression for el in query.select_elements)
        assert first == AggregationFunction(
            AggregateKind.COUNT, True, ColumnReference(None, "name")
        )
        assert second == AggregationFunction(AggregateKind.COUNT, False, Asterisk(None))

    def test_precedence(self):
        query = q("SELECT * FROM t WHERE a = 1 OR b = 2 AND NOT c = 3")
        where = query.where
        assert where.operator is BinaryOp.OR
        right = where.right
        assert right.operator is BinaryOp.AND
        assert isinstance(right.right, Not)
        assert right.right.inner.operator is BinaryOp.EQ

    def test_arithmetic_precedence(self):
        query = q("SELECT a + b * 2 FROM t")
        expr = query.select_elements[0].expression
        assert expr.operator is BinaryOp.ADD
        assert expr.right.operator is BinaryOp.MUL

    def test_parentheses_group(self):
        query = q("SELECT (a + b) * 2 FROM t")
        expr = query.select_elements[0].expression
        assert expr.operator is BinaryOp.MUL
        assert expr.left.operator is BinaryOp.ADD

    def test_string_literal(self):
        query = q("SELECT * FROM t WHERE name = 'O''Brien'")
        assert query.where.right == Constant("O'Brien")

    def test_comments_skipped(self):
        query = q("SELECT id -- the key\nFROM students")
        assert len(query.select_elements) == 1
        assert len(query.from_elements) == 1

    def test_qualified_asterisk(self):
        query = q("SELECT s.* FROM students s")
        assert query.select_elements[0].expression == Asterisk("s")

    def test_order_directions(self):
        query = q("SELECT id FROM t ORDER BY id, name DESC, age ASC")
        directions = [el.direction for el in query.order_by]
        assert directions == [SortDirection.ASC, SortDirection.DESC, SortDirection.ASC]

    @pytest.mark.parametrize(
        "text",
        [
            "SELECT (id FROM students",
            "SELECT id FROM students )",
            "SELECT id FROM students WHERE 'unterminated",
            "SELECT id %% FROM students",
            "SELECT id FROM students extra junk (",
        ],
    )
    def test_parse_errors(self, text):
        with pytest.raises(ParseError) as info:
            parse_query(text)
        assert 0 <= info.value.position <= len(text.encode("utf-8"))

    def test_error_position_points_at_offender(self):
        with pytest.raises(ParseError) as info:
            parse_query("SELECT id FROM students WHERE ^")
        assert info.value.position == len("SELECT id FROM students WHERE ")

    @given(st.text(max_size=40))
    @settings(max_examples=300, deadline=None)
    def test_total_over_fuzz(self, text):
        try:
            result = parse_query(text)
        except ParseError:
            return
        assert isinstance(result, QueryAst)

    @given(st.integers(0, 10**9))
    @settings(max_examples=80, deadline=None)
    def test_round_trip(self, seed):
        rng = random.Random(seed)
        query = random_destination(rng, STUDENTS)
        assert canonical_equal(parse_query(render(query)), query)


class TestParseSchema:
    def test_single_table(self):
        schema = parse_schema("students(id, name, age)")
        (table,) = schema.tables
        assert table.name == "students"
        assert table.columns == ("id", "name", "age")
        assert table.primary_key is None

    def test_primary_keys(self):
        schema = parse_schema("students(*id, name, age)\nteachers(*id)")
        assert schema.table("students").primary_key == ("id",)
        assert schema.table("teachers").primary_key == ("id",)
        assert schema.table("teachers").columns == ("id",)

    def test_composite_key(self):
        schema = parse_schema("enrollment(*student, *course, grade)")
        assert schema.table("enrollment").primary_key == ("student", "course")

    def test_empty_text(self):
        assert parse_schema("").tables == ()
        assert parse_schema("\n\n").tables == ()

    def test_round_trip_format(self):
        text = "students(*id, name)\nteachers(*id)"
        schema = parse_schema(text)
        rebuilt = "\n".join(
            f"{t.name}("
            + ", ".join(
                ("*" if t.primary_key and c in t.primary_key else "") + c
                for c in t.columns
            )
            + ")"
            for t in schema.tables
        )
        assert rebuilt == text
        assert parse_schema(rebuilt) == schema

    @pytest.mark.parametrize(
        "text",
        [
            "students id, name",
            "students(id",
            "students()",
            "(id, name)",
            "students(id, id)",
            "students(id)\nstudents(name)",
            "students(id, 5bad)",
        ],
    )
    def test_schema_errors(self, text):
        with pytest.raises(ParseError):
            parse_schema(text)

    def test_error_position_is_line_start(self):
        with pytest.raises(ParseError) as info:
            parse_schema("students(id)\nbroken line")
        assert info.value.position == len("students(id)\n")
