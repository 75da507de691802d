"""Lazy uniform-cost search over the implicit query graph.

Instead of queueing neighbors, the queue holds (node, next edit) pairs at
priority ``dist[node] + cost(next edit)``. Extracting the minimum applies
exactly that one edit; every freshly generated neighbor immediately becomes
visited at the extraction priority, which is already its final distance, and
the node goes back into the queue with its next-more-expensive edit. Costs
are non-negative integers, so a bucket-per-priority queue with a monotone
cursor replaces a heap.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .ast_nodes import EMPTY_QUERY, QueryAst
from .edits import EditSet, default_edit_set
from .meta import MetaInfo, build_meta_info
from .schema import (
    ExecutabilityError,
    Schema,
    check_executable,
    deduce_schema,
)


class NonExecutableDestination(Exception):
    def __init__(self, error: ExecutabilityError):
        super().__init__(f"destination is not executable: {error}")
        self.error = error


class SearchStatus(Enum):
    FOUND = "found"
    EXCEEDED_MAX_DISTANCE = "exceededMaxDistance"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class PathStep:
    from_ast: QueryAst
    edit_name: str
    edit_description: str
    cost: int
    to_ast: QueryAst


@dataclass(frozen=True)
class SearchResult:
    status: SearchStatus
    distance: Optional[int]
    path: tuple
    visited_count: int
    expanded_count: int
    max_node_dequeues: int = 0


#: called with (current distance, progress fraction, visited count) whenever
#: the extraction priority increases
ProgressCallback = Callable[[int, float, int], None]


def progress(current_distance: int, max_distance: Optional[int] = None) -> float:
    """Search progress estimate in [0, 1].

    Linear against a known maximum distance, asymptotic 1 - exp(-d) without.
    """
    if current_distance < 0:
        raise ValueError("distance must be non-negative")
    if max_distance is not None:
        if max_distance <= 0:
            return 1.0
        return min(1.0, current_distance / max_distance)
    return 1.0 - math.exp(-current_distance)


class _BucketQueue:
    """FIFO buckets indexed by integer priority with a monotone cursor."""

    def __init__(self) -> None:
        self._buckets: list = []
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def push(self, priority: int, item) -> None:
        if priority < self._cursor:
            raise AssertionError("priority below extraction cursor")
        while len(self._buckets) <= priority:
            self._buckets.append(deque())
        self._buckets[priority].append(item)
        self._size += 1

    def pop(self) -> tuple:
        while self._cursor < len(self._buckets) and not self._buckets[self._cursor]:
            self._cursor += 1
        if self._cursor >= len(self._buckets):
            raise IndexError("pop from empty queue")
        self._size -= 1
        return self._cursor, self._buckets[self._cursor].popleft()


class _Visited:
    __slots__ = ("dist", "prev", "via_edit", "dequeues")

    def __init__(self, dist: int, prev: Optional[QueryAst], via_edit: Optional[str]):
        self.dist = dist
        self.prev = prev
        self.via_edit = via_edit
        self.dequeues = 0


def _reconstruct(
    visited: dict, destination: QueryAst, edit_set: EditSet
) -> tuple:
    steps = []
    node = destination
    while True:
        entry = visited[node]
        if entry.prev is None:
            break
        edit = edit_set.get(entry.via_edit)
        steps.append(PathStep(entry.prev, edit.name, edit.description, edit.cost, node))
        node = entry.prev
    steps.reverse()
    return tuple(steps)


def shortest_distance(
    destination: QueryAst,
    start: Optional[QueryAst] = None,
    schema: Optional[Schema] = None,
    edits: Optional[EditSet] = None,
    max_distance: Optional[int] = None,
    *,
    slack: int = 1,
    meta: Optional[MetaInfo] = None,
    on_progress: Optional[ProgressCallback] = None,
    expansion_limit: Optional[int] = None,
) -> SearchResult:
    """Minimum total edit cost from ``start`` to ``destination``.

    ``start`` defaults to the empty query, ``edits`` to the default catalog,
    ``max_distance`` to unbounded. Without a schema one is deduced from the
    destination, which must be executable either way. Raises
    NonExecutableDestination or SchemaDeductionError accordingly.
    """
    if start is None:
        start = EMPTY_QUERY
    if edits is None:
        edits = default_edit_set()

    if start == destination:
        return SearchResult(SearchStatus.FOUND, 0, (), 1, 0, 0)

    if schema is None:
        schema = deduce_schema(destination)
    error = check_executable(destination, schema)
    if error is not None:
        raise NonExecutableDestination(error)
    if meta is None:
        meta = build_meta_info(destination, schema, slack)

    edit_list = edits.edits
    if not edit_list:
        return SearchResult(SearchStatus.EXHAUSTED, None, (), 1, 0, 0)

    visited: dict = {start: _Visited(0, None, None)}
    queue = _BucketQueue()
    queue.push(edit_list[0].cost, (start, 0))

    expanded = 0
    max_dequeues = 0
    last_priority = -1

    while queue:
        priority, (node, edit_index) = queue.pop()
        if priority > last_priority:
            if on_progress is not None:
                on_progress(priority, progress(priority, max_distance), len(visited))
            last_priority = priority
        if max_distance is not None and priority > max_distance:
            return SearchResult(
                SearchStatus.EXCEEDED_MAX_DISTANCE,
                None,
                (),
                len(visited),
                expanded,
                max_dequeues,
            )
        expanded += 1
        if expansion_limit is not None and expanded > expansion_limit:
            raise RuntimeError(f"search exceeded the expansion ceiling of {expansion_limit}")
        entry = visited[node]
        entry.dequeues += 1
        if entry.dequeues > max_dequeues:
            max_dequeues = entry.dequeues

        edit = edit_list[edit_index]
        current_distance = entry.dist + edit.cost
        assert current_distance == priority

        for neighbor in edit.perform(node, schema, meta):
            if neighbor in visited:
                continue
            visited[neighbor] = _Visited(current_distance, node, edit.name)
            if neighbor == destination:
                path = _reconstruct(visited, neighbor, edits)
                return SearchResult(
                    SearchStatus.FOUND,
                    current_distance,
                    path,
                    len(visited),
                    expanded,
                    max_dequeues,
                )
            queue.push(current_distance + edit_list[0].cost, (neighbor, 0))

        if edit_index + 1 < len(edit_list):
            queue.push(entry.dist + edit_list[edit_index + 1].cost, (node, edit_index + 1))

    return SearchResult(
        SearchStatus.EXHAUSTED, None, (), len(visited), expanded, max_dequeues
    )


def difficulty(
    destination: QueryAst,
    schema: Optional[Schema] = None,
    edits: Optional[EditSet] = None,
    *,
    slack: int = 1,
) -> Optional[int]:
    """Cost of building the destination from scratch (the empty query).

    A reasonable measure of how much work the query takes, usable to pick a
    maximum score for an assignment.
    """
    result = shortest_distance(destination, EMPTY_QUERY, schema, edits, slack=slack)
    return result.distance
