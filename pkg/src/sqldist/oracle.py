"""Reference uniform-cost search, used only to cross-check the lazy variant.

``ucs_explicit`` is the textbook algorithm over an explicit graph with
tentative-distance updates. ``ucs_implicit`` runs the same classic scheme
over the edit-defined implicit graph, generating all neighbors of a node
eagerly. Both deliberately share none of the production search's queue or
visited-map code. They are slow by design and not part of the CLI surface.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

from .ast_nodes import EMPTY_QUERY, QueryAst
from .edits import EditSet, default_edit_set
from .meta import build_meta_info
from .schema import Schema, check_executable, deduce_schema
from .search import (
    NonExecutableDestination,
    PathStep,
    SearchResult,
    SearchStatus,
)


@dataclass(frozen=True)
class ExplicitGraph:
    nodes: tuple
    edges: tuple  # (from, to, non-negative integer cost)

    def __post_init__(self) -> None:
        for a, b, cost in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ValueError("edge endpoint outside node set")
            if cost < 0:
                raise ValueError("edge costs must be non-negative")


def ucs_explicit(graph: ExplicitGraph, start, destination) -> Optional[tuple]:
    """(distance, node path) of a shortest path, or None when unreachable."""
    if start not in graph.nodes or destination not in graph.nodes:
        raise ValueError("start and destination must be graph nodes")
    outgoing: dict = {node: [] for node in graph.nodes}
    for a, b, cost in graph.edges:
        outgoing[a].append((b, cost))

    distance = {start: 0}
    prev: dict = {}
    unvisited = {start: 0}
    visited = set()
    order = {node: i for i, node in enumerate(graph.nodes)}

    while unvisited:
        node = min(unvisited, key=lambda n: (unvisited[n], order[n]))
        del unvisited[node]
        visited.add(node)
        if node == destination:
            path = [node]
            while node in prev:
                node = prev[node]
                path.append(node)
            path.reverse()
            return distance[destination], tuple(path)
        for neighbor, cost in outgoing[node]:
            if neighbor in visited:
                continue
            tentative = distance[node] + cost
            if neighbor not in unvisited:
                distance[neighbor] = tentative
                prev[neighbor] = node
                unvisited[neighbor] = tentative
            elif tentative < distance[neighbor]:
                distance[neighbor] = tentative
                prev[neighbor] = node
                unvisited[neighbor] = tentative
    return None


def ucs_implicit(
    destination: QueryAst,
    start: Optional[QueryAst] = None,
    schema: Optional[Schema] = None,
    edits: Optional[EditSet] = None,
    max_distance: Optional[int] = None,
    *,
    slack: int = 1,
) -> SearchResult:
    """Classic eager UCS over the edit graph; same result contract as search."""
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
    meta = build_meta_info(destination, schema, slack)

    counter = 0
    heap = [(0, 0, start)]
    tentative = {start: 0}
    prev: dict = {}
    via: dict = {}
    visited = set()
    expanded = 0

    while heap:
        dist, _, node = heapq.heappop(heap)
        if node in visited or dist > tentative[node]:
            continue
        if max_distance is not None and dist > max_distance:
            return SearchResult(
                SearchStatus.EXCEEDED_MAX_DISTANCE, None, (), len(visited), expanded, 0
            )
        visited.add(node)
        expanded += 1
        if node == destination:
            steps = []
            at = node
            while at in prev:
                edit = edits.get(via[at])
                steps.append(PathStep(prev[at], edit.name, edit.description, edit.cost, at))
                at = prev[at]
            steps.reverse()
            return SearchResult(
                SearchStatus.FOUND, dist, tuple(steps), len(visited), expanded, 0
            )
        for edit in edits:
            for neighbor in edit.perform(node, schema, meta):
                if neighbor in visited:
                    continue
                candidate = dist + edit.cost
                if candidate < tentative.get(neighbor, float("inf")):
                    tentative[neighbor] = candidate
                    prev[neighbor] = node
                    via[neighbor] = edit.name
                    counter += 1
                    heapq.heappush(heap, (candidate, counter, neighbor))

    return SearchResult(SearchStatus.EXHAUSTED, None, (), len(visited), expanded, 0)
