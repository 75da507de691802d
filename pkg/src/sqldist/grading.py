"""Turn a search result into points and ordered natural-language feedback."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .ast_nodes import render
from .search import SearchResult, SearchStatus

Number = Union[int, float]


@dataclass(frozen=True)
class GradingConfig:
    max_points: Number = 10
    scale: Number = 1

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.max_points < 0:
            raise ValueError("max_points must be non-negative")


@dataclass(frozen=True)
class ReportStep:
    index: int
    edit_name: str
    cost: int
    description: str
    result_sql: str


@dataclass(frozen=True)
class FeedbackReport:
    total_distance: int
    points: Number
    steps: tuple


class PathNotFound(Exception):
    """The search did not produce a path to report on."""


def grade(distance: int, config: GradingConfig) -> Number:
    """points = max(maxPoints - distance * scale, 0)"""
    if distance < 0:
        raise ValueError("distance must be non-negative")
    return max(config.max_points - distance * config.scale, 0)


def build_report(result: SearchResult, config: GradingConfig) -> FeedbackReport:
    """One step per path edge, ordered from start to destination.

    Only defined for successful searches; how to grade an aborted search is
    the caller's decision.
    """
    if result.status is not SearchStatus.FOUND:
        raise PathNotFound(f"cannot report on a search with status {result.status.value}")
    steps = tuple(
        ReportStep(
            index=i,
            edit_name=step.edit_name,
            cost=step.cost,
            description=step.edit_description,
            result_sql=render(step.to_ast, separator=" "),
        )
        for i, step in enumerate(result.path, start=1)
    )
    return FeedbackReport(
        total_distance=result.distance,
        points=grade(result.distance, config),
        steps=steps,
    )


def format_number(value: Number) -> str:
    if isinstance(value, float) and value == int(value):
        return str(int(value))
    return str(value)


def format_report(report: FeedbackReport) -> str:
    """The text report: total distance first, then points, then the steps."""
    lines = [f"distance: {report.total_distance}", f"points: {format_number(report.points)}"]
    for step in report.steps:
        lines.append(
            f"{step.index}. {step.edit_name} (cost {step.cost}): {step.description}"
        )
        lines.append(f"   {step.result_sql}")
    return "\n".join(lines)


def report_to_dict(report: FeedbackReport) -> dict:
    return {
        "distance": report.total_distance,
        "points": report.points,
        "steps": [
            {
                "index": step.index,
                "edit": step.edit_name,
                "cost": step.cost,
                "description": step.description,
                "result": step.result_sql,
            }
            for step in report.steps
        ],
    }
