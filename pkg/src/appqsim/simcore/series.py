"""Measurement series: the interchange format between devices and scorers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


class SchemaError(ValueError):
    """A series or config file does not match its schema.

    ``code`` is a stable machine-readable identifier; ``details`` lists
    the individual problems found.
    """

    def __init__(self, code: str, details: list[str] | None = None) -> None:
        self.code = code
        self.details = list(details or [])
        super().__init__(f"{code}: {'; '.join(self.details)}" if self.details else code)


@dataclass(frozen=True)
class SeriesPoint:
    """One time point: either an integer step ``n`` or a real time ``t``."""

    mean: float
    stderr: float
    shots: int = 0
    n: int | None = None
    t: float | None = None

    @property
    def key(self) -> float:
        return float(self.n if self.n is not None else self.t)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.n is not None:
            out["n"] = self.n
        else:
            out["t"] = self.t
        out.update(mean=self.mean, stderr=self.stderr, shots=self.shots)
        return out


@dataclass
class MeasurementSeries:
    benchmark: str
    points: list[SeriesPoint]
    parameters: dict[str, Any] = field(default_factory=dict)
    exact: bool = False

    def __post_init__(self) -> None:
        problems = []
        keys = [p.key for p in self.points]
        if any(b <= a for a, b in zip(keys, keys[1:])):
            problems.append("indices must be strictly increasing")
        for p in self.points:
            if not math.isfinite(p.mean):
                problems.append(f"point {p.key}: mean not finite")
            if not (p.stderr >= 0 and math.isfinite(p.stderr)):
                problems.append(f"point {p.key}: stderr must be finite and nonnegative")
            if p.shots < 0:
                problems.append(f"point {p.key}: negative shot count")
        if problems:
            raise SchemaError("invalid_series", problems)

    @property
    def means(self) -> list[float]:
        return [p.mean for p in self.points]

    @property
    def stderrs(self) -> list[float]:
        return [p.stderr for p in self.points]

    @property
    def indices(self) -> list[int]:
        return [p.n for p in self.points]

    def to_json(self) -> dict[str, Any]:
        return {
            "benchmark": self.benchmark,
            "parameters": self.parameters,
            "exact": self.exact,
            "points": [p.to_json() for p in self.points],
        }

    @classmethod
    def from_json(cls, data: Any) -> "MeasurementSeries":
        problems: list[str] = []
        if not isinstance(data, dict):
            raise SchemaError("invalid_series", ["top level must be an object"])
        bench = data.get("benchmark")
        if not isinstance(bench, str):
            problems.append("missing string field 'benchmark'")
        exact = data.get("exact", False)
        if not isinstance(exact, bool):
            problems.append("'exact' must be a boolean")
            exact = False
        params = data.get("parameters", {})
        if not isinstance(params, dict):
            problems.append("'parameters' must be an object")
            params = {}
        raw = data.get("points")
        if not isinstance(raw, list):
            problems.append("missing list field 'points'")
            raw = []
        points = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict):
                problems.append(f"points[{i}] must be an object")
                continue
            has_n, has_t = "n" in item, "t" in item
            if has_n == has_t:
                problems.append(f"points[{i}] needs exactly one of 'n' or 't'")
                continue
            if has_n and (isinstance(item["n"], bool) or not isinstance(item["n"], int)):
                problems.append(f"points[{i}].n must be an integer")
                continue
            if has_t and not _is_number(item["t"]):
                problems.append(f"points[{i}].t must be a number")
                continue
            if not _is_number(item.get("mean")):
                problems.append(f"points[{i}].mean must be a number")
                continue
            if "stderr" not in item:
                if not exact:
                    problems.append(f"points[{i}].stderr missing (allowed only when \"exact\": true)")
                    continue
                stderr = 0.0
            elif not _is_number(item["stderr"]):
                problems.append(f"points[{i}].stderr must be a number")
                continue
            else:
                stderr = float(item["stderr"])
            shots = item.get("shots", 0)
            if isinstance(shots, bool) or not isinstance(shots, int):
                problems.append(f"points[{i}].shots must be an integer")
                continue
            points.append(
                SeriesPoint(
                    mean=float(item["mean"]),
                    stderr=stderr,
                    shots=shots,
                    n=item["n"] if has_n else None,
                    t=float(item["t"]) if has_t else None,
                )
            )
        if problems:
            raise SchemaError("invalid_series", problems)
        return cls(bench, points, params, exact)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
