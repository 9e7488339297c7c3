"""Route metrics and plan fitness.

Each constraint scores a plan as the reciprocal of a route total (leg
lengths, or obstacles crossed by legs). Two aggregations combine them:

* ``weighted_mean``: sum(f * coef) / sum(coef).
* ``legacy(w1, w2)``: 1 / (w1 / f_distance + w2 / f_obstacles). The
  default weights (8, 2) reproduce the published evaluation tables; the
  per-agent coefficients play no part in this mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .world import ConstraintSpec, Obstacle, Point, Stop, SystemState

DEFAULT_CAP = 1.0


class LegacyArity(ValueError):
    pass


@dataclass(frozen=True)
class AggregationMode:
    kind: str = "weighted_mean"  # or "legacy"
    w1: float = 8.0
    w2: float = 2.0

    def __post_init__(self) -> None:
        if self.kind not in ("weighted_mean", "legacy"):
            raise ValueError(f"unknown aggregation mode {self.kind!r}")
        if self.kind == "legacy" and not (self.w1 > 0 and self.w2 > 0):
            raise ValueError("legacy weights must be positive")

    @classmethod
    def legacy(cls, w1: float = 8.0, w2: float = 2.0) -> "AggregationMode":
        return cls("legacy", w1, w2)


WEIGHTED_MEAN = AggregationMode()


@dataclass(frozen=True)
class FitnessBreakdown:
    sums: tuple[float, ...]
    values: tuple[float, ...]
    kinds: tuple[str, ...]
    aggregate: float
    mode: str

    def sum_of(self, kind: str) -> float:
        return self.sums[self.kinds.index(kind)]

    def value_of(self, kind: str) -> float:
        return self.values[self.kinds.index(kind)]


def _rects(obstacles: Iterable[Obstacle]) -> np.ndarray:
    rows = [(o.min.x, o.min.y, o.max.x, o.max.y) for o in obstacles]
    return np.array(rows, dtype=np.float64).reshape(-1, 4)


def distance(a: Point, b: Point) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def count_obstacles(a: Point, b: Point, obstacles: Sequence[Obstacle]) -> int:
    """Number of rectangles touched by the closed segment ``ab``."""
    if not obstacles:
        return 0
    return int(kernels.count_segment_hits(a.x, a.y, b.x, b.y, _rects(obstacles)))


def stop_location(stop: Stop, world: SystemState) -> Point:
    req = world.requests[stop.request]
    if stop.kind == "pickup":
        return world.depots[req.depot].position
    return world.clients[req.client].position


def route_of_plan(genome: Sequence[Stop], start: Point, world: SystemState) -> list[Point]:
    return [start] + [stop_location(s, world) for s in genome]


def constraint_fitness(total: float, cap: float = DEFAULT_CAP) -> float:
    if total < 0:
        raise ValueError("route total cannot be negative")
    return 1.0 / total if total > 0 else cap


def aggregate(f_values: Sequence[tuple[float, float]], mode: AggregationMode = WEIGHTED_MEAN) -> float:
    """Combine ``(fitness, coefficient)`` pairs into the agent fitness."""
    if not f_values:
        raise ValueError("at least one constraint is required")
    if mode.kind == "legacy":
        if len(f_values) != 2:
            raise LegacyArity(f"legacy aggregation takes 2 constraints, got {len(f_values)}")
        (f1, _), (f2, _) = f_values
        return 1.0 / (mode.w1 / f1 + mode.w2 / f2)
    den = sum(c for _, c in f_values)
    # normalize weights first so a single constraint returns f exactly
    return sum(f * (c / den) for f, c in f_values)


def _check_legacy_order(constraints: Sequence[ConstraintSpec], mode: AggregationMode) -> None:
    if mode.kind != "legacy":
        return
    kinds = [c.kind for c in constraints]
    if len(kinds) != 2:
        raise LegacyArity(f"legacy aggregation takes 2 constraints, got {len(kinds)}")
    if kinds != ["distance", "obstacles"]:
        raise LegacyArity("legacy aggregation expects constraints ordered (distance, obstacles)")


@dataclass
class PlanEvaluator:
    """Scores genomes over a fixed stop set from a fixed route origin.

    Leg lengths and obstacle counts between every pair of relevant points
    are computed once; a genome then costs one pass of index lookups.
    """

    origin: Point
    locations: dict[Stop, Point]
    obstacles: Sequence[Obstacle]
    constraints: Sequence[ConstraintSpec]
    mode: AggregationMode = WEIGHTED_MEAN
    cap: float = DEFAULT_CAP
    _index: dict[Stop, int] = field(init=False, repr=False)
    _cache: dict[tuple, float] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.constraints:
            raise ValueError("at least one constraint is required")
        _check_legacy_order(self.constraints, self.mode)
        points = [(self.origin.x, self.origin.y)]
        slot: dict[tuple[float, float], int] = {}
        self._index = {}
        for stop in sorted(self.locations):
            p = self.locations[stop]
            key = (p.x, p.y)
            if key not in slot:
                slot[key] = len(points)
                points.append(key)
            self._index[stop] = slot[key]
        self._dist, self._hits = kernels.leg_matrices(
            np.array(points, dtype=np.float64), _rects(self.obstacles))
        self._coefs = np.array([c.coefficient for c in self.constraints], dtype=np.float64)
        self._kinds = tuple(c.kind for c in self.constraints)
        self._cache = {}

    @classmethod
    def for_world(cls, stops: Iterable[Stop], origin: Point, world: SystemState,
                  constraints: Sequence[ConstraintSpec], mode: AggregationMode = WEIGHTED_MEAN,
                  cap: float = DEFAULT_CAP) -> "PlanEvaluator":
        locs = {s: stop_location(s, world) for s in stops}
        return cls(origin, locs, list(world.obstacles), list(constraints), mode, cap)

    def _orders(self, genomes: Sequence[Sequence[Stop]]) -> np.ndarray:
        width = len(genomes[0]) if genomes else 0
        return np.array([[self._index[s] for s in g] for g in genomes],
                        dtype=np.int64).reshape(len(genomes), width)

    def _raw(self, dsum: float, hsum: float) -> tuple[float, ...]:
        return tuple(dsum if k == "distance" else hsum for k in self._kinds)

    def breakdown(self, genome: Sequence[Stop]) -> FitnessBreakdown:
        dsum, hsum = kernels.population_sums(self._dist, self._hits, self._orders([genome]), 0)
        sums = self._raw(float(dsum[0]), float(hsum[0]))
        values = tuple(constraint_fitness(s, self.cap) for s in sums)
        agg = aggregate(list(zip(values, self._coefs.tolist())), self.mode)
        return FitnessBreakdown(sums, values, self._kinds, agg, self.mode.kind)

    def __call__(self, genome: Sequence[Stop]) -> float:
        return self.fitness_many([genome])[0]

    def fitness_many(self, genomes: Sequence[Sequence[Stop]]) -> list[float]:
        """Aggregate fitness of each genome, in input order."""
        keys = [tuple(g) for g in genomes]
        todo = list(dict.fromkeys(k for k in keys if k not in self._cache))
        if todo:
            dsum, hsum = kernels.population_sums(self._dist, self._hits, self._orders(todo), 0)
            sums = np.stack([dsum if k == "distance" else hsum.astype(np.float64)
                             for k in self._kinds], axis=1)
            vals = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), self.cap)
            coefs = self._coefs.tolist()
            # scalar aggregate keeps results bit-identical to breakdown()
            for k, row in zip(todo, vals.tolist()):
                self._cache[k] = aggregate(list(zip(row, coefs)), self.mode)
        return [self._cache[k] for k in keys]
