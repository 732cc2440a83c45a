"""Corner charts of the compactified Schwinger space.

A flag S_0 = all edges >= S_1 > S_2 > ... > S_l > {} indexes a chart with
radial coordinates rho_1..rho_l, sphere coordinates xi_e for e in S_1 and
free times t_e for e outside S_1. An edge e at level k (e in S_k minus S_{k+1})
has t_e = rho_1 ... rho_k xi_e.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, Tuple

import numpy as np

try:
    from ..graphs.decorated_graph import SchwingerPoint
    from ..utils.errors import ChartError
except ImportError:
    from graphs.decorated_graph import SchwingerPoint
    from utils.errors import ChartError

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class Flag:
    edge_count: int
    levels: Tuple[FrozenSet[int], ...] = ()

    def __post_init__(self):
        levels = tuple(frozenset(s) for s in self.levels)
        object.__setattr__(self, "levels", levels)
        everything = frozenset(range(self.edge_count))
        previous = everything
        for k, subset in enumerate(levels, start=1):
            if not subset:
                raise ChartError(f"flag level {k} is empty")
            if not subset <= previous:
                raise ChartError(f"flag level {k} is not contained in level {k - 1}")
            if k > 1 and subset == previous:
                raise ChartError(f"flag levels {k - 1} and {k} coincide")
            previous = subset

    @classmethod
    def trivial(cls, edge_count: int) -> "Flag":
        return cls(edge_count, ())

    @classmethod
    def single(cls, edge_count: int, subset=None) -> "Flag":
        subset = range(edge_count) if subset is None else subset
        return cls(edge_count, (frozenset(subset),))

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level_set(self, k: int) -> FrozenSet[int]:
        if k == 0:
            return frozenset(range(self.edge_count))
        if k > self.depth:
            return frozenset()
        return self.levels[k - 1]

    def level_of(self, e: int) -> int:
        level = 0
        for k, subset in enumerate(self.levels, start=1):
            if e in subset:
                level = k
        return level

    def level_edges(self, k: int) -> Tuple[int, ...]:
        return tuple(sorted(self.level_set(k) - self.level_set(k + 1)))

    def free_edges(self) -> Tuple[int, ...]:
        return self.level_edges(0)


def flags_of(edge_count: int) -> Iterator[Flag]:
    """Every flag on edge_count edges, trivial flag first."""

    def chains(parent: FrozenSet[int], allow_equal: bool):
        yield ()
        for size in range(len(parent), 0, -1):
            for subset in combinations(sorted(parent), size):
                subset = frozenset(subset)
                if subset == parent and not allow_equal:
                    continue
                for rest in chains(subset, False):
                    yield (subset,) + rest

    for levels in chains(frozenset(range(edge_count)), True):
        yield Flag(edge_count, levels)


@dataclass(frozen=True)
class CornerChart:
    flag: Flag
    rho: Tuple[float, ...]
    xi: Dict[int, float] = field(default_factory=dict)
    t: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rho", tuple(float(r) for r in self.rho))
        object.__setattr__(self, "xi", {int(e): float(v) for e, v in self.xi.items()})
        object.__setattr__(self, "t", {int(e): float(v) for e, v in self.t.items()})
        if len(self.rho) != self.flag.depth:
            raise ChartError(f"chart needs {self.flag.depth} radii, got {len(self.rho)}")
        if any(r < 0 for r in self.rho):
            raise ChartError(f"radii must be non-negative, got {self.rho}")
        if set(self.xi) != set(self.flag.level_set(1)):
            raise ChartError("sphere coordinates must cover exactly the edges of S_1")
        if set(self.t) != set(self.flag.free_edges()):
            raise ChartError("free times must cover exactly the edges outside S_1")
        if any(v <= 0 for v in list(self.xi.values()) + list(self.t.values())):
            raise ChartError("sphere coordinates and free times must be positive")
        residuals = chart_normalization_residuals(self)
        if residuals.size and np.max(np.abs(residuals)) > NORMALIZATION_TOL:
            raise ChartError(f"chart violates its normalization equations: {residuals}")

    @property
    def is_interior(self) -> bool:
        return all(r > 0 for r in self.rho)


def _tau(chart: CornerChart, k: int) -> Dict[int, float]:
    """tau^k_e = rho_{k+1} ... rho_j xi_e for e at level j >= k."""
    tau = {}
    for e in chart.flag.level_set(k):
        level = chart.flag.level_of(e)
        tau[e] = float(np.prod(chart.rho[k:level])) * chart.xi[e]
    return tau


def chart_normalization_residuals(chart: CornerChart) -> np.ndarray:
    """sum_{S_k} (tau^k)^2 - 1 for k = 1..l."""
    return np.array([sum(v * v for v in _tau(chart, k).values()) - 1.0
                     for k in range(1, chart.flag.depth + 1)])


def chart_to_interior(chart: CornerChart) -> SchwingerPoint:
    if not chart.is_interior:
        raise ChartError("chart point lies on the boundary (some rho = 0)")
    t = np.zeros(chart.flag.edge_count)
    for e, value in chart.t.items():
        t[e] = value
    for e, value in chart.xi.items():
        t[e] = float(np.prod(chart.rho[:chart.flag.level_of(e)])) * value
    return SchwingerPoint(tuple(t))


def interior_to_chart(t, flag: Flag) -> CornerChart:
    values = t.as_array() if isinstance(t, SchwingerPoint) else np.asarray(SchwingerPoint(tuple(t)).as_array())
    if len(values) != flag.edge_count:
        raise ChartError(f"point has {len(values)} times, flag has {flag.edge_count} edges")
    norms = [float(np.linalg.norm([values[e] for e in sorted(flag.level_set(k))]))
             for k in range(1, flag.depth + 1)]
    rho = [norms[0]] + [norms[k] / norms[k - 1] for k in range(1, len(norms))] if norms else []
    xi = {e: values[e] / norms[flag.level_of(e) - 1] for e in flag.level_set(1)}
    free = {e: values[e] for e in flag.free_edges()}
    return CornerChart(flag, tuple(rho), xi, free)


def t_square(chart: CornerChart) -> CornerChart:
    """Image of the chart point under t_e -> t_e^2, defined up to the boundary."""
    flag = chart.flag
    n = [float(np.sqrt(sum(v ** 4 for v in _tau(chart, k).values())))
         for k in range(1, flag.depth + 1)]
    rho = []
    for k in range(flag.depth):
        previous = n[k - 1] if k else 1.0
        rho.append(chart.rho[k] ** 2 * n[k] / previous)
    xi = {e: v ** 2 / n[flag.level_of(e) - 1] for e, v in chart.xi.items()}
    free = {e: v ** 2 for e, v in chart.t.items()}
    return CornerChart(flag, tuple(rho), xi, free)


def scale_action(chart: CornerChart, factor: float) -> CornerChart:
    """R_+ action t -> factor * t: scales rho_1 and the free times."""
    if factor <= 0:
        raise ChartError(f"scale factor must be positive, got {factor}")
    rho = list(chart.rho)
    if rho:
        rho[0] *= factor
    return CornerChart(chart.flag, tuple(rho), dict(chart.xi),
                       {e: factor * v for e, v in chart.t.items()})


def edge_exponents(flag: Flag, edges) -> Tuple[np.ndarray, List[int]]:
    """Powers of rho_1..rho_l in prod_{e in edges} t_e, plus the edges at level 0."""
    powers = np.zeros(flag.depth, dtype=int)
    free = []
    for e in edges:
        level = flag.level_of(e)
        powers[:level] += 1
        if level == 0:
            free.append(e)
    return powers, free


def random_chart(flag: Flag, rng: np.random.Generator, zero_levels=()) -> CornerChart:
    """Random chart point; rho_{k+1} = 0 for every k in zero_levels (0-based level index).

    For k < l the level-k equation reads sum_{level k} xi^2 + rho_{k+1}^2 = 1,
    so each level is a random positive unit vector (xi..., rho_{k+1}).
    """
    rho = [0.0 if 0 in zero_levels else float(rng.uniform(0.2, 1.5))]
    xi: Dict[int, float] = {}
    for k in range(1, flag.depth + 1):
        edges = flag.level_edges(k)
        raw = [float(v) for v in rng.uniform(0.1, 1.0, size=len(edges))]
        if k < flag.depth:
            raw.append(0.0 if k in zero_levels else float(rng.uniform(0.1, 1.0)))
        vector = np.asarray(raw) / np.linalg.norm(raw)
        xi.update({e: float(v) for e, v in zip(edges, vector)})
        if k < flag.depth:
            rho.append(float(vector[-1]))
    free = {e: float(rng.uniform(0.1, 1.0)) for e in flag.free_edges()}
    return CornerChart(flag, tuple(rho[:flag.depth]), xi, free)
