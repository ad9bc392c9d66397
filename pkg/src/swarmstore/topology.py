"""Experiment topologies: static grid, preferential-attachment graph,
Lennard-Jones flocking, random-walk mobility, and fixed hand-laid layouts.

Static generators are deterministic given their random stream. All
mobility steps keep every position inside the arena (reflection at
walls) and never move node 0, which is the base station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .risk import reflect_into

__all__ = [
    "Arena",
    "GridTopology",
    "ScaleFreeTopology",
    "LennardJonesMobility",
    "RandomWalkMobility",
    "FixedTopology",
    "gen_grid",
    "gen_scale_free",
    "step_lennard_jones",
    "step_random_walk",
]


@dataclass(frozen=True)
class Arena:
    """Bounded rectangular environment, coordinates in [0, width] x [0, height]."""

    width: float
    height: float
    base_position: tuple[float, float] | None = None

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ConfigurationError("arena dimensions must be positive")
        if self.base_position is not None:
            x, y = self.base_position
            if not (0 <= x <= self.width and 0 <= y <= self.height):
                raise ConfigurationError("base position outside arena")

    def contains(self, positions: np.ndarray) -> bool:
        return bool(
            (positions[:, 0] >= 0).all() and (positions[:, 0] <= self.width).all()
            and (positions[:, 1] >= 0).all() and (positions[:, 1] <= self.height).all())


@dataclass(frozen=True)
class GridTopology:
    spacing: float = 2.0

    def __post_init__(self):
        if self.spacing <= 0:
            raise ConfigurationError("grid spacing must be > 0")


@dataclass(frozen=True)
class ScaleFreeTopology:
    attach_count: int = 2

    def __post_init__(self):
        if self.attach_count < 1:
            raise ConfigurationError("attach_count must be >= 1")


@dataclass(frozen=True)
class LennardJonesMobility:
    target_distance: float = 2.0
    well_depth: float = 0.05
    max_speed: float = 0.2

    def __post_init__(self):
        if min(self.target_distance, self.well_depth, self.max_speed) <= 0:
            raise ConfigurationError("Lennard-Jones parameters must be positive")


@dataclass(frozen=True)
class RandomWalkMobility:
    step_length: float = 0.2
    turn_std: float = 0.5

    def __post_init__(self):
        if self.step_length < 0 or self.turn_std < 0:
            raise ConfigurationError("random-walk parameters must be >= 0")


@dataclass(frozen=True)
class FixedTopology:
    """Hand-laid positions, e.g. the five-node indoor layout."""

    positions: tuple

    def __post_init__(self):
        if len(self.positions) < 1:
            raise ConfigurationError("fixed topology needs at least one position")


def gen_grid(n: int, arena: Arena, spacing: float = 2.0) -> np.ndarray:
    """Row-major square-ish lattice centred in the arena; node 0 at its corner."""
    if n < 1:
        raise ConfigurationError("need at least one node")
    side = math.ceil(math.sqrt(n))
    rows = math.ceil(n / side)
    span_x = (side - 1) * spacing
    span_y = (rows - 1) * spacing
    if span_x > arena.width or span_y > arena.height:
        raise ConfigurationError(
            f"{side}x{rows} grid at spacing {spacing} does not fit "
            f"{arena.width}x{arena.height} arena")
    x0 = (arena.width - span_x) / 2.0
    y0 = (arena.height - span_y) / 2.0
    pos = np.empty((n, 2))
    for i in range(n):
        r, c = divmod(i, side)
        pos[i] = (x0 + c * spacing, y0 + r * spacing)
    return pos


def gen_scale_free(n: int, attach_count: int, arena: Arena,
                   rng: np.random.Generator):
    """Preferential-attachment graph plus uniform positions.

    Growth starts from a clique of ``attach_count`` nodes containing the
    base station; every later node attaches to ``attach_count`` distinct
    existing nodes with probability proportional to degree. The returned
    edge list drives connectivity; positions only feed the risk field.
    """
    m = attach_count
    if m < 1:
        raise ConfigurationError("attach_count must be >= 1")
    if n <= m:
        raise ConfigurationError(f"need more than {m} nodes for attach_count {m}")
    edges = []
    repeated = []  # node ids, one entry per incident edge end
    for i in range(m):
        for j in range(i + 1, m):
            edges.append((i, j))
            repeated += [i, j]
    for new in range(m, n):
        if repeated:
            targets = set()
            while len(targets) < m:
                targets.add(repeated[rng.integers(len(repeated))])
        else:
            targets = {0}  # degenerate single-node seed
        for t in sorted(targets):
            edges.append((t, new))
            repeated += [t, new]
    positions = np.column_stack([
        rng.uniform(0.0, arena.width, n),
        rng.uniform(0.0, arena.height, n),
    ])
    return positions, edges


def step_lennard_jones(positions: np.ndarray, params: LennardJonesMobility,
                       graph, arena: Arena) -> np.ndarray:
    """One flocking step: 12-6 pairwise forces from current neighbours.

    The potential minimum sits at ``target_distance``; displacement is
    clamped to ``max_speed`` per step and the base station never moves.
    """
    sigma = params.target_distance / 2 ** (1 / 6)
    eps = params.well_depth
    disp = np.zeros_like(positions)
    min_d = 0.05 * params.target_distance
    for i, nbrs in graph.adjacency.items():
        if i == 0:
            continue
        for j in nbrs:
            delta = positions[i] - positions[j]
            d = float(np.hypot(*delta))
            d = max(d, min_d)
            s6 = (sigma / d) ** 6
            f = 24.0 * eps * (2.0 * s6 * s6 - s6) / d
            disp[i] += f * delta / d
    norms = np.hypot(disp[:, 0], disp[:, 1])
    too_fast = norms > params.max_speed
    disp[too_fast] *= (params.max_speed / norms[too_fast])[:, None]
    out = positions + disp
    out[0] = positions[0]
    for i in range(1, len(out)):
        out[i, 0], _ = reflect_into(out[i, 0], 0.0, arena.width)
        out[i, 1], _ = reflect_into(out[i, 1], 0.0, arena.height)
    return out


def step_random_walk(positions: np.ndarray, headings: np.ndarray,
                     params: RandomWalkMobility, arena: Arena,
                     rng: np.random.Generator):
    """One correlated-random-walk step; returns (positions, headings)."""
    n = len(positions)
    turns = rng.normal(0.0, params.turn_std, n) if params.turn_std > 0 else np.zeros(n)
    new_h = headings + turns
    out = positions.copy()
    for i in range(1, n):
        x = positions[i, 0] + params.step_length * math.cos(new_h[i])
        y = positions[i, 1] + params.step_length * math.sin(new_h[i])
        x, fx = reflect_into(x, 0.0, arena.width)
        y, fy = reflect_into(y, 0.0, arena.height)
        if fx:
            new_h[i] = math.pi - new_h[i]
        if fy:
            new_h[i] = -new_h[i]
        out[i] = (x, y)
    new_h[0] = headings[0]
    return out, new_h
