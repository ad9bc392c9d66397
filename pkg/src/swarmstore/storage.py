"""Per-agent storage policies: risk-aware percolation and the two baselines.

An agent's potential expresses its suitability to hold data:
``1 / (alpha * hop_count + beta * risk)`` while memory is available and 0
once full. Infinite potential is the sink sentinel (the base station, or
any agent whose denominator vanishes). An agent is unfit to keep data
when the best neighbour beats its own potential by more than the
threshold factor; it then evicts its least-recently-used items, up to
the per-step bandwidth cap, to the fittest neighbour.

Three policies share these mechanics:

* ``RASS``     - full potential with the risk term; transfers follow the
                 potential gradient, which detours around risky regions.
* ``HOPCOUNT`` - risk weight forced to zero and transfers restricted to
                 neighbours strictly closer to the base station.
* ``STIGMERGY``- no potentials at all; every stored item is replicated to
                 the current agent neighbours by cyclic gossip under the
                 same bandwidth budget, which fully saturates all stores.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .network import DataTransfer, FitnessBeacon
from .routing import RoutingTable

__all__ = [
    "DatumStatus",
    "Datum",
    "LocalStore",
    "FitnessContext",
    "PolicyKind",
    "AgentState",
    "fitness",
    "is_unfit",
    "select_eviction",
    "choose_target",
    "policy_step",
    "apply_corruption",
]

MAX_DATUM_BYTES = 50


class DatumStatus(enum.Enum):
    STORED = "stored"
    DELIVERED = "delivered"
    CORRUPTED = "corrupted"
    DROPPED_FULL = "dropped_full"


class PolicyKind(enum.Enum):
    RASS = "rass"
    HOPCOUNT = "hopcount"
    STIGMERGY = "stigmergy"


@dataclass(eq=False)
class Datum:
    """One collected data item; identity is (creator, seq), unique per run."""

    creator: int
    seq: int
    created_step: int
    size_bytes: int = MAX_DATUM_BYTES
    hops_travelled: int = 0
    status: DatumStatus = DatumStatus.STORED
    route: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.size_bytes <= MAX_DATUM_BYTES:
            raise ConfigurationError(
                f"datum size must lie in (0, {MAX_DATUM_BYTES}], got {self.size_bytes}")

    @property
    def key(self) -> tuple:
        return (self.creator, self.seq)


class LocalStore:
    """Bounded, LRU-ordered datum container (least recently used first)."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigurationError(f"store capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.items: list[Datum] = []
        self._keys: set = set()

    def __len__(self):
        return len(self.items)

    @property
    def available(self) -> int:
        return self.capacity - len(self.items)

    def contains(self, key: tuple) -> bool:
        return key in self._keys

    def insert(self, datum: Datum) -> None:
        """Append at the most-recently-used end."""
        if self.available <= 0:
            raise ConfigurationError("insert into full store")
        if datum.key in self._keys:
            raise ConfigurationError(f"duplicate datum {datum.key} in store")
        self.items.append(datum)
        self._keys.add(datum.key)

    def insert_oldest(self, datum: Datum) -> None:
        """Reinsert at the least-recently-used end (bounced transfers)."""
        if self.available <= 0:
            raise ConfigurationError("insert into full store")
        if datum.key in self._keys:
            raise ConfigurationError(f"duplicate datum {datum.key} in store")
        self.items.insert(0, datum)
        self._keys.add(datum.key)

    def pop_oldest(self, k: int) -> list[Datum]:
        taken, self.items = self.items[:k], self.items[k:]
        for d in taken:
            self._keys.discard(d.key)
        return taken

    def remove_where(self, flags) -> list[Datum]:
        """Remove items whose positional flag is true, preserving order."""
        removed = [d for d, f in zip(self.items, flags) if f]
        self.items = [d for d, f in zip(self.items, flags) if not f]
        for d in removed:
            self._keys.discard(d.key)
        return removed


@dataclass
class FitnessContext:
    """Inputs to one agent's policy decision for the current step."""

    hop_count: int
    risk: float  # sensed level, already clamped to >= 0
    alpha: float
    beta: float
    threshold: float
    neighbour_potentials: dict  # id -> potential, from this step's beacons
    neighbour_ids: frozenset  # current comm-graph neighbours

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ConfigurationError("fitness weights must be >= 0")
        if self.threshold <= 0:
            raise ConfigurationError("unfitness threshold must be > 0")


@dataclass(eq=False)
class AgentState:
    """Mutable per-agent simulation state."""

    id: int
    store: LocalStore
    routing_table: RoutingTable = field(default_factory=RoutingTable)
    hop_count: int = 0
    potential: float = 0.0
    sensed_risk: float = 0.0
    risk_estimate: float = 0.0  # smoothed non-negative sensor reading
    gossip_cursor: int = 0


def fitness(available_memory: int, hop_count: int, risk: float,
            alpha: float, beta: float) -> float:
    """Storage potential; 0 when memory is exhausted, +inf at the sink."""
    if available_memory <= 0:
        return 0.0
    denom = alpha * hop_count + beta * max(0.0, risk)
    if denom <= 0:
        return math.inf
    return 1.0 / denom


def is_unfit(own: float, neighbour_potentials: dict, threshold: float) -> bool:
    """True iff some neighbour's potential strictly exceeds threshold * own."""
    if not neighbour_potentials:
        return False
    return threshold * own < max(neighbour_potentials.values())


def select_eviction(store: LocalStore, k: int) -> list[Datum]:
    """Remove and return the min(k, len) least-recently-used items, in LRU order."""
    if k < 0:
        raise ConfigurationError(f"eviction count must be >= 0, got {k}")
    return store.pop_oldest(k)


def choose_target(neighbour_potentials: dict) -> int:
    """Id of the fittest neighbour, ties broken towards the lowest id."""
    if not neighbour_potentials:
        raise ValueError("choose_target on empty neighbour map")
    return max(neighbour_potentials.items(), key=lambda kv: (kv[1], -kv[0]))[0]


def _percolation_step(agent: AgentState, ctx: FitnessContext, bandwidth_cap: int,
                      candidates: dict) -> list:
    outbox = [FitnessBeacon(sender=agent.id, potential=agent.potential)]
    if not is_unfit(agent.potential, candidates, ctx.threshold):
        return outbox
    target = choose_target(candidates)
    items = select_eviction(agent.store, bandwidth_cap)
    if items:
        outbox.append(DataTransfer(sender=agent.id, target=target, items=tuple(items)))
    return outbox


def _hopcount_candidates(agent: AgentState, ctx: FitnessContext, hop_sentinel: int) -> dict:
    """Neighbours with a live route strictly closer to the base station."""
    allowed = {}
    for nb, pot in ctx.neighbour_potentials.items():
        via = agent.routing_table.hops_via(nb)
        if via is None or via >= hop_sentinel:
            continue
        if via - 1 < agent.hop_count:
            allowed[nb] = pot
    return allowed


def _stigmergy_step(agent: AgentState, ctx: FitnessContext, bandwidth_cap: int) -> list:
    targets = sorted(nb for nb in ctx.neighbour_ids if nb != 0)
    items = agent.store.items
    if not targets or not items:
        return []
    budget = bandwidth_cap
    batches: dict[int, list] = {}
    visited = 0
    while budget > 0 and visited < len(items):
        datum = items[agent.gossip_cursor % len(items)]
        agent.gossip_cursor += 1
        visited += 1
        for nb in targets[:budget]:
            batches.setdefault(nb, []).append(datum)
        budget -= min(budget, len(targets))
    return [DataTransfer(sender=agent.id, target=nb, items=tuple(b))
            for nb, b in sorted(batches.items())]


def policy_step(agent: AgentState, policy: PolicyKind, ctx: FitnessContext,
                bandwidth_cap: int, hop_sentinel: int) -> list:
    """Run one policy decision for ``agent``; returns its outbox for this step.

    Mutates the agent's store (evictions), potential, and gossip cursor.
    Newly generated measurements are *not* handled here; the engine stores
    them after the exchange, so evictions act on the pre-generation store.
    """
    if policy is PolicyKind.STIGMERGY:
        return _stigmergy_step(agent, ctx, bandwidth_cap)

    if policy is PolicyKind.RASS:
        agent.potential = fitness(agent.store.available, ctx.hop_count,
                                  ctx.risk, ctx.alpha, ctx.beta)
        candidates = ctx.neighbour_potentials
    else:  # HOPCOUNT: no risk term, forward-only targets
        agent.potential = fitness(agent.store.available, ctx.hop_count,
                                  0.0, ctx.alpha, 0.0)
        candidates = _hopcount_candidates(agent, ctx, hop_sentinel)
    return _percolation_step(agent, ctx, bandwidth_cap, candidates)


def apply_corruption(store: LocalStore, p: float, rng: np.random.Generator):
    """Corrupt each stored item independently with probability ``p``.

    Returns ``(store, corrupted_items)``. Consumes no random state when
    ``p == 0`` or the store is empty.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"corruption probability must lie in [0, 1], got {p}")
    if p == 0.0 or not store.items:
        return store, []
    flags = rng.random(len(store.items)) < p
    corrupted = store.remove_where(flags)
    for d in corrupted:
        d.status = DatumStatus.CORRUPTED
    return store, corrupted
