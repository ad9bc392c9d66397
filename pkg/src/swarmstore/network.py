"""Per-step communication graph and bandwidth-limited message rounds.

The graph is either derived from positions and a communication radius
(distance equal to the radius counts as connected) or supplied as an
explicit edge set, which lets generated graph topologies override radius
connectivity. A message round delivers beacons to every current
neighbour of the sender and data transfers along current edges only;
each sender may move at most ``bandwidth_cap`` data items per round,
and anything undeliverable is handed back instead of being dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "CommGraph",
    "HopBeacon",
    "FitnessBeacon",
    "DataTransfer",
    "build_comm_graph",
    "graph_from_edges",
    "neighbours",
    "exchange_round",
]


@dataclass(frozen=True)
class CommGraph:
    node_count: int
    edges: frozenset  # frozenset of frozenset({i, j}) pairs
    mode: str  # "radius" or "explicit"
    adjacency: dict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        adj = {i: set() for i in range(self.node_count)}
        for edge in self.edges:
            if len(edge) != 2:
                raise ConfigurationError(f"self-edge on node {set(edge)}")
            i, j = tuple(edge)
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ConfigurationError(f"edge ({i},{j}) references unknown node")
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "adjacency", adj)


@dataclass(frozen=True)
class HopBeacon:
    """Local broadcast carrying the sender's routing advertisement."""
    sender: int
    hops: int


@dataclass(frozen=True)
class FitnessBeacon:
    """Local broadcast carrying the sender's current storage potential."""
    sender: int
    potential: float


@dataclass(frozen=True)
class DataTransfer:
    """Unicast batch of data items from ``sender`` to ``target``."""
    sender: int
    target: int
    items: tuple


def build_comm_graph(positions: np.ndarray, radius: float) -> CommGraph:
    """Radius graph over positions; edge (i, j) iff distance <= radius."""
    if radius <= 0:
        raise ConfigurationError(f"communication radius must be > 0, got {radius}")
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = (diff ** 2).sum(axis=2)
    within = d2 <= radius * radius
    edges = frozenset(
        frozenset((int(i), int(j)))
        for i, j in zip(*np.nonzero(np.triu(within, k=1)))
    )
    return CommGraph(node_count=n, edges=edges, mode="radius")


def graph_from_edges(node_count: int, edge_list) -> CommGraph:
    """Explicit-edge graph, used when a generator dictates connectivity."""
    edges = frozenset(frozenset((int(i), int(j))) for i, j in edge_list)
    return CommGraph(node_count=node_count, edges=edges, mode="explicit")


def neighbours(graph: CommGraph, node_id: int) -> set:
    """Neighbour id set of ``node_id``; unknown ids are a configuration bug."""
    if node_id not in graph.adjacency:
        raise ConfigurationError(f"node id {node_id} not in graph of {graph.node_count}")
    return set(graph.adjacency[node_id])


def exchange_round(outboxes: dict, graph: CommGraph, bandwidth_cap: int):
    """Deliver one synchronous message round.

    Returns ``(inboxes, undeliverable)`` where ``inboxes`` maps agent id to
    the messages it receives and ``undeliverable`` maps sender id to data
    items that either exceeded the bandwidth cap or were addressed to a
    node that is no longer a neighbour. All deliveries reflect pre-round
    state; the caller reinserts undeliverable items into sender stores.
    """
    if bandwidth_cap < 1:
        raise ConfigurationError(f"bandwidth_cap must be >= 1, got {bandwidth_cap}")
    inboxes = {i: [] for i in graph.adjacency}
    undeliverable = {}

    for sender in sorted(outboxes):
        budget = bandwidth_cap
        returned = []
        for msg in outboxes[sender]:
            if isinstance(msg, (HopBeacon, FitnessBeacon)):
                for nb in sorted(graph.adjacency.get(sender, ())):
                    inboxes[nb].append(msg)
                continue
            if not isinstance(msg, DataTransfer):
                raise ConfigurationError(f"unknown message type {type(msg)!r}")
            if len(msg.items) > bandwidth_cap:
                raise ConfigurationError(
                    f"transfer of {len(msg.items)} items exceeds cap {bandwidth_cap}")
            send, excess = msg.items[:budget], msg.items[budget:]
            budget -= len(send)
            returned.extend(excess)
            if not send:
                continue
            if msg.target in graph.adjacency.get(sender, ()):
                inboxes[msg.target].append(
                    DataTransfer(sender=sender, target=msg.target, items=tuple(send)))
            else:
                # topology changed under the sender: bounce the whole batch
                returned.extend(send)
        if returned:
            undeliverable[sender] = returned
    return inboxes, undeliverable
