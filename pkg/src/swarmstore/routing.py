"""Hop-count routing tables maintained by one gossip round per step.

Every agent stores, per neighbour, the hop count to the base station
advertised by that neighbour (i.e. the length of a route via it) along
with the step it was last heard. The agent's own hop count is the
minimum over live entries; the base station (id 0) is always at 0 and
advertises 1. Agents with no route use a finite sentinel equal to the
swarm size so downstream fitness arithmetic stays well defined, and
they advertise that sentinel capped, which propagates "no route" without
inflating it. Entries not refreshed within ``ttl`` steps are pruned so
mobility cannot leave dead neighbours poisoning the minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["RoutingTable", "routing_round", "prune_stale"]


@dataclass
class RoutingTable:
    # neighbour id -> (hops to base via that neighbour, step last heard)
    entries: dict = field(default_factory=dict)

    def absorb(self, sender: int, hops: int, now: int) -> None:
        self.entries[sender] = (hops, now)

    def min_hops(self) -> int | None:
        if not self.entries:
            return None
        return min(hops for hops, _ in self.entries.values())

    def hops_via(self, neighbour: int) -> int | None:
        entry = self.entries.get(neighbour)
        return entry[0] if entry else None


def prune_stale(table: RoutingTable, now: int, ttl: int) -> RoutingTable:
    """Drop entries last heard before ``now - ttl``. Mutates and returns the table."""
    if ttl < 1:
        raise ValueError(f"ttl must be >= 1, got {ttl}")
    stale = [nb for nb, (_, heard) in table.entries.items() if heard < now - ttl]
    for nb in stale:
        del table.entries[nb]
    return table


def routing_round(agent_id: int, table: RoutingTable, beacons, now: int,
                  hop_sentinel: int, ttl: int):
    """Absorb one round of hop beacons and recompute the agent's hop count.

    ``beacons`` is the list of (sender, advertised hops) heard this round,
    carrying the senders' pre-round state. Returns
    ``(table, own_hops, broadcast_value)`` where ``broadcast_value`` is what
    the agent advertises next (own hops + 1, capped at the sentinel).
    """
    for sender, hops in beacons:
        table.absorb(sender, min(hops, hop_sentinel), now)
    prune_stale(table, now, ttl)
    if agent_id == 0:
        own = 0
    else:
        best = table.min_hops()
        own = hop_sentinel if best is None else min(best, hop_sentinel)
    return table, own, min(own + 1, hop_sentinel)
