"""Deterministic per-step simulation loop, data generation, and metrics.

Each step applies a fixed phase order: mobility, comm-graph rebuild,
source advance and sensing, delivery of the previous round's beacons,
routing round, policy step, message exchange, data generation,
corruption sampling, metrics. Beacons sent in one step are read at the
start of the next, so routing and fitness decisions always work from
previous-step information. Data items, by contrast, land in the
receiving store within the same step's exchange: corruption is drawn
once per step for every live item at whatever store currently holds it,
so transit never shields data from exposure and an item moves at most
one hop per step.

All randomness flows from one master seed split into five named
sub-streams (topology, risk, noise, corruption, mobility), which makes a
run a pure function of its configuration.

Every datum has exactly one lifecycle status at any time: stored (alive
somewhere in the swarm, possibly as several replicas, possibly in
flight), delivered (at the base station), corrupted (no live replica
left), or dropped (never found room). The per-step accounting identity
``generated == stored + delivered + corrupted + dropped`` is asserted
against a physical recount of the stores on every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import AccountingError, ConfigurationError
from .network import (CommGraph, DataTransfer, FitnessBeacon, HopBeacon,
                      build_comm_graph, exchange_round, graph_from_edges)
from .risk import (RadiationSource, RiskField, advance_sources,
                   corruption_probability_many, sense_radiation_many)
from .routing import routing_round
from .storage import (AgentState, Datum, DatumStatus, FitnessContext,
                      LocalStore, PolicyKind, apply_corruption, policy_step)
from .topology import (Arena, FixedTopology, GridTopology,
                       LennardJonesMobility, RandomWalkMobility,
                       ScaleFreeTopology, gen_grid, gen_scale_free,
                       step_lennard_jones, step_random_walk)

__all__ = [
    "SimConfig",
    "StepRow",
    "DeliveryRecord",
    "MetricsSeries",
    "Simulation",
    "run",
    "reliability",
]

STREAM_NAMES = ("topology", "risk", "noise", "corruption", "mobility")

_MIX1 = np.uint64(0x9E3779B97F4A7C15)
_MIX2 = np.uint64(0xBF58476D1CE4E5B9)
_MIX3 = np.uint64(0x94D049BB133111EB)


_U64 = 0xFFFFFFFFFFFFFFFF


def _keyed_uniforms(key: int, creators: np.ndarray, seqs: np.ndarray,
                    step: int) -> np.ndarray:
    """Deterministic uniforms keyed by (run stream, datum id, step).

    Corruption draws depend only on the datum's identity and the step, not
    on how much random state other agents consumed, so paired runs with
    the same seed expose corresponding data to identical draws (common
    random numbers).
    """
    mixed = (int(key) ^ (step * 0x94D049BB133111EB)) & _U64
    with np.errstate(over="ignore"):
        x = creators * _MIX1
        x ^= seqs * _MIX2
        x ^= np.uint64(mixed)
        x ^= x >> np.uint64(30)
        x *= _MIX2
        x ^= x >> np.uint64(27)
        x *= _MIX3
        x ^= x >> np.uint64(31)
    return (x >> np.uint64(11)).astype(np.float64) / float(1 << 53)


@dataclass(frozen=True)
class SimConfig:
    """Full description of one simulation run."""

    agent_count: int = 100
    arena_width: float = 20.0
    arena_height: float = 20.0
    comm_radius: float = 3.0
    topology: object = dc_field(default_factory=lambda: GridTopology(spacing=2.2))
    source_count: int = 3
    source_positions: tuple | None = None
    source_intensities: tuple | None = None
    source_velocities: tuple | None = None
    source_speed: float = 0.0  # drift speed (m/step) with per-source random heading
    source_jitter_std: float = 0.0
    decay: float = 0.8
    corruption_scale: float = 0.14
    sensor_noise_std: float = 0.05
    risk_detection_floor: float = 0.06
    risk_smoothing: float = 0.7  # per-step retention of the running risk estimate
    policy: PolicyKind = PolicyKind.RASS
    capacity_items: int = 50
    bandwidth_cap: int = 10
    alpha: float = 1.0
    beta: float = 35.0
    threshold: float = 1.0
    generation_interval: int = 12
    steps: int = 500
    routing_ttl: int = 3
    seed: int = 0

    def validate(self) -> None:
        if self.agent_count < 2:
            raise ConfigurationError("need the base station plus at least one agent")
        if self.capacity_items < 1 or self.bandwidth_cap < 1:
            raise ConfigurationError("capacities must be >= 1")
        if self.steps < 1:
            raise ConfigurationError("steps must be >= 1")
        if self.comm_radius <= 0:
            raise ConfigurationError("comm_radius must be > 0")
        if self.generation_interval < 1:
            raise ConfigurationError("generation_interval must be >= 1")
        if self.routing_ttl < 1:
            raise ConfigurationError("routing_ttl must be >= 1")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigurationError("alpha and beta must be >= 0")
        if self.threshold <= 0:
            raise ConfigurationError("threshold must be > 0")
        if self.source_count < 0:
            raise ConfigurationError("source_count must be >= 0")
        if self.risk_detection_floor < 0:
            raise ConfigurationError("risk_detection_floor must be >= 0")
        if not 0.0 <= self.risk_smoothing < 1.0:
            raise ConfigurationError("risk_smoothing must lie in [0, 1)")
        if self.source_speed < 0 or self.source_jitter_std < 0:
            raise ConfigurationError("source motion parameters must be >= 0")
        if self.source_positions is not None:
            k = len(self.source_positions)
            for opt in (self.source_intensities, self.source_velocities):
                if opt is not None and len(opt) != k:
                    raise ConfigurationError("source attribute lists disagree in length")
        Arena(self.arena_width, self.arena_height)  # validates dimensions
        if not isinstance(self.topology, (GridTopology, ScaleFreeTopology,
                                          LennardJonesMobility, RandomWalkMobility,
                                          FixedTopology)):
            raise ConfigurationError(f"unknown topology {self.topology!r}")
        if isinstance(self.topology, FixedTopology) \
                and len(self.topology.positions) != self.agent_count:
            raise ConfigurationError("fixed topology position count != agent_count")


@dataclass(frozen=True)
class StepRow:
    step: int
    n_g: int
    n_l: int
    reliability_step: float
    reliability_cum: float
    items_on_agents: int  # unique undelivered data alive in the swarm
    items_at_base: int
    total_stored: int
    mean_memory_pct: float


@dataclass(frozen=True)
class DeliveryRecord:
    creator: int
    seq: int
    created_step: int
    delivered_step: int
    hops: int
    route: tuple  # holder ids in order, ending at the base station


@dataclass
class MetricsSeries:
    rows: list = dc_field(default_factory=list)
    deliveries: list = dc_field(default_factory=list)
    generated: int = 0
    delivered: int = 0
    corrupted: int = 0
    dropped: int = 0


def reliability(n_g: int, n_l: int) -> float:
    """(n_g - n_l) / n_g, defined as 1 when nothing was generated."""
    if n_l < 0 or n_l > n_g:
        raise AccountingError(f"lost count {n_l} outside [0, generated {n_g}]")
    if n_g == 0:
        return 1.0
    return (n_g - n_l) / n_g


class Simulation:
    """One deterministic run; drive with :meth:`step` or use :func:`run`."""

    def __init__(self, cfg: SimConfig):
        cfg.validate()
        self.cfg = cfg
        streams = np.random.SeedSequence(cfg.seed).spawn(len(STREAM_NAMES))
        self.rng = {name: np.random.default_rng(ss)
                    for name, ss in zip(STREAM_NAMES, streams)}
        self.corruption_key = streams[STREAM_NAMES.index("corruption")] \
            .generate_state(1, np.uint64)[0]
        self.arena = Arena(cfg.arena_width, cfg.arena_height)
        self._init_topology()
        self.arena = Arena(cfg.arena_width, cfg.arena_height,
                           base_position=tuple(self.positions[0]))
        self._init_field()
        self.hop_sentinel = cfg.agent_count
        self.agents = [AgentState(id=i,
                                  store=LocalStore(cfg.capacity_items) if i else None,
                                  hop_count=0 if i == 0 else self.hop_sentinel)
                       for i in range(cfg.agent_count)]
        self.pending_beacons = {i: [] for i in range(cfg.agent_count)}
        self.step_no = 0
        self._seq = [0] * cfg.agent_count
        self.status: dict = {}  # datum key -> DatumStatus, authoritative ledger
        self.refcount: dict = {}  # datum key -> live replicas (stores + in flight)
        self.metrics = MetricsSeries()
        self.delivered_records: dict = {}

    # ------------------------------------------------------------------ setup

    def _init_topology(self) -> None:
        cfg, topo = self.cfg, self.cfg.topology
        self.explicit_edges = None
        self.headings = None
        if isinstance(topo, GridTopology):
            self.positions = gen_grid(cfg.agent_count, self.arena, topo.spacing)
        elif isinstance(topo, ScaleFreeTopology):
            self.positions, self.explicit_edges = gen_scale_free(
                cfg.agent_count, topo.attach_count, self.arena, self.rng["topology"])
        elif isinstance(topo, FixedTopology):
            self.positions = np.array(topo.positions, dtype=float)
        else:  # mobile topologies start from the densest lattice that fits
            self.positions = gen_grid(cfg.agent_count, self.arena,
                                      self._initial_spacing())
            if isinstance(topo, RandomWalkMobility):
                self.headings = self.rng["mobility"].uniform(
                    0.0, 2.0 * math.pi, cfg.agent_count)
        if self.explicit_edges is not None:
            self.graph = graph_from_edges(cfg.agent_count, self.explicit_edges)
        else:
            self.graph = build_comm_graph(self.positions, cfg.comm_radius)
        self.mobile = isinstance(topo, (LennardJonesMobility, RandomWalkMobility))

    def _initial_spacing(self) -> float:
        side = math.ceil(math.sqrt(self.cfg.agent_count))
        if side == 1:
            return 1.0
        return min(2.0, self.arena.width / (side - 1), self.arena.height / (side - 1))

    def _init_field(self) -> None:
        cfg = self.cfg
        rng = self.rng["risk"]
        if cfg.source_positions is not None:
            pos = [tuple(p) for p in cfg.source_positions]
            if cfg.source_intensities is not None:
                intens = list(cfg.source_intensities)
            else:
                intens = list(rng.uniform(0.0, 1.0, len(pos)))
            vel = cfg.source_velocities
        else:
            # sampled in the central quarter-area of the arena
            k = cfg.source_count
            xs = rng.uniform(self.arena.width * 0.25, self.arena.width * 0.75, k)
            ys = rng.uniform(self.arena.height * 0.25, self.arena.height * 0.75, k)
            intens = list(rng.uniform(0.0, 1.0, k))
            pos = [(float(x), float(y)) for x, y in zip(xs, ys)]
            vel = None
        if vel is None:
            if cfg.source_speed > 0:
                headings = rng.uniform(0.0, 2.0 * math.pi, len(pos))
                vel = [(cfg.source_speed * math.cos(th),
                        cfg.source_speed * math.sin(th)) for th in headings]
            else:
                vel = [(0.0, 0.0)] * len(pos)
        sources = [RadiationSource(p, float(i), tuple(v))
                   for p, i, v in zip(pos, intens, vel)]
        self.field = RiskField(sources=tuple(sources), decay=cfg.decay,
                               sensor_noise_std=cfg.sensor_noise_std,
                               corruption_scale=cfg.corruption_scale)

    # ------------------------------------------------------------ the loop

    def step(self) -> None:
        self.step_no += 1
        t = self.step_no
        self._step_generated = 0
        self._step_lost = 0

        self._phase_mobility()
        self._phase_rebuild_graph()
        self._phase_sense(t)
        hop_inboxes, potentials = self._phase_deliver(t)
        outboxes = self._phase_routing(t, hop_inboxes)
        self._phase_policy(outboxes, potentials)
        self._phase_exchange(outboxes, t)
        self._phase_generate(t)
        self._phase_corruption()
        self._phase_metrics(t)

    def _phase_mobility(self) -> None:
        topo = self.cfg.topology
        if isinstance(topo, LennardJonesMobility):
            self.positions = step_lennard_jones(self.positions, topo,
                                                self.graph, self.arena)
        elif isinstance(topo, RandomWalkMobility):
            self.positions, self.headings = step_random_walk(
                self.positions, self.headings, topo, self.arena, self.rng["mobility"])

    def _phase_rebuild_graph(self) -> None:
        if self.mobile and self.explicit_edges is None:
            self.graph = build_comm_graph(self.positions, self.cfg.comm_radius)

    def _phase_sense(self, t: int) -> None:
        self.field = advance_sources(self.field, self.rng["risk"], self.arena,
                                     self.cfg.source_jitter_std)
        sensed = sense_radiation_many(self.field, self.positions, self.rng["noise"])
        keep = self.cfg.risk_smoothing
        for agent in self.agents[1:]:
            agent.sensed_risk = float(sensed[agent.id])
            agent.risk_estimate = (keep * agent.risk_estimate
                                   + (1.0 - keep) * max(0.0, agent.sensed_risk))

    def _phase_deliver(self, t: int):
        hop_inboxes = {i: [] for i in range(self.cfg.agent_count)}
        potentials = {i: {} for i in range(self.cfg.agent_count)}
        for receiver in range(self.cfg.agent_count):
            for msg in self.pending_beacons.get(receiver, ()):
                if isinstance(msg, HopBeacon):
                    hop_inboxes[receiver].append((msg.sender, msg.hops))
                else:
                    potentials[receiver][msg.sender] = msg.potential
        self.pending_beacons = {}
        return hop_inboxes, potentials

    def _receive_datum(self, receiver: int, sender: int, datum: Datum, t: int) -> None:
        if receiver == 0:
            datum.hops_travelled += 1
            datum.route.append(0)
            self._record_delivery(datum, t)
            return
        store = self.agents[receiver].store
        if store.contains(datum.key):
            self._drop_replica(datum)  # duplicate replica, discard silently
        elif store.available > 0:
            datum.hops_travelled += 1
            datum.route.append(receiver)
            store.insert(datum)
        else:
            self._return_to_sender(sender, datum)

    def _return_to_sender(self, sender: int, datum: Datum) -> None:
        store = self.agents[sender].store
        if store.contains(datum.key):
            self._drop_replica(datum)
        elif store.available > 0:
            store.insert_oldest(datum)
        else:
            self._lose(datum, DatumStatus.DROPPED_FULL)

    def _drop_replica(self, datum: Datum) -> None:
        self.refcount[datum.key] -= 1
        if self.refcount[datum.key] <= 0:
            raise AccountingError(f"replica count of {datum.key} fell to zero")

    def _lose(self, datum: Datum, status: DatumStatus) -> None:
        self.refcount[datum.key] -= 1
        if self.refcount[datum.key] > 0:
            datum.status = DatumStatus.STORED  # replicas remain elsewhere
            return
        datum.status = status
        self.status[datum.key] = status
        if status is DatumStatus.CORRUPTED:
            self.metrics.corrupted += 1
        else:
            self.metrics.dropped += 1
        self._step_lost += 1

    def _record_delivery(self, datum: Datum, t: int) -> None:
        if self.cfg.policy is PolicyKind.STIGMERGY:
            raise AccountingError("stigmergy replication must not target the base")
        if datum.key in self.delivered_records:
            raise AccountingError(f"datum {datum.key} delivered twice")
        datum.status = DatumStatus.DELIVERED
        self.status[datum.key] = DatumStatus.DELIVERED
        self.refcount[datum.key] -= 1
        record = DeliveryRecord(creator=datum.creator, seq=datum.seq,
                                created_step=datum.created_step, delivered_step=t,
                                hops=datum.hops_travelled, route=tuple(datum.route))
        self.delivered_records[datum.key] = record
        self.metrics.deliveries.append(record)
        self.metrics.delivered += 1

    def _phase_routing(self, t: int, hop_inboxes: dict) -> dict:
        outboxes = {i: [] for i in range(self.cfg.agent_count)}
        outboxes[0] = [HopBeacon(sender=0, hops=1),
                       FitnessBeacon(sender=0, potential=math.inf)]
        for agent in self.agents[1:]:
            _, own, bcast = routing_round(agent.id, agent.routing_table,
                                          hop_inboxes[agent.id], t,
                                          self.hop_sentinel, self.cfg.routing_ttl)
            agent.hop_count = own
            outboxes[agent.id].append(HopBeacon(sender=agent.id, hops=bcast))
        return outboxes

    def _phase_policy(self, outboxes: dict, potentials: dict) -> None:
        cfg = self.cfg
        for agent in self.agents[1:]:
            # the fitness input is the smoothed reading, and estimates below
            # the detection floor count as clean; otherwise sensor noise
            # alone would randomise comparisons between equally safe agents
            risk = agent.risk_estimate
            if risk < cfg.risk_detection_floor:
                risk = 0.0
            ctx = FitnessContext(
                hop_count=agent.hop_count,
                risk=risk,
                alpha=cfg.alpha, beta=cfg.beta, threshold=cfg.threshold,
                neighbour_potentials=potentials[agent.id],
                neighbour_ids=frozenset(self.graph.adjacency[agent.id]),
            )
            msgs = policy_step(agent, cfg.policy, ctx, cfg.bandwidth_cap,
                               self.hop_sentinel)
            for msg in msgs:
                if isinstance(msg, DataTransfer):
                    for datum in msg.items:
                        if agent.store.contains(datum.key):  # replica in flight
                            self.refcount[datum.key] += 1
            outboxes[agent.id].extend(msgs)

    def _phase_exchange(self, outboxes: dict, t: int) -> None:
        inboxes, undeliverable = exchange_round(outboxes, self.graph,
                                                self.cfg.bandwidth_cap)
        for sender in sorted(undeliverable):
            for datum in reversed(undeliverable[sender]):
                self._return_to_sender(sender, datum)
        # beacons are read next step; data lands in stores right away
        self.pending_beacons = {}
        for receiver in range(self.cfg.agent_count):
            beacons = []
            for msg in inboxes.get(receiver, ()):
                if isinstance(msg, (HopBeacon, FitnessBeacon)):
                    beacons.append(msg)
                else:
                    for datum in msg.items:
                        self._receive_datum(receiver, msg.sender, datum, t)
            self.pending_beacons[receiver] = beacons

    def _phase_generate(self, t: int) -> None:
        cfg = self.cfg
        for agent in self.agents[1:]:
            if t % cfg.generation_interval != agent.id % cfg.generation_interval:
                continue
            self._seq[agent.id] += 1
            datum = Datum(creator=agent.id, seq=self._seq[agent.id], created_step=t)
            self.metrics.generated += 1
            self._step_generated += 1
            self.refcount[datum.key] = 1
            if agent.store.available > 0:
                datum.route.append(agent.id)
                agent.store.insert(datum)
                self.status[datum.key] = DatumStatus.STORED
            else:
                self.status[datum.key] = DatumStatus.DROPPED_FULL
                datum.status = DatumStatus.DROPPED_FULL
                self.refcount[datum.key] = 0
                self.metrics.dropped += 1
                self._step_lost += 1

    def _phase_corruption(self) -> None:
        probs = corruption_probability_many(self.field, self.positions)
        for agent in self.agents[1:]:
            p = float(probs[agent.id])
            if p <= 0.0 or not agent.store.items:
                continue
            creators = np.fromiter((d.creator for d in agent.store.items),
                                   dtype=np.uint64, count=len(agent.store.items))
            seqs = np.fromiter((d.seq for d in agent.store.items),
                               dtype=np.uint64, count=len(agent.store.items))
            flags = _keyed_uniforms(self.corruption_key, creators, seqs,
                                    self.step_no) < p
            corrupted = agent.store.remove_where(flags)
            for datum in corrupted:
                datum.status = DatumStatus.CORRUPTED
                self._lose(datum, DatumStatus.CORRUPTED)

    def _phase_metrics(self, t: int) -> None:
        m = self.metrics
        stored_alive = m.generated - m.delivered - m.corrupted - m.dropped
        self._check_conservation(stored_alive)
        caps = self.cfg.capacity_items
        mem = [100.0 * len(a.store) / caps for a in self.agents[1:]]
        g, l = self._step_generated, self._step_lost
        rel_step = 1.0 if g == 0 else max(0.0, (g - l) / g)
        lost_cum = m.corrupted + m.dropped
        row = StepRow(
            step=t, n_g=g, n_l=l,
            reliability_step=rel_step,
            reliability_cum=reliability(m.generated, lost_cum),
            items_on_agents=stored_alive,
            items_at_base=m.delivered,
            total_stored=stored_alive + m.delivered,
            mean_memory_pct=sum(mem) / len(mem),
        )
        m.rows.append(row)

    def _check_conservation(self, stored_alive: int) -> None:
        key_sets = [agent.store._keys for agent in self.agents[1:]]
        seen = set().union(*key_sets) if key_sets else set()
        copies = sum(len(ks) for ks in key_sets)
        if len(seen) != stored_alive:
            raise AccountingError(
                f"step {self.step_no}: {len(seen)} unique items alive, "
                f"ledger says {stored_alive}")
        if self.cfg.policy is not PolicyKind.STIGMERGY and copies != len(seen):
            raise AccountingError(
                f"step {self.step_no}: {copies} copies of {len(seen)} items "
                "under a move-only policy")
        # the per-key status audit is the slow part; do it periodically
        if self.step_no % 50 == 0 or self.step_no == self.cfg.steps:
            for key in seen:
                if self.status.get(key) is not DatumStatus.STORED:
                    raise AccountingError(
                        f"item {key} alive but status {self.status.get(key)}")


def run(config: SimConfig) -> MetricsSeries:
    """Execute a full run; identical configs produce identical output."""
    sim = Simulation(config)
    for _ in range(config.steps):
        sim.step()
    return sim.metrics
