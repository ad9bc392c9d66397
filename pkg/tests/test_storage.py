"""Storage policies: potentials, unfitness, LRU eviction, transfer targeting."""

import math

import numpy as np
import pytest

from swarmstore import (AgentState, Datum, DatumStatus, FitnessContext,
                        LocalStore, PolicyKind, RoutingTable, apply_corruption,
                        choose_target, fitness, is_unfit, policy_step,
                        select_eviction)
from swarmstore.network import DataTransfer, FitnessBeacon


def make_store(capacity=50, items=0, creator=1):
    store = LocalStore(capacity)
    for seq in range(items):
        store.insert(Datum(creator=creator, seq=seq, created_step=0))
    return store


def make_ctx(hop_count=2, risk=0.0, alpha=1.0, beta=10.0, threshold=1.0,
             potentials=None, neighbour_ids=None):
    potentials = potentials or {}
    if neighbour_ids is None:
        neighbour_ids = frozenset(potentials)
    return FitnessContext(hop_count=hop_count, risk=risk, alpha=alpha,
                          beta=beta, threshold=threshold,
                          neighbour_potentials=potentials,
                          neighbour_ids=frozenset(neighbour_ids))


class TestFitness:
    def test_full_memory_gives_zero(self):
        assert fitness(0, 3, 0.2, 10.0, 1.0) == 0.0

    def test_direct_substitution(self):
        assert fitness(5, 1, 0.0, 10.0, 1.0) == pytest.approx(0.1)

    def test_hand_evaluated_with_risk(self):
        assert fitness(5, 2, 0.5, 10.0, 1.0) == pytest.approx(1.0 / 20.5)

    def test_sink_sentinel_when_denominator_vanishes(self):
        assert fitness(1, 0, 0.0, 10.0, 1.0) == math.inf

    def test_argmax_invariant_under_weight_scaling(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            alpha, beta = rng.uniform(0.1, 20, 2)
            c = rng.uniform(0.1, 10)
            hops = rng.integers(1, 12, 6)
            risks = rng.uniform(0, 1, 6)
            base = [fitness(1, int(h), float(r), alpha, beta)
                    for h, r in zip(hops, risks)]
            scaled = [fitness(1, int(h), float(r), c * alpha, c * beta)
                      for h, r in zip(hops, risks)]
            assert np.argmax(base) == np.argmax(scaled)
            own_b, own_s = base[0], scaled[0]
            nbrs_b = {i: v for i, v in enumerate(base[1:])}
            nbrs_s = {i: v for i, v in enumerate(scaled[1:])}
            assert is_unfit(own_b, nbrs_b, 1.3) == is_unfit(own_s, nbrs_s, 1.3)


class TestIsUnfit:
    def test_no_neighbours_is_fit(self):
        assert not is_unfit(0.0, {}, 1.0)

    def test_equal_potential_boundary_is_fit(self):
        assert not is_unfit(0.5, {3: 0.5}, 1.0)

    def test_threshold_scales_own_potential(self):
        assert is_unfit(0.3, {9: 0.7}, 2.0)  # 0.6 < 0.7
        assert not is_unfit(0.4, {9: 0.7}, 2.0)  # 0.8 > 0.7


class TestSelectEviction:
    def test_empty_store(self):
        assert select_eviction(make_store(items=0), 5) == []

    def test_lru_order_preserved(self):
        store = make_store(items=3)
        evicted = select_eviction(store, 2)
        assert [d.seq for d in evicted] == [0, 1]
        assert [d.seq for d in store.items] == [2]

    def test_request_beyond_size_takes_everything(self):
        store = make_store(items=4)
        assert len(select_eviction(store, 10)) == 4
        assert len(store) == 0


class TestChooseTarget:
    def test_single_entry(self):
        assert choose_target({7: 0.3}) == 7

    def test_tie_breaks_to_lowest_id(self):
        assert choose_target({9: 0.5, 2: 0.5}) == 2

    def test_matches_linear_scan_oracle(self):
        rng = np.random.default_rng(32)
        for _ in range(100):
            ids = rng.choice(100, size=10, replace=False)
            pots = rng.choice([0.1, 0.2, 0.3, 0.4], size=10)
            mapping = {int(i): float(p) for i, p in zip(ids, pots)}
            best = None
            for nid in sorted(mapping):
                if best is None or mapping[nid] > mapping[best]:
                    best = nid
            assert choose_target(mapping) == best

    def test_empty_map_is_an_error(self):
        with pytest.raises(ValueError):
            choose_target({})


class TestPolicyStep:
    def test_fit_agent_emits_only_beacon(self):
        agent = AgentState(id=3, store=make_store(items=5), hop_count=2)
        ctx = make_ctx(hop_count=2, potentials={4: 0.1})  # own 0.5 beats 0.1
        out = policy_step(agent, PolicyKind.RASS, ctx, 10, hop_sentinel=100)
        assert len(out) == 1 and isinstance(out[0], FitnessBeacon)
        assert len(agent.store) == 5

    def test_unfit_agent_sends_lru_batch_to_fittest(self):
        agent = AgentState(id=3, store=make_store(items=12), hop_count=4)
        ctx = make_ctx(hop_count=4, potentials={8: math.inf, 6: 0.2})
        out = policy_step(agent, PolicyKind.RASS, ctx, 10, hop_sentinel=100)
        transfers = [m for m in out if isinstance(m, DataTransfer)]
        assert len(transfers) == 1
        assert transfers[0].target == 8
        assert [d.seq for d in transfers[0].items] == list(range(10))
        assert len(agent.store) == 2

    def test_hopcount_requires_strictly_lower_hops(self):
        agent = AgentState(id=3, store=make_store(items=5), hop_count=2)
        agent.routing_table = RoutingTable({4: (3, 1), 5: (3, 1)})  # via=3 -> h=2
        ctx = make_ctx(hop_count=2, potentials={4: 0.5, 5: 0.5})
        out = policy_step(agent, PolicyKind.HOPCOUNT, ctx, 10, hop_sentinel=100)
        assert not [m for m in out if isinstance(m, DataTransfer)]

    def test_hopcount_targets_closer_neighbour(self):
        agent = AgentState(id=3, store=make_store(items=5), hop_count=2)
        agent.routing_table = RoutingTable({4: (2, 1), 5: (3, 1)})
        ctx = make_ctx(hop_count=2, potentials={4: 1.0, 5: 0.5})
        out = policy_step(agent, PolicyKind.HOPCOUNT, ctx, 10, hop_sentinel=100)
        transfers = [m for m in out if isinstance(m, DataTransfer)]
        assert transfers and transfers[0].target == 4

    def test_hopcount_ignores_risk(self):
        agent = AgentState(id=3, store=make_store(items=5), hop_count=2)
        agent.routing_table = RoutingTable({4: (2, 1)})
        ctx = make_ctx(hop_count=2, risk=0.9, potentials={4: 1.0})
        policy_step(agent, PolicyKind.HOPCOUNT, ctx, 10, hop_sentinel=100)
        assert agent.potential == pytest.approx(0.5)  # 1/(1*2), no beta term

    def test_hopcount_ignores_sentinel_routes(self):
        agent = AgentState(id=3, store=make_store(items=5), hop_count=100)
        agent.routing_table = RoutingTable({4: (100, 1)})
        ctx = make_ctx(hop_count=100, potentials={4: 0.5})
        out = policy_step(agent, PolicyKind.HOPCOUNT, ctx, 10, hop_sentinel=100)
        assert not [m for m in out if isinstance(m, DataTransfer)]

    def test_stigmergy_replicates_to_agent_neighbours_only(self):
        agent = AgentState(id=3, store=make_store(items=2), hop_count=2)
        ctx = make_ctx(potentials={}, neighbour_ids={0, 4, 5})
        out = policy_step(agent, PolicyKind.STIGMERGY, ctx, 10, hop_sentinel=100)
        targets = {m.target for m in out}
        assert targets == {4, 5}  # never the base station
        assert len(agent.store) == 2  # replication copies, originals stay
        total = sum(len(m.items) for m in out)
        assert total <= 10

    def test_stigmergy_respects_budget(self):
        agent = AgentState(id=3, store=make_store(items=30), hop_count=2)
        ctx = make_ctx(potentials={}, neighbour_ids={4, 5, 6})
        out = policy_step(agent, PolicyKind.STIGMERGY, ctx, 10, hop_sentinel=100)
        assert sum(len(m.items) for m in out) <= 10

    def test_stigmergy_rotation_advances(self):
        agent = AgentState(id=3, store=make_store(items=4), hop_count=2)
        ctx = make_ctx(potentials={}, neighbour_ids={4})
        seen = []
        for _ in range(3):
            out = policy_step(agent, PolicyKind.STIGMERGY, ctx, 2, hop_sentinel=100)
            seen.append(tuple(d.seq for m in out for d in m.items))
        assert seen == [(0, 1), (2, 3), (0, 1)]


class TestApplyCorruption:
    def test_zero_probability_touches_nothing(self):
        store = make_store(items=10)
        rng = np.random.default_rng(0)
        state = rng.bit_generator.state
        apply_corruption(store, 0.0, rng)
        assert len(store) == 10
        assert rng.bit_generator.state == state  # no random state consumed

    def test_certain_corruption_empties_store(self):
        store = make_store(items=10)
        _, corrupted = apply_corruption(store, 1.0, np.random.default_rng(1))
        assert len(store) == 0 and len(corrupted) == 10
        assert all(d.status is DatumStatus.CORRUPTED for d in corrupted)

    def test_monte_carlo_concentration(self):
        rng = np.random.default_rng(2)
        corrupted = 0
        total = 0
        for _ in range(100):
            store = make_store(capacity=200, items=100)
            _, gone = apply_corruption(store, 0.1, rng)
            corrupted += len(gone)
            total += 100
        assert abs(corrupted / total - 0.1) < 0.01

    def test_survivor_order_preserved(self):
        store = make_store(items=20)
        apply_corruption(store, 0.4, np.random.default_rng(3))
        seqs = [d.seq for d in store.items]
        assert seqs == sorted(seqs)


class TestLocalStore:
    def test_capacity_enforced(self):
        store = make_store(capacity=2, items=2)
        with pytest.raises(Exception):
            store.insert(Datum(creator=9, seq=0, created_step=0))

    def test_duplicate_key_rejected(self):
        store = make_store(capacity=5)
        store.insert(Datum(creator=1, seq=1, created_step=0))
        with pytest.raises(Exception):
            store.insert(Datum(creator=1, seq=1, created_step=0))

    def test_insert_oldest_goes_to_front(self):
        store = make_store(capacity=5, items=2)
        store.insert_oldest(Datum(creator=9, seq=7, created_step=0))
        assert store.items[0].key == (9, 7)
