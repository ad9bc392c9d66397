"""swarmstore: deterministic simulator of decentralized, risk-aware data
storage and routing in a robot swarm, with hop-count and replication
baselines.

The library layers cleanly: :mod:`risk` models the hazard field,
:mod:`network` the gossip substrate, :mod:`routing` the hop-count tables,
:mod:`storage` the per-agent policies, :mod:`topology` the arena layouts,
:mod:`engine` the deterministic step loop, and :mod:`scenario` the
experiment surface (scenario files, sweeps, CSVs).
"""

from .engine import (DeliveryRecord, MetricsSeries, SimConfig, Simulation,
                     StepRow, reliability, run)
from .errors import (AccountingError, ConfigurationError, InvalidValueError,
                     ScenarioSyntaxError, SwarmStoreError, UnknownKeyError)
from .network import (CommGraph, DataTransfer, FitnessBeacon, HopBeacon,
                      build_comm_graph, exchange_round, graph_from_edges,
                      neighbours)
from .risk import (RadiationSource, RiskField, advance_sources,
                   corruption_probability, corruption_probability_many,
                   sense_radiation, sense_radiation_many, true_radiation,
                   true_radiation_many)
from .routing import RoutingTable, prune_stale, routing_round
from .scenario import (Scenario, SweepSummary, catalog, compare_pair,
                       compare_policies, load_bundled, parse_scenario,
                       parse_scenario_text, read_series_csv, read_summary_csv,
                       run_sweep, scenario_to_text)
from .storage import (AgentState, Datum, DatumStatus, FitnessContext,
                      LocalStore, PolicyKind, apply_corruption, choose_target,
                      fitness, is_unfit, policy_step, select_eviction)
from .topology import (Arena, FixedTopology, GridTopology,
                       LennardJonesMobility, RandomWalkMobility,
                       ScaleFreeTopology, gen_grid, gen_scale_free,
                       step_lennard_jones, step_random_walk)

__version__ = "0.1.0"
