"""Scenario files, experiment sweeps, and CSV emission.

A scenario is a flat ``key = value`` text file ('#' starts a comment).
Parsing is strict: unknown keys are rejected and every value is range
checked before any simulation starts. The fully resolved configuration
is echoed into the summary CSV as ``# cfg`` comment lines so every
number in an output directory can be traced back to its inputs.

Output layout for a sweep: one series CSV per (policy, seed) pair named
``{name}_{policy}_seed{seed}.csv`` plus a single ``{name}_summary.csv``.
Every CSV starts with the schema line ``# swarmstore-schema v1``. A
series file holds the per-step rows first, then a ``# deliveries``
marker followed by one row per datum that reached the base station.
"""

from __future__ import annotations


import os
import statistics
from dataclasses import dataclass, field
from importlib import resources

from .engine import MetricsSeries, SimConfig, run
from .errors import (ConfigurationError, InvalidValueError,
                     ScenarioSyntaxError, UnknownKeyError)
from .storage import PolicyKind
from .topology import (FixedTopology, GridTopology, LennardJonesMobility,
                       RandomWalkMobility, ScaleFreeTopology)

__all__ = [
    "Scenario",
    "RunStats",
    "SummaryRow",
    "SweepSummary",
    "parse_scenario",
    "parse_scenario_text",
    "scenario_to_text",
    "run_sweep",
    "compare_policies",
    "compare_pair",
    "catalog",
    "load_bundled",
    "read_series_csv",
    "read_summary_csv",
    "SCHEMA_LINE",
]

SCHEMA_LINE = "# swarmstore-schema v1"
SERIES_COLUMNS = ("step", "n_g", "n_l", "reliability_step", "reliability_cum",
                  "items_on_agents", "items_at_base", "total_stored",
                  "mean_memory_pct")
DELIVERY_COLUMNS = ("datum_creator", "datum_seq", "created_step",
                    "delivered_step", "hops")
SUMMARY_COLUMNS = ("topology", "policy", "seeds", "mean_transfer_hops",
                   "mean_transfer_steps", "mean_memory_pct",
                   "reliability_end_mean", "reliability_end_std",
                   "total_stored_end_mean")

TOPOLOGY_NAMES = ("grid", "scalefree", "lennardjones", "randomwalk", "fixed")


def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_str(text: str) -> str:
    return text


def _parse_points(text: str) -> tuple:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 2:
            raise ValueError(f"expected 'x,y' point, got {chunk!r}")
        points.append((float(parts[0]), float(parts[1])))
    if not points:
        raise ValueError("empty point list")
    return tuple(points)


def _parse_floats(text: str) -> tuple:
    return tuple(float(p.strip()) for p in text.split(",") if p.strip())


def _parse_seeds(text: str) -> tuple:
    """Either ``lo:hi`` (half-open range) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        seeds = tuple(range(int(lo), int(hi)))
    else:
        seeds = tuple(int(p.strip()) for p in text.split(",") if p.strip())
    if not seeds:
        raise ValueError("seed list is empty")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seed list contains duplicates")
    return seeds


def _parse_policies(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            out.append(PolicyKind(part))
        except ValueError:
            raise ValueError(f"unknown policy {part!r}; "
                             f"expected one of {[p.value for p in PolicyKind]}")
    if not out:
        raise ValueError("policy list is empty")
    return tuple(out)


# key -> (parser, default). The canonical echo order is this dict's order.
_SCHEMA = {
    "name": (_parse_str, "scenario"),
    "topology": (_parse_str, "grid"),
    "agent_count": (_parse_int, 100),
    "arena_width": (_parse_float, 20.0),
    "arena_height": (_parse_float, 20.0),
    "comm_radius": (_parse_float, 3.0),
    "grid_spacing": (_parse_float, 2.2),
    "attach_count": (_parse_int, 2),
    "lj_target_distance": (_parse_float, 2.0),
    "lj_well_depth": (_parse_float, 0.05),
    "lj_max_speed": (_parse_float, 0.2),
    "rw_step_length": (_parse_float, 0.2),
    "rw_turn_std": (_parse_float, 0.5),
    "fixed_positions": (_parse_points, None),
    "source_count": (_parse_int, 3),
    "source_positions": (_parse_points, None),
    "source_intensities": (_parse_floats, None),
    "source_speed": (_parse_float, 0.0),
    "source_jitter_std": (_parse_float, 0.0),
    "decay_lambda": (_parse_float, 0.8),
    "corruption_scale": (_parse_float, 0.14),
    "sensor_noise_std": (_parse_float, 0.05),
    "risk_detection_floor": (_parse_float, 0.06),
    "risk_smoothing": (_parse_float, 0.7),
    "policies": (_parse_policies, (PolicyKind.RASS,)),
    "capacity_items": (_parse_int, 50),
    "bandwidth_cap": (_parse_int, 10),
    "alpha": (_parse_float, 1.0),
    "beta": (_parse_float, 35.0),
    "threshold": (_parse_float, 1.0),
    "generation_interval": (_parse_int, 12),
    "steps": (_parse_int, 500),
    "routing_ttl": (_parse_int, 3),
    "seeds": (_parse_seeds, tuple(range(30))),
    "out_dir": (_parse_str, None),
}


@dataclass(frozen=True)
class Scenario:
    """Resolved scenario: simulation template plus sweep dimensions."""

    values: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.values["name"]

    @property
    def policies(self) -> tuple:
        return self.values["policies"]

    @property
    def seeds(self) -> tuple:
        return self.values["seeds"]

    @property
    def out_dir(self) -> str:
        return self.values["out_dir"] or os.path.join("results", self.name)

    def topology_params(self):
        v = self.values
        kind = v["topology"]
        if kind == "grid":
            return GridTopology(spacing=v["grid_spacing"])
        if kind == "scalefree":
            return ScaleFreeTopology(attach_count=v["attach_count"])
        if kind == "lennardjones":
            return LennardJonesMobility(target_distance=v["lj_target_distance"],
                                        well_depth=v["lj_well_depth"],
                                        max_speed=v["lj_max_speed"])
        if kind == "randomwalk":
            return RandomWalkMobility(step_length=v["rw_step_length"],
                                      turn_std=v["rw_turn_std"])
        if kind == "fixed":
            if v["fixed_positions"] is None:
                raise InvalidValueError("fixed topology requires fixed_positions")
            return FixedTopology(positions=v["fixed_positions"])
        raise InvalidValueError(
            f"unknown topology {kind!r}; expected one of {TOPOLOGY_NAMES}")

    def sim_config(self, policy: PolicyKind, seed: int) -> SimConfig:
        v = self.values
        return SimConfig(
            agent_count=v["agent_count"],
            arena_width=v["arena_width"], arena_height=v["arena_height"],
            comm_radius=v["comm_radius"],
            topology=self.topology_params(),
            source_count=v["source_count"],
            source_positions=v["source_positions"],
            source_intensities=v["source_intensities"],
            source_speed=v["source_speed"],
            source_jitter_std=v["source_jitter_std"],
            decay=v["decay_lambda"],
            corruption_scale=v["corruption_scale"],
            sensor_noise_std=v["sensor_noise_std"],
            risk_detection_floor=v["risk_detection_floor"],
            risk_smoothing=v["risk_smoothing"],
            policy=policy,
            capacity_items=v["capacity_items"],
            bandwidth_cap=v["bandwidth_cap"],
            alpha=v["alpha"], beta=v["beta"], threshold=v["threshold"],
            generation_interval=v["generation_interval"],
            steps=v["steps"],
            routing_ttl=v["routing_ttl"],
            seed=seed,
        )


def parse_scenario_text(text: str, source: str = "<string>") -> Scenario:
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioSyntaxError(
                f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise UnknownKeyError(f"{source}:{lineno}: unknown key {key!r}")
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(value)
        except (ValueError, ConfigurationError) as exc:
            raise InvalidValueError(f"{source}:{lineno}: bad value for "
                                    f"{key!r}: {exc}") from None
    scenario = Scenario(values=values)
    _validate_scenario(scenario, source)
    return scenario


def _validate_scenario(scenario: Scenario, source: str) -> None:
    try:
        scenario.topology_params()
        scenario.sim_config(scenario.policies[0], scenario.seeds[0]).validate()
    except ConfigurationError as exc:
        raise InvalidValueError(f"{source}: {exc}") from None


def parse_scenario(path: str) -> Scenario:
    if not os.path.exists(path):
        raise ConfigurationError(f"scenario file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario_text(fh.read(), source=path)


def _format_value(key: str, value) -> str:
    if value is None:
        return ""
    if key == "policies":
        return ",".join(p.value for p in value)
    if key == "seeds":
        return ",".join(str(s) for s in value)
    if key in ("fixed_positions", "source_positions"):
        return "; ".join(f"{x:.6g},{y:.6g}" for x, y in value)
    if key == "source_intensities":
        return ",".join(f"{v:.6g}" for v in value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def scenario_to_text(scenario: Scenario) -> str:
    """Canonical flat-text form; parsing it back is a fixed point."""
    lines = []
    for key in _SCHEMA:
        rendered = _format_value(key, scenario.values[key])
        if rendered == "":
            continue
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ sweeps

@dataclass(frozen=True)
class RunStats:
    """Aggregates for one (policy, seed) run."""

    policy: PolicyKind
    seed: int
    mean_hops: float | None
    mean_steps: float | None
    mean_memory_pct: float
    reliability_end: float
    total_stored_end: int
    delivery_count: int


@dataclass(frozen=True)
class SummaryRow:
    topology: str
    policy: PolicyKind
    seeds: tuple
    mean_hops: float | None
    mean_steps: float | None
    mean_memory_pct: float
    reliability_end_mean: float
    reliability_end_std: float
    total_stored_end_mean: float


@dataclass
class SweepSummary:
    scenario: Scenario
    rows: list = field(default_factory=list)
    runs: dict = field(default_factory=dict)  # (policy, seed) -> RunStats


def _run_stats(policy: PolicyKind, seed: int, metrics: MetricsSeries) -> RunStats:
    hops = [d.hops for d in metrics.deliveries]
    steps = [d.delivered_step - d.created_step for d in metrics.deliveries]
    last = metrics.rows[-1]
    mem = sum(r.mean_memory_pct for r in metrics.rows) / len(metrics.rows)
    return RunStats(
        policy=policy, seed=seed,
        mean_hops=sum(hops) / len(hops) if hops else None,
        mean_steps=sum(steps) / len(steps) if steps else None,
        mean_memory_pct=mem,
        reliability_end=last.reliability_cum,
        total_stored_end=last.total_stored,
        delivery_count=len(hops),
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def series_csv_text(metrics: MetricsSeries) -> str:
    lines = [SCHEMA_LINE, ",".join(SERIES_COLUMNS)]
    for r in metrics.rows:
        lines.append(",".join([
            str(r.step), str(r.n_g), str(r.n_l),
            f"{r.reliability_step:.6f}", f"{r.reliability_cum:.6f}",
            str(r.items_on_agents), str(r.items_at_base), str(r.total_stored),
            f"{r.mean_memory_pct:.6f}",
        ]))
    lines.append("# deliveries")
    lines.append(",".join(DELIVERY_COLUMNS))
    for d in metrics.deliveries:
        lines.append(f"{d.creator},{d.seq},{d.created_step},{d.delivered_step},{d.hops}")
    return "\n".join(lines) + "\n"


def read_series_csv(path: str):
    """Returns (step_rows, delivery_rows) as lists of dicts; checks the schema."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SCHEMA_LINE:
        raise ConfigurationError(f"{path}: missing schema line {SCHEMA_LINE!r}")
    try:
        split = lines.index("# deliveries")
    except ValueError:
        raise ConfigurationError(f"{path}: missing '# deliveries' section") from None
    step_rows = _parse_csv_block(lines[1:split], SERIES_COLUMNS, path)
    deliveries = _parse_csv_block(lines[split + 1:], DELIVERY_COLUMNS, path)
    return step_rows, deliveries


def _parse_csv_block(lines, columns, path):
    if not lines or tuple(lines[0].split(",")) != columns:
        raise ConfigurationError(f"{path}: unexpected column header")
    out = []
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        row = {}
        for col, part in zip(columns, parts):
            row[col] = float(part) if "." in part else int(part)
        out.append(row)
    return out


def run_filename(name: str, policy: PolicyKind, seed: int) -> str:
    return f"{name}_{policy.value}_seed{seed}.csv"


def run_sweep(scenario: Scenario, out_dir: str | None = None,
              progress=None) -> SweepSummary:
    """Run every (policy, seed) cell, write the CSVs, and aggregate.

    Deterministic: rerunning into a fresh directory yields byte-identical
    files. Raises OSError before any simulation starts if the output
    directory cannot be created or written.
    """
    out = out_dir or scenario.out_dir
    os.makedirs(out, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out!r} is not writable")

    summary = SweepSummary(scenario=scenario)
    for policy in scenario.policies:
        per_seed = []
        for seed in scenario.seeds:
            metrics = run(scenario.sim_config(policy, seed))
            stats = _run_stats(policy, seed, metrics)
            summary.runs[(policy, seed)] = stats
            per_seed.append(stats)
            path = os.path.join(out, run_filename(scenario.name, policy, seed))
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(series_csv_text(metrics))
            if progress:
                progress(policy, seed, stats)
        summary.rows.append(_summarise(scenario, policy, per_seed))

    _write_summary(os.path.join(out, f"{scenario.name}_summary.csv"),
                   scenario, summary.rows)
    return summary


def _summarise(scenario: Scenario, policy: PolicyKind, per_seed) -> SummaryRow:
    hops = [s.mean_hops for s in per_seed if s.mean_hops is not None]
    steps = [s.mean_steps for s in per_seed if s.mean_steps is not None]
    rels = [s.reliability_end for s in per_seed]
    return SummaryRow(
        topology=scenario.values["topology"],
        policy=policy,
        seeds=tuple(s.seed for s in per_seed),
        mean_hops=sum(hops) / len(hops) if hops else None,
        mean_steps=sum(steps) / len(steps) if steps else None,
        mean_memory_pct=sum(s.mean_memory_pct for s in per_seed) / len(per_seed),
        reliability_end_mean=sum(rels) / len(rels),
        reliability_end_std=statistics.stdev(rels) if len(rels) > 1 else 0.0,
        total_stored_end_mean=sum(s.total_stored_end for s in per_seed) / len(per_seed),
    )


def _write_summary(path: str, scenario: Scenario, rows) -> None:
    lines = [SCHEMA_LINE]
    for cfg_line in scenario_to_text(scenario).splitlines():
        lines.append(f"# cfg {cfg_line}")
    lines.append(",".join(SUMMARY_COLUMNS))
    for r in rows:
        lines.append(",".join([
            r.topology, r.policy.value, ";".join(str(s) for s in r.seeds),
            _fmt(r.mean_hops), _fmt(r.mean_steps), _fmt(r.mean_memory_pct),
            _fmt(r.reliability_end_mean), _fmt(r.reliability_end_std),
            _fmt(r.total_stored_end_mean),
        ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_summary_csv(path: str):
    """Returns (summary_rows, echoed_config_text)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SCHEMA_LINE:
        raise ConfigurationError(f"{path}: missing schema line {SCHEMA_LINE!r}")
    echo = [l[len("# cfg "):] for l in lines if l.startswith("# cfg ")]
    data = [l for l in lines[1:] if not l.startswith("#")]
    if not data or tuple(data[0].split(",")) != SUMMARY_COLUMNS:
        raise ConfigurationError(f"{path}: unexpected summary header")
    rows = []
    for line in data[1:]:
        if not line:
            continue
        parts = line.split(",")
        rows.append(SummaryRow(
            topology=parts[0],
            policy=PolicyKind(parts[1]),
            seeds=tuple(int(s) for s in parts[2].split(";") if s),
            mean_hops=float(parts[3]) if parts[3] else None,
            mean_steps=float(parts[4]) if parts[4] else None,
            mean_memory_pct=float(parts[5]),
            reliability_end_mean=float(parts[6]),
            reliability_end_std=float(parts[7]),
            total_stored_end_mean=float(parts[8]),
        ))
    return rows, "\n".join(echo) + ("\n" if echo else "")


# ----------------------------------------------------------------- compare

def compare_pair(a: SummaryRow, b: SummaryRow) -> dict:
    """Paired ratios/deltas of row ``a`` over baseline row ``b``."""
    if set(a.seeds) != set(b.seeds):
        raise ConfigurationError(
            f"seed sets differ between {a.policy.value} and {b.policy.value}; "
            "pairing invalid")

    def ratio(x, y):
        if x is None or y is None or y == 0:
            return None
        return x / y

    return {
        "hops_ratio": ratio(a.mean_hops, b.mean_hops),
        "steps_ratio": ratio(a.mean_steps, b.mean_steps),
        "reliability_delta": a.reliability_end_mean - b.reliability_end_mean,
        "memory_delta": a.mean_memory_pct - b.mean_memory_pct,
    }


def compare_policies(rows) -> dict:
    """Per-topology pairings against the hop-count baseline.

    Returns ``{topology: {"<policy>_vs_<policy>": pair_dict}}`` and raises
    when the policies of a topology ran on differing seed sets.
    """
    by_topology: dict = {}
    for row in rows:
        by_topology.setdefault(row.topology, {})[row.policy] = row
    report: dict = {}
    for topology, policies in sorted(by_topology.items()):
        entries = {}
        base = policies.get(PolicyKind.HOPCOUNT)
        for policy, row in sorted(policies.items(), key=lambda kv: kv[0].value):
            if base is not None and policy is not PolicyKind.HOPCOUNT:
                entries[f"{policy.value}_vs_hopcount"] = compare_pair(row, base)
        if len(policies) >= 2 and not entries:
            names = sorted(policies, key=lambda p: p.value)
            entries[f"{names[0].value}_vs_{names[1].value}"] = compare_pair(
                policies[names[0]], policies[names[1]])
        report[topology] = entries
    return report


def format_comparison(report: dict) -> str:
    lines = []
    for topology, entries in report.items():
        lines.append(f"[{topology}]")
        for label, pair in entries.items():
            bits = []
            for key, value in pair.items():
                bits.append(f"{key}={'n/a' if value is None else f'{value:.3f}'}")
            lines.append(f"  {label}: " + "  ".join(bits))
    return "\n".join(lines)


# ----------------------------------------------------------------- catalog

def catalog() -> list:
    """Names of the bundled scenarios."""
    root = resources.files("swarmstore").joinpath("scenarios")
    return sorted(p.name[:-len(".scenario")]
                  for p in root.iterdir() if p.name.endswith(".scenario"))


def load_bundled(name: str) -> Scenario:
    root = resources.files("swarmstore").joinpath("scenarios")
    path = root.joinpath(f"{name}.scenario")
    if not path.is_file():
        raise ConfigurationError(
            f"no bundled scenario {name!r}; available: {', '.join(catalog())}")
    return parse_scenario_text(path.read_text(encoding="utf-8"), source=name)
