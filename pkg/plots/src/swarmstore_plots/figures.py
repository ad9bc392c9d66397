"""The three figure kinds: reliability curves, transfer-speed histogram,
and total swarm storage over time.

Each function reads per-run CSVs grouped by policy, writes one image,
and returns the numbers it displayed so callers can cross-check them.
Rendering is a pure function of the input files; no timestamps are
embedded.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import discover_runs, read_series

POLICY_ORDER = ("rass", "hopcount", "stigmergy")
POLICY_COLOURS = {"rass": "#1b7837", "hopcount": "#2166ac", "stigmergy": "#b2182b"}
SPEED_EXCLUDED = ("stigmergy",)  # replication has no base station to reach


class EmptyDeliveries(ValueError):
    """No delivery records found; the runs were too short to plot speeds."""


def _ordered(runs: dict):
    return [p for p in POLICY_ORDER if p in runs] + \
           [p for p in sorted(runs) if p not in POLICY_ORDER]


def plot_reliability(in_dir: str, out_path: str) -> dict:
    """Mean cumulative reliability per policy vs step, with a +-std band."""
    runs = discover_runs(in_dir)
    if not runs:
        raise EmptyDeliveries(f"no per-run CSV files in {in_dir}")
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    out = {}
    for policy in _ordered(runs):
        series = [read_series(p)[0] for p in runs[policy]]
        steps = series[0]["step"]
        curves = np.vstack([s["reliability_cum"] for s in series])
        mean = curves.mean(axis=0)
        ax.plot(steps, mean, label=policy, color=POLICY_COLOURS.get(policy))
        if len(series) > 1:
            std = curves.std(axis=0, ddof=1)
            ax.fill_between(steps, mean - std, mean + std, alpha=0.2,
                            color=POLICY_COLOURS.get(policy), linewidth=0)
        out[policy] = float(mean[-1])
    ax.set_xlabel("step")
    ax.set_ylabel("reliability")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out


def plot_speed_hist(in_dir: str, out_path: str) -> dict:
    """Histogram of delivery hop counts per policy, means annotated.

    Returns ``{policy: mean_hops}`` exactly as annotated on the figure.
    """
    runs = discover_runs(in_dir)
    hops = {}
    for policy in _ordered(runs):
        if policy in SPEED_EXCLUDED:
            continue
        values = np.concatenate([read_series(p)[1]["hops"]
                                 for p in runs[policy]]) if runs[policy] else []
        if len(values):
            hops[policy] = values
    if not hops:
        raise EmptyDeliveries(
            "no delivery records found; run the simulation for more steps")
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    top = int(max(v.max() for v in hops.values()))
    bins = np.arange(0.5, top + 1.5)
    means = {}
    for policy, values in hops.items():
        means[policy] = float(values.mean())
        ax.hist(values, bins=bins, alpha=0.55, color=POLICY_COLOURS.get(policy),
                label=f"{policy} (mean {means[policy]:.2f})")
        ax.axvline(means[policy], color=POLICY_COLOURS.get(policy),
                   linestyle="--", linewidth=1)
    ax.set_xlabel("hops to the base station")
    ax.set_ylabel("deliveries")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return means


def plot_storage(in_dir: str, out_path: str) -> dict:
    """Total stored data (swarm plus base station) per policy vs step."""
    runs = discover_runs(in_dir)
    if not runs:
        raise EmptyDeliveries(f"no per-run CSV files in {in_dir}")
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    out = {}
    for policy in _ordered(runs):
        series = [read_series(p)[0] for p in runs[policy]]
        steps = series[0]["step"]
        curves = np.vstack([s["total_stored"] for s in series])
        mean = curves.mean(axis=0)
        ax.plot(steps, mean, label=policy, color=POLICY_COLOURS.get(policy))
        out[policy] = float(mean[-1])
    ax.set_xlabel("step")
    ax.set_ylabel("total stored data items")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out


FIGURES = {
    "reliability": plot_reliability,
    "speed": plot_speed_hist,
    "storage": plot_storage,
}
