"""Radiation risk field: point sources, noisy sensing, and data corruption.

A field is a set of point sources with intensities in [0, 1]. The level
perceived at a position decays with squared Euclidean distance,
``I / (1 + decay * rho^2)``, and an on-board sensor adds Gaussian noise.
Stored data corrupts stochastically: each source contributes an
independent Bernoulli event with parameter
``clip(corruption_scale * I / (1 + decay * rho^2), 0, 1)`` and the
combined per-step probability is one minus the product of complements.
Corruption always uses the noiseless field; negative sensor readings
are a sensing artifact only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "RadiationSource",
    "RiskField",
    "true_radiation",
    "true_radiation_many",
    "sense_radiation",
    "sense_radiation_many",
    "corruption_probability",
    "corruption_probability_many",
    "advance_sources",
]


@dataclass(frozen=True)
class RadiationSource:
    """One point source: position (m), intensity in [0, 1], velocity (m/step)."""

    position: tuple[float, float]
    intensity: float
    velocity: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0.0 <= self.intensity <= 1.0:
            raise ConfigurationError(
                f"source intensity must lie in [0, 1], got {self.intensity}")


@dataclass(frozen=True)
class RiskField:
    """Collection of sources plus decay, sensor-noise, and corruption parameters."""

    sources: tuple[RadiationSource, ...] = field(default_factory=tuple)
    decay: float = 1.0
    sensor_noise_std: float = 0.05
    corruption_scale: float = 0.01

    def __post_init__(self):
        if self.decay <= 0:
            raise ConfigurationError(f"decay must be > 0, got {self.decay}")
        if self.sensor_noise_std < 0:
            raise ConfigurationError(
                f"sensor_noise_std must be >= 0, got {self.sensor_noise_std}")
        if not 0.0 <= self.corruption_scale <= 1.0:
            raise ConfigurationError(
                f"corruption_scale must lie in [0, 1], got {self.corruption_scale}")
        object.__setattr__(self, "sources", tuple(self.sources))


def _source_arrays(field_: RiskField) -> tuple[np.ndarray, np.ndarray]:
    if not field_.sources:
        return np.zeros((0, 2)), np.zeros(0)
    pos = np.array([s.position for s in field_.sources], dtype=float)
    intens = np.array([s.intensity for s in field_.sources], dtype=float)
    return pos, intens


def true_radiation(field_: RiskField, pos) -> float:
    """Noiseless perceived level at ``pos``: sum of per-source decayed intensities."""
    return float(true_radiation_many(field_, np.asarray(pos, dtype=float)[None, :])[0])


def true_radiation_many(field_: RiskField, positions: np.ndarray) -> np.ndarray:
    """Vectorised :func:`true_radiation` for an (n, 2) position array."""
    spos, intens = _source_arrays(field_)
    if len(intens) == 0:
        return np.zeros(len(positions))
    # (n, k) squared distances from each position to each source
    d2 = ((positions[:, None, :] - spos[None, :, :]) ** 2).sum(axis=2)
    return (intens[None, :] / (1.0 + field_.decay * d2)).sum(axis=1)


def sense_radiation(field_: RiskField, pos, rng: np.random.Generator) -> float:
    """One noisy sensor reading; may be negative, callers clamp as documented."""
    level = true_radiation(field_, pos)
    if field_.sensor_noise_std == 0:
        return level
    return level + rng.normal(0.0, field_.sensor_noise_std)


def sense_radiation_many(field_: RiskField, positions: np.ndarray,
                         rng: np.random.Generator) -> np.ndarray:
    """Vectorised sensing; draws one noise sample per position when noise is on."""
    levels = true_radiation_many(field_, positions)
    if field_.sensor_noise_std == 0:
        return levels
    return levels + rng.normal(0.0, field_.sensor_noise_std, size=len(levels))


def corruption_probability(field_: RiskField, pos) -> float:
    """Per-step probability that a datum stored at ``pos`` is corrupted."""
    return float(corruption_probability_many(field_, np.asarray(pos, dtype=float)[None, :])[0])


def corruption_probability_many(field_: RiskField, positions: np.ndarray) -> np.ndarray:
    """Vectorised combined corruption law, one probability per position.

    Sources act independently, so the combined probability is
    ``1 - prod_j (1 - p_j)`` over the per-source clipped contributions.
    """
    spos, intens = _source_arrays(field_)
    n = len(positions)
    if len(intens) == 0:
        return np.zeros(n)
    d2 = ((positions[:, None, :] - spos[None, :, :]) ** 2).sum(axis=2)
    per_source = np.clip(
        field_.corruption_scale * intens[None, :] / (1.0 + field_.decay * d2), 0.0, 1.0)
    return 1.0 - np.prod(1.0 - per_source, axis=1)


def reflect_into(value: float, lo: float, hi: float) -> tuple[float, bool]:
    """Reflect a scalar back into [lo, hi]; returns (value, was_reflected)."""
    if hi <= lo:
        raise ConfigurationError("degenerate interval for reflection")
    flipped = False
    span = hi - lo
    while value < lo or value > hi:
        if value < lo:
            value = lo + (lo - value)
        else:
            value = hi - (value - hi)
        flipped = not flipped
        if abs(value - lo) > 4 * span:  # runaway velocity guard
            value = min(max(value, lo), hi)
            break
    return value, flipped


def advance_sources(field_: RiskField, rng: np.random.Generator, arena,
                    jitter_std: float = 0.0) -> RiskField:
    """Move every source by its velocity (plus optional jitter), reflecting at walls.

    Intensities are unchanged. Static fields (all velocities zero, jitter off)
    are returned as-is so no random state is consumed.
    """
    if jitter_std == 0.0 and all(s.velocity == (0.0, 0.0) for s in field_.sources):
        return field_
    moved = []
    for src in field_.sources:
        dx, dy = src.velocity
        if jitter_std > 0:
            dx += rng.normal(0.0, jitter_std)
            dy += rng.normal(0.0, jitter_std)
        x, fx = reflect_into(src.position[0] + dx, 0.0, arena.width)
        y, fy = reflect_into(src.position[1] + dy, 0.0, arena.height)
        vx, vy = src.velocity
        moved.append(RadiationSource(
            position=(x, y),
            intensity=src.intensity,
            velocity=(-vx if fx else vx, -vy if fy else vy),
        ))
    return replace(field_, sources=tuple(moved))
