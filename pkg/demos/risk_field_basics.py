"""Tour of the hazard model: sensing, decay, and corruption probabilities.

Run:  python3 demos/risk_field_basics.py
"""

import numpy as np

from swarmstore import (RadiationSource, RiskField, corruption_probability,
                        sense_radiation, true_radiation)

field = RiskField(
    sources=(
        RadiationSource(position=(8.0, 10.0), intensity=0.9),
        RadiationSource(position=(14.0, 12.0), intensity=0.4),
    ),
    decay=0.8,
    sensor_noise_std=0.05,
    corruption_scale=0.14,
)

print("Two sources: a strong one at (8, 10) and a weak one at (14, 12).")
print(f"{'position':>12} {'true level':>11} {'corruption p/step':>18}")
for pos in [(8.0, 10.0), (10.0, 10.0), (14.0, 12.0), (2.0, 2.0), (19.0, 1.0)]:
    level = true_radiation(field, pos)
    p = corruption_probability(field, pos)
    print(f"{str(pos):>12} {level:11.4f} {p:18.5f}")

print("\nA sensor at (10, 10) reads the field with Gaussian noise:")
rng = np.random.default_rng(7)
reads = [sense_radiation(field, (10.0, 10.0), rng) for _ in range(8)]
print("  readings:", ", ".join(f"{r:.3f}" for r in reads))
print(f"  true level: {true_radiation(field, (10.0, 10.0)):.3f}")

print("\nCorruption combines independently per source (product of "
      "complements),\nso it never exceeds 1 even when levels add up:")
stacked = RiskField(
    sources=tuple(RadiationSource((5.0, 5.0), 1.0) for _ in range(4)),
    decay=0.8, corruption_scale=1.0)
print(f"  four unit sources stacked at one point -> combined p = "
      f"{corruption_probability(stacked, (5.0, 5.0)):.4f}")
