"""One full simulation run, narrated: where the data goes and what it costs.

Run:  python3 demos/single_run_walkthrough.py
"""

import numpy as np

from swarmstore import PolicyKind, Simulation, load_bundled

scenario = load_bundled("grid100")
cfg = scenario.sim_config(PolicyKind.RASS, seed=0)
sim = Simulation(cfg)

print("grid100, seed 0, risk-aware policy. Sources this seed:")
for s in sim.field.sources:
    print(f"  intensity {s.intensity:.2f} at "
          f"({s.position[0]:.1f}, {s.position[1]:.1f})")

for checkpoint in (25, 100, 250, 500):
    while sim.step_no < checkpoint:
        sim.step()
    row = sim.metrics.rows[-1]
    print(f"step {row.step:3d}: delivered={row.items_at_base:4d} "
          f"in swarm={row.items_on_agents:3d} "
          f"reliability={row.reliability_cum:.4f} "
          f"memory={row.mean_memory_pct:.2f}%")

m = sim.metrics
hops = [d.hops for d in m.deliveries]
steps = [d.delivered_step - d.created_step for d in m.deliveries]
print(f"\ngenerated {m.generated}, delivered {m.delivered}, "
      f"corrupted {m.corrupted}, dropped {m.dropped}")
print(f"transfer speed: {np.mean(hops):.2f} hops / {np.mean(steps):.2f} steps "
      f"on average (longest route: {max(hops)} hops)")

longest = max(m.deliveries, key=lambda d: d.hops)
print(f"the most travelled datum came from agent {longest.creator} and "
      f"visited {len(longest.route)} holders:\n  {longest.route}")
