"""Boids flying over a grid of binary proximity sensors.

Tracks Sensed S(t) as the flock forms and checks S(t) <= active sensors with an
in-run invariant. Run with ``python3 flocking_sensors.py``.
"""
from abmbench.flocksense import FlockModel, FlockParams, flocksense_invariants
from abmbench.vomas import register

params = FlockParams(n=1000, n_boids=50)
model = FlockModel(params, seed=3)
handles = [register(model.world, inv) for inv in flocksense_invariants(params)]
for tick in range(1, 301):
    model.go()
    if tick in (1, 50, 100, 200, 300):
        print(f"tick {tick:3d}: sensed {model.reporters['sensed']():3d} "
              f"of {model.reporters['active_sensors']()} active")
print("invariant violations:", sum(len(h.violations()) for h in handles))
