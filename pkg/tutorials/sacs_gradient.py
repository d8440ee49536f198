"""Self-advertising content sources: how the label radius changes search success.

Content sources flood hop-count labels out to ``sacs_radius`` hops; k-random-walk
queries then descend the labels instead of wandering. Run with ``python3 sacs_gradient.py``.
"""
import numpy as np

from abmbench.sacs import SacsModel, SacsParams, build_field

# a five-device line with the content source at the right end
line = build_field(SacsParams(width=20, height=20, n_gw=0, n_cs=0, n_srchs=0, sacs_radius=3),
                   [(2, 5), (3.5, 5), (5, 5), (6.5, 5), (8, 5)], goals=[4])
print("labels along the line:", line.globals["devices"].sacs_distance.tolist())

for radius in (0, 5, 10):
    succ, hops = [], []
    for seed in range(10):
        m = SacsModel(SacsParams(sacs_radius=radius), seed)
        while not m.finished():
            m.go()
        succ.append(m.reporters["nsucc"]())
        hops.append(m.reporters["nhop"]())
    print(f"radius {radius:2d}: mean successes {np.mean(succ):6.1f}, mean hops {np.mean(hops):7.1f}")
