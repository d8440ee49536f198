"""Toggle test for the forest-fire danger invariant.

With the ignition gate on, fires only start where the Fire Weather Index is High or
worse, so "burning implies high danger" holds. Turning the gate off under wet weather
must produce violations. Run with ``python3 wildfire_toggle.py``.
"""
from abmbench.wildfire import FireParams, ForestFireModel, classify_danger, fire_danger_invariant, fwi, isi
from abmbench.vomas import toggle_test

r = isi(88.0, 20.0)
print(f"ISI {r:.2f}, FWI {fwi(r, 40.0):.2f}, class {classify_danger(fwi(r, 40.0)).label}")

wet = dict(t_ave=5.0, h_ave=50.0, p_fire=50.0, p_cov=65.0)
report = toggle_test(lambda gate, seed: ForestFireModel(FireParams(**wet, ignition_gate=gate), seed),
                     fire_danger_invariant(), True, False, reps=5, stop_tick=120)
print(report.to_text())
