"""
Occlusion and changes of scale
==============================

Two more synthetic scenes: a bar that hides the top 40% of the object for
frames 40-55, and an object whose box grows from 40x30 to 80x60.  The box
size is part of the particle state, so the estimate follows the growth.
"""

from bmatrack import TrackerConfig, generate, scenario_preset, track
from bmatrack.io import mean_center_error

frames, truth = generate(scenario_preset("partial-occlusion"))
outs = track(frames, truth[0], TrackerConfig(rng_seed=1))
err, mean = mean_center_error(outs, truth)
print(f"partial occlusion: mean error {mean:.2f} px, worst frame {err.max():.2f} px, "
      f"during occlusion {err[40:56].mean():.2f} px")

frames, truth = generate(scenario_preset("scale-change"))
outs = track(frames, truth[0], TrackerConfig(rng_seed=1))
print("\nframe   true w x h    estimated hx x hy")
for t in range(0, 100, 11):
    s = outs[t].estimate
    print(f"{t:5d}   {truth[t].w:5.1f} x {truth[t].h:4.1f}   {s.hx:5.1f} x {s.hy:4.1f}")
