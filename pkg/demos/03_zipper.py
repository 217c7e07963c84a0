"""Half-plane capacity by unzipping curves with elementary conformal maps.

The zipper composes one elementary map per curve sample; each map removes
the next piece of the curve from the half plane and contributes an
explicit capacity increment.  Total capacity is the sum (capacities are
additive under composition).

Run time: about a minute (the SLE round trip dominates).
"""

import numpy as np

import sawsle

print("== closed forms ==")
L = 1.2
_, caps = sawsle.zip_points(1j * np.linspace(0, L, 200), kind="segment")
print(f"vertical slit of height {L}: capacity {caps.sum():.8f} "
      f"(exact {L * L / 2})")

theta = np.linspace(np.pi, 0.01, 1500)
semi = 1 + np.exp(1j * theta)
semi[0] = 0.0
_, caps = sawsle.zip_points(semi)
print(f"unit semicircle (encloses a half-disk): capacity {caps.sum():.6f} "
      "(exact 1)")

_, caps_r = sawsle.zip_points(2.5 * semi)
print(f"same curve scaled by 2.5: capacity {caps_r.sum():.6f} "
      f"(r^2 law gives {2.5 ** 2 * caps.sum():.6f})")

print()
print("== round trip on an SLE trace ==")
# the SLE clock is capacity: unzipping the trace must recover hcap = 2t.
# A rough random curve cannot be unzipped much below the scale of its
# closest self-approaches (the composed map's derivatives overflow), so
# the resolution is capped with chord_spacing; the capacity estimate is
# stable under that decimation.
rng = np.random.default_rng(3)
trace = sawsle.sample_trace(8 / 3, 4000, 1.0, rng)
curve = trace.as_curve()
scale = np.abs(curve.points).max()
total, profile = sawsle.zip_curve(curve, drop_touching=True,
                                  chord_spacing=0.01 * scale,
                                  min_spacing=0.01 * scale)
print(f"total capacity {total:.4f} (exact 2.0)")
for t in (0.25, 0.5, 1.0):
    h = profile.capacity_at(t)
    print(f"  hcap(gamma[0,{t:4.2f}]) = {h:.4f}   (exact {2 * t:.2f}, "
          f"error {100 * abs(h - 2 * t) / (2 * t):.2f}%)")

print()
print("== capacity profile of a SAW prefix ==")
chain = sawsle.PivotChain(sawsle.init_walk(2000), rng)
chain.equilibrate()
walk_curve = sawsle.scaled_path(chain.walk, 2000, 0.75)
total, profile = sawsle.zip_curve(walk_curve, capacity_budget=0.1)
s1 = profile.time_at_capacity(0.1)
print(f"hcap 0.1 is reached after a fraction {s1:.3f} of the walk "
      "(about a third)")
