"""p-variation estimators and the matching of curve clocks.

For nu = 3/4 curves the natural exponent is p = 1/nu = 4/3.  Three
estimators of the p-variation over [0,1]:

  var      uniform partition of the curve's own parameter
  var_no   parameterization-free: count first-exit chords of length dt^nu
  var_cap  uniform partition of the capacity clock, normalized so the
           whole curve spans [0, horizon]

Each converges as dt -> 0 to a constant; the estimates at different dt
form CDF families whose common crossing estimates that constant.  The
crossing points differ between clocks - that difference is exactly why
clock matching matters when comparing SAW to SLE.

Run time: about two minutes (small-scale: expect values near, not equal
to, their large-scale limits).
"""

import numpy as np

import sawsle

NU, P = 0.75, 4 / 3
rng = np.random.default_rng(11)

print("== exact identity at lattice resolution ==")
chain = sawsle.PivotChain(sawsle.init_walk(3000), rng)
chain.equilibrate()
curve = sawsle.scaled_path(chain.walk, 3000, NU)
v = sawsle.var_p_uniform(curve, P, 1 / 3000, 1.0)
print(f"var at dt = 1/n': {v.value:.15f} (every chord is one lattice step)")

print()
print("== the three estimators on one walk ==")
total, profile = sawsle.zip_curve(curve)
for dt in (0.02, 0.04, 0.08):
    a = sawsle.var_p_uniform(curve, P, dt, 1.0).value
    b = sawsle.var_no(curve, dt, NU, 1.0).value
    c = sawsle.var_cap(curve, profile, dt, P, 1.0).value
    print(f"  dt={dt:4.2f}:  var={a:.3f}  var_no={b:.3f}  var_cap={c:.3f}")

print()
print("== CDF crossings over an ensemble (n' = 3000, 800 samples) ==")
dts = (0.02, 0.04, 0.08)
values = {dt: [] for dt in dts}
values_no = {dt: [] for dt in dts}


def observe(walk):
    c = sawsle.scaled_path(walk, 3000, NU)
    for dt in dts:
        values[dt].append(sawsle.var_p_uniform(c, P, dt, 1.0).value)
        values_no[dt].append(sawsle.var_no(c, dt, NU, 1.0).value)


chain.run(40_000, 50, observe)
for label, vals in (("var", values), ("var_no", values_no)):
    cdfs = [(dt, sawsle.ecdf(vals[dt])) for dt in dts]
    est, spread = sawsle.intersection_estimate(cdfs)
    print(f"  {label:7s} crossing estimate: {est:.3f} (spread {spread:.3f})")
print("at full scale (n' = 10^5, dt <= 0.04) these sharpen to ~0.99 and "
      "~0.97, with var_cap near 0.92")

print()
print("== variance shrinks linearly with dt ==")
groups = {dt: np.array(vals) for dt, vals in values.items()}
table, slope = sawsle.variance_vs_dt(groups)
for dt, var in table:
    print(f"  dt={dt:4.2f}: Var[var] = {var:.5f}")
print(f"log-log slope: {slope:.2f} (theory: 1)")
