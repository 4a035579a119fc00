"""Weak dispersion: the simple wave and its inviscid Burgers limit.

A Gaussian hump with the right-moving Riemann velocity is a simple wave of
the shallow-water equations: its invariant r = u + 2 sqrt(1 + zeta) - 2 is
transported by r_t + (1 + 3r/4) r_x = 0 until the profile breaks.  With
dispersion of strength delta the SGN solution follows that transport up to
O(delta^2) before breaking, and afterwards forms a dispersive shock.

Run:  python demos/simple_wave.py
"""

import numpy as np

from sgnwgn.experiments import (ib_characteristic_oracle, ib_shock_time, riemann_invariant,
                                run_scenario, scenario, simple_wave_data)

t = 0.5
errors = {}
for delta in (0.2, 0.1, 0.05):
    s = scenario("simple_wave", delta=delta, N=1024, L=3.0, T=t, Nt=1000)
    report = run_scenario(s)
    zeta0, u0 = simple_wave_data(s.grid.x, -3.0)
    r0 = riemann_invariant(zeta0, u0)
    oracle = ib_characteristic_oracle(r0, t, s.grid)
    errors[delta] = np.max(np.abs(report.derived["riemann_final"] - oracle.r))
    print(f"delta={delta:<5} |r - r_iB| = {errors[delta]:.4f}   "
          f"(/delta^2 = {errors[delta] / delta**2:.2f})")
print(f"breaking time of the datum: {ib_shock_time(r0, s.grid):.4f}")

# The ratio error/delta^2 still grows as delta shrinks: at these values the
# correction beyond delta^2 is not yet negligible, so the observed order is
# below two.  Smaller delta needs finer grids but shows the ratio leveling off.
d = np.array(sorted(errors))
print("fitted order:", np.polyfit(np.log(d), np.log([errors[v] for v in d]), 1)[0])
