"""Does the time stepper carry a solitary wave without changing it?

A solitary wave is an exact traveling solution, so after time T the
numerical solution should equal the initial profile shifted by c T.  We
check this for the explicit SGN wave and for a Newton-computed WGN wave,
and watch the four conserved integrals along the way.

Run:  python demos/traveling_check.py
"""

from sgnwgn.experiments import run_scenario, scenario

for model, N in (("SGN", 512), ("WGN", 1024)):
    report = run_scenario(scenario("solitary_validation", model=model, c=2.0, N=N, L=10.0,
                                   T=1.0, Nt=2000))
    d = report.derived
    print(f"{model}: error vs translate {d['error']:.2e}, "
          f"relative drift of I1..I4 " + " ".join(f"{v:.1e}" for v in report.max_drift)
          + f", {report.manifest['gmres_iterations']} GMRES iterations in "
          f"{report.manifest['wall_seconds']:.1f} s")

# I1 and I4 are integrals of perfect derivatives in the evolution equations,
# so they only move by roundoff.  I2 and I3 are conserved by the continuous
# system; their drift measures the time discretization and the elliptic solves.
