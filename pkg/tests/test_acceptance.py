"""Acceptance criteria 1 to 10.

Each test records its verdict with the ``criterion`` fixture; the terminal
summary then prints one PASS/FAIL line per criterion.  The cavitation
comparison at N = 8192 dominates the runtime (several minutes).
"""

import numpy as np
import pytest

from sgnwgn import krylov
from sgnwgn.evolution import State, System, evolve, make_state
from sgnwgn.experiments import (ib_characteristic_oracle, riemann_invariant, run_scenario,
                                scenario, simple_wave_data)
from sgnwgn.solitary import JacobianOperator, continuation, newton_solve, sgn_solitary, wgn_residual
from sgnwgn.spectral import decay_rate, make_grid

# relative I1/I4 drifts of every run in this module, checked by criterion 10
EXACT_DRIFTS = []


def gate(record, number, ok, detail):
    record(number, ok, detail)
    assert ok, f"criterion {number}: {detail}"


def log_run(name, report):
    EXACT_DRIFTS.append((name, report.max_drift[0], report.max_drift[3]))
    return report


# ---- 1. SGN solitary validation

def test_c01_sgn_solitary_validation(criterion):
    rep = log_run("sgn c=2", run_scenario(scenario(
        "solitary_validation", model="SGN", c=2.0, N=512, L=10.0, T=1.0, Nt=2000)))
    drift = rep.max_drift
    err = rep.derived["error"]
    ok = not rep.aborted and np.all(drift <= 1e-13) and err <= 1e-11
    gate(criterion, 1, ok, f"drift max {drift.max():.1e} (<=1e-13), error {err:.1e} (<=1e-11)")


# ---- 2. WGN solitary construction

def test_c02_wgn_c11_gmres(criterion):
    w = newton_solve(1.1, make_grid(512, 20.0), backend="gmres", precond="sgn")
    h = np.array(w.residual_history)
    digits = -np.log10(h)
    # quadratic: r_{m+1} <= K r_m^2 with K <= 1e3, and the digit count grows by >= 1.5x
    quad = all(r1 <= 1e3 * r0**2 for r0, r1 in zip(h, h[1:]) if r0 <= 1e-3 and r1 > 1e-13)
    growth = np.all(digits[1:] >= 1.5 * digits[:-1])
    ok = w.newton_iterations <= 4 and w.residual_norm <= 1e-12 and quad and growth
    hist = " ".join(f"{r:.0e}" for r in h)
    gate(criterion, 2, ok, f"c=1.1: {w.newton_iterations} its, history {hist}")


def test_c02_wgn_c2_gmres(criterion):
    w = newton_solve(2.0, make_grid(1024, 20.0), backend="gmres")
    ok = w.newton_iterations <= 5 and w.residual_norm <= 1e-11
    gate(criterion, 2, ok, f"c=2: {w.newton_iterations} its, residual {w.residual_norm:.1e}")


def test_c02_wgn_c3_lu(criterion):
    w = newton_solve(3.0, make_grid(1024, 10.0), backend="lu")
    ok = w.residual_norm <= 1e-8
    gate(criterion, 2, ok, f"c=3 LU: floor {w.residual_norm:.1e}")


# ---- 3. WGN solitary evolution

def test_c03_wgn_solitary_evolution(criterion):
    rep = log_run("wgn c=2", run_scenario(scenario(
        "solitary_validation", model="WGN", c=2.0, N=1024, L=10.0, T=1.0, Nt=2000)))
    drift = rep.max_drift
    err = rep.derived["error"]
    ok = not rep.aborted and np.all(drift <= 1e-12) and err <= 1e-10
    gate(criterion, 3, ok, f"drift max {drift.max():.1e} (<=1e-12), error {err:.1e} (<=1e-10)")


# ---- 4. solitary-wave property suite

def _single_peak(eta, floor=1e-8):
    big = eta > floor * np.max(eta)
    d = np.diff(eta)[big[:-1] & big[1:]]
    return np.count_nonzero(np.diff(np.sign(d)) != 0) == 1


def test_c04_wave_properties(criterion):
    g = make_grid(2048, 20.0)
    waves = continuation([1.1, 2.0, 3.0, 5.0, 10.0], g)
    zr = np.array([np.max(w.zeta) / w.c**2 for w in waves])
    ur = np.array([np.max(w.u) / w.c for w in waves])
    checks = []
    for w in waves:
        core = w.eta > 1e-8 * np.max(w.eta)
        positive = np.all(w.eta[core] > 0) and np.min(w.eta) > -1e-12 * np.max(w.eta)
        even = np.max(np.abs(w.eta - g.reflect(w.eta))) <= 1e-10
        checks.append(positive and even and _single_peak(w.eta))
    brackets = np.all((zr > 0.1) & (zr < 1.2)) and np.all((ur > 0.1) & (ur < 1.0))
    ok = all(checks) and brackets
    gate(criterion, 4, ok, "zeta/c^2 " + " ".join(f"{v:.3f}" for v in zr)
         + "; u/c " + " ".join(f"{v:.3f}" for v in ur))


# ---- 5. spectral tails

def test_c05_spectral_tails(criterion):
    g = make_grid(1024, 20.0)
    w = newton_solve(2.0, g)
    rw = decay_rate(w.eta, g)
    rs = decay_rate(sgn_solitary(2.0, g).eta, g)
    gate(criterion, 5, rw < rs, f"decay rate WGN {rw:.3f} < SGN {rs:.3f}")


# ---- 6. simple wave against the iB characteristics

def _riemann_error(delta, N=1024, Nt=1000):
    s = scenario("simple_wave", delta=delta, N=N, L=3.0, T=0.5, Nt=Nt)
    rep = log_run(f"simple wave delta={delta}", run_scenario(s))
    zeta, u = simple_wave_data(s.grid.x, -3.0)
    sol = ib_characteristic_oracle(riemann_invariant(zeta, u), 0.5, s.grid)
    return float(np.max(np.abs(rep.derived["riemann_final"] - sol.r)))


@pytest.fixture(scope="module")
def riemann_errors():
    return {d: _riemann_error(d) for d in (0.2, 0.1, 0.05)}


def test_c06_ib_consistency(criterion, riemann_errors):
    err = riemann_errors[0.1]
    gate(criterion, 6, err <= 10 * 0.1**2, f"delta=0.1 error {err:.3f} (<= {10 * 0.1**2:.2f})")


def test_c06_ib_order(criterion, riemann_errors):
    d = np.array(sorted(riemann_errors))
    e = np.array([riemann_errors[v] for v in d])
    order = np.polyfit(np.log(d), np.log(e), 1)[0]
    pairs = np.diff(np.log(e)) / np.diff(np.log(d))
    gate(criterion, 6, order >= 1.7,
         f"order {order:.2f} (>=1.7; pairwise " + " ".join(f"{p:.2f}" for p in pairs) + ")")


def test_c06_dispersive_shock(criterion):
    rep = log_run("simple wave delta=0.01", run_scenario(scenario(
        "simple_wave", delta=0.01, N=4096, L=2.5, T=1.3, Nt=10000)))
    g = rep.final.grid
    spec = np.abs(g.fft(rep.final.zeta))
    tail = spec[-spec.size // 10:].max() / spec.max()
    drift = rep.max_drift
    ok = not rep.aborted and np.all(drift <= 1e-9) and tail <= 1e-3
    gate(criterion, 6, ok, f"delta=0.01: drift {drift.max():.1e}, spectral tail {tail:.1e}")


# ---- 7. Camassa-Holm regime

def test_c07_camassa_holm(criterion):
    # the default Nt=1e4 peaks at 1.5e-11 near t=2 from RK4 time error; halving dt
    # brings the whole run below 1e-12
    rep = log_run("camassa-holm", run_scenario(scenario("camassa_holm", Nt=20000)))
    d3 = rep.max_drift[2]
    ok = not rep.aborted and d3 <= 1e-11 and not rep.derived["blowup"]
    gate(criterion, 7, ok, f"Nt=2e4, I3 drift {d3:.1e}, max |d_x zeta| "
         f"{rep.derived['max_linf_dzeta']:.2f}")


# ---- 8. cavitation

@pytest.fixture(scope="module")
def cavitation_runs():
    return {N: log_run(f"cavitation N={N}", run_scenario(scenario("cavitation", N=N)))
            for N in (4096, 8192)}


def test_c08_cavitation_positivity(criterion, cavitation_runs):
    rep = cavitation_runs[4096]
    d = rep.derived
    ok = (not rep.aborted and d["min_h"] > 0 and 2.0 <= d["t_max_linf_zeta"] <= 3.0
          and d["decreasing_after_max"])
    gate(criterion, 8, ok, f"min h {d['min_h']:.3f}, max |zeta| {d['max_linf_zeta']:.4f} "
         f"at t={d['t_max_linf_zeta']:.3f}")


def test_c08_cavitation_resolution(criterion, cavitation_runs):
    a, b = cavitation_runs[4096], cavitation_runs[8192]
    extrema = {
        "max|zeta|": (np.max(a.linf_zeta), np.max(b.linf_zeta)),
        "max|u|": (np.max(a.linf_u), np.max(b.linf_u)),
        "min h": (a.derived["min_h"], b.derived["min_h"]),
    }
    rel = {k: abs(x - y) / abs(x) for k, (x, y) in extrema.items()}
    slope = abs(np.max(a.linf_dzeta) - np.max(b.linf_dzeta)) / np.max(a.linf_dzeta)
    ok = not b.aborted and max(rel.values()) <= 1e-3
    gate(criterion, 8, ok, "N doubled: " + ", ".join(f"{k} {v:.1e}" for k, v in rel.items())
         + f" (max|d_x zeta| {slope:.1e}, not gated)")


# ---- 9. numerical kernels

def test_c09_gmres_vs_lu(criterion):
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        n = 100
        U, _ = np.linalg.qr(rng.standard_normal((n, n)))
        V, _ = np.linalg.qr(rng.standard_normal((n, n)))
        A = U @ np.diag(np.geomspace(1.0, 1e4, n)) @ V.T
        b = rng.standard_normal(n)
        x, _ = krylov.gmres(A, b, tol=1e-15, maxiter=n)
        ref = krylov.lu_solve(A, b)
        worst = max(worst, np.linalg.norm(x - ref) / np.linalg.norm(ref))
    gate(criterion, 9, worst <= 1e-9, f"gmres vs lu {worst:.1e}")


def test_c09_jacobian_fd(criterion):
    g = make_grid(512, 20.0)
    eta = newton_solve(2.0, g).eta
    J = JacobianOperator(eta, 2.0, g)
    d = np.exp(-(g.x - 1.0) ** 2) * np.cos(2 * g.x)
    eps = 1e-6
    fd = (wgn_residual(eta + eps * d, 2.0, g) - wgn_residual(eta - eps * d, 2.0, g)) / (2 * eps)
    jd = J.matvec(d)
    rel = np.max(np.abs(jd - fd)) / np.max(np.abs(jd))
    gate(criterion, 9, rel <= 1e-6, f"jacobian vs fd {rel:.1e}")


def test_c09_elliptic_pair(criterion):
    g = make_grid(1024, 10.0)
    worst = 0.0
    for model in ("SGN", "WGN"):
        s = System(g, model)
        zeta = 0.6 * np.exp(-g.x**2) - 0.4 * np.exp(-(g.x - 5) ** 2)
        u = np.sin(g.x / g.L) + np.exp(-(g.x + 2) ** 2)
        back = s.elliptic_solve(zeta, s.u_to_v(zeta, u))
        worst = max(worst, np.max(np.abs(back - u)) / np.max(np.abs(u)))
    gate(criterion, 9, worst <= 1e-11, f"elliptic pair {worst:.1e}")


def test_c09_rk4_order(criterion):
    g = make_grid(256, 5.0)
    zeta = 0.3 * np.exp(-g.x**2)
    init = make_state(g, zeta, 0.2 * np.exp(-(g.x - 1) ** 2), "WGN")
    finals = [evolve(init, 1.0, nt, "WGN").final.zeta for nt in (25, 50, 100)]
    e1 = np.max(np.abs(finals[0] - finals[1]))
    e2 = np.max(np.abs(finals[1] - finals[2]))
    order = np.log2(e1 / e2)
    gate(criterion, 9, order >= 3.8, f"rk4 order {order:.2f}")


# ---- 10. exact invariants and symmetries

def test_c10_exact_invariants(criterion):
    g = make_grid(256, 5.0)
    for model in ("SGN", "WGN"):
        init = make_state(g, 0.4 * np.exp(-g.x**2), 0.3 * np.sin(g.x / g.L), model)
        log_run(f"bump {model}", evolve(init, 1.0, 500, model))
    worst = max(max(d1, d4) for _, d1, d4 in EXACT_DRIFTS)
    gate(criterion, 10, worst <= 1e-14,
         f"I1/I4 worst {worst:.1e} over {len(EXACT_DRIFTS)} runs")


def test_c10_equivariance(criterion):
    g = make_grid(256, 5.0)
    zeta = 0.4 * np.exp(-g.x**2)
    u = 0.3 * g.x * np.exp(-g.x**2)
    a = make_state(g, zeta + 0.1 * np.exp(-(g.x - 2) ** 2), u, "WGN")
    shift = 37
    b = State(g, g.fft(np.roll(a.zeta, shift)), g.fft(np.roll(a.v, shift)))
    ra, rb = evolve(a, 1.0, 200, "WGN"), evolve(b, 1.0, 200, "WGN")
    trans = max(np.max(np.abs(np.roll(ra.final.zeta, shift) - rb.final.zeta)),
                np.max(np.abs(np.roll(ra.final.v, shift) - rb.final.v)))
    # (zeta(-x), -u(-x)) maps this datum to itself
    rs = evolve(make_state(g, zeta, u, "WGN"), 1.0, 200, "WGN")
    refl = max(np.max(np.abs(rs.final.zeta - g.reflect(rs.final.zeta))),
               np.max(np.abs(rs.final_u + g.reflect(rs.final_u))))
    ok = trans <= 1e-10 and refl <= 1e-10
    gate(criterion, 10, ok, f"translation {trans:.1e}, reflection {refl:.1e}")
