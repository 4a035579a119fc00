import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from sgnwgn.errors import ParameterError
from sgnwgn.evolution import System
from sgnwgn.experiments import (DEFAULTS, Scenario, TrigInterpolant, camassa_holm_data,
                                cavitation_data, fit_solitary, ib_characteristic_oracle,
                                ib_shock_time, ic_camassa_holm, ic_cavitation,
                                ic_perturbed_solitary, ic_simple_wave, riemann_invariant,
                                run_scenario, scenario, settling_statistics, simple_wave_data,
                                solitary_wave, translate)
from sgnwgn.solitary import sgn_solitary
from sgnwgn.spectral import dx, make_grid


# ---- scenarios

def test_defaults_are_resolved_and_validated():
    s = scenario("cavitation")
    assert s.params["N"] == 4096 and s.params["dealias"] is True
    assert s.params["precond"] == "scaled"
    assert scenario("simple_wave", N="256", dealias="yes").params["N"] == 256
    assert set(DEFAULTS) == {"solitary_validation", "perturbed_solitary", "simple_wave",
                             "camassa_holm", "cavitation"}


@pytest.mark.parametrize("name, params", [
    ("nope", {}),
    ("cavitation", {"c": 2.0}),
    ("simple_wave", {"N": 7}),
    ("simple_wave", {"N": "2.5"}),
    ("simple_wave", {"dealias": "maybe"}),
    ("perturbed_solitary", {"c": 0.9}),
    ("perturbed_solitary", {"mode": "twist"}),
    ("camassa_holm", {"delta": 1.0}),
    ("cavitation", {"Nt": 10, "T": 0.0}),
])
def test_invalid_scenarios(name, params):
    with pytest.raises(ParameterError):
        Scenario(name, params)


def test_snapshot_time_parsing():
    assert scenario("simple_wave", snapshots="0, 0.5 1").snapshot_times == [0.0, 0.5, 1.0]
    assert scenario("simple_wave").snapshot_times == []


@pytest.mark.parametrize("name", ["solitary_validation", "simple_wave", "camassa_holm",
                                  "cavitation"])
def test_zero_steps_give_initial_record_only(name):
    rep = run_scenario(scenario(name, N=256, Nt=0))
    assert len(rep.times) == 1 and not rep.aborted
    assert rep.manifest["scenario"] == name


def test_run_scenario_rejects_plain_dicts():
    with pytest.raises(ParameterError):
        run_scenario({"name": "cavitation"})


def test_failed_wave_construction_gives_aborted_report():
    rep = run_scenario(scenario("solitary_validation", model="WGN", c=20.0, N=128, Nt=10))
    assert rep.aborted and rep.times == []


# ---- initial data

def test_unperturbed_wave_for_unit_lambda():
    g = make_grid(256, 10.0)
    w = sgn_solitary(2.0, g)
    s = ic_perturbed_solitary(2.0, g, "scale_u", 1.0, model="SGN")
    assert np.max(np.abs(s.zeta - w.zeta)) < 1e-13
    system = System(g, "SGN")
    assert np.max(np.abs(system.elliptic_solve(s.zeta, s.v) - w.u)) < 1e-11


@pytest.mark.parametrize("mode", ["scale_u", "scale_zeta", "gauss_u", "gauss_zeta"])
def test_perturbation_touches_one_field(mode):
    g = make_grid(256, 10.0)
    w = sgn_solitary(2.0, g)
    s = ic_perturbed_solitary(2.0, g, mode, lam=0.99, a=0.01, model="SGN", wave=w)
    u = System(g, "SGN").elliptic_solve(s.zeta, s.v)
    dz = np.max(np.abs(s.zeta - w.zeta))
    du = np.max(np.abs(u - w.u))
    if mode.endswith("zeta"):
        assert dz > 1e-3 and du < 1e-11
    else:
        assert du > 1e-3 and dz < 1e-13


def test_shifted_wave_is_centered_at_minus_shift():
    g = make_grid(512, 20.0)
    s = ic_perturbed_solitary(2.0, g, "gauss_u", a=0.1, model="SGN", shift=40.0)
    assert g.x[np.argmax(s.zeta)] == pytest.approx(-40.0, abs=g.dx)


def test_wgn_base_wave_uses_newton():
    g = make_grid(512, 10.0)
    w = solitary_wave(2.0, g, "WGN")
    assert w.model == "WGN" and w.residual_norm < 1e-11
    with pytest.raises(ParameterError):
        solitary_wave(2.0, g, type("M", (), {"kind": "WGN", "delta": 0.5})())


def test_simple_wave_data():
    g = make_grid(256, 3.0)
    s = ic_simple_wave(-3.0, 0.1, g)
    zeta, u = simple_wave_data(g.x)
    assert np.allclose(s.zeta, zeta, atol=1e-14)
    assert np.allclose(riemann_invariant(zeta, 0 * u), 2 * np.sqrt(1 + zeta) - 2)
    # the left-moving invariant of the datum vanishes identically
    assert np.allclose(u - 2 * np.sqrt(1 + zeta) + 2, 0, atol=1e-15)
    rest = ic_simple_wave(-3.0, 0.1, g, amplitude=0.0)
    assert np.all(rest.zeta == 0) and np.all(rest.v == 0)


def test_camassa_holm_data_limits():
    g = make_grid(256, 5.0)
    w = -g.x * np.exp(-g.x**2)
    zeta, u = camassa_holm_data(g, 0.0)
    assert np.allclose(u, w, atol=1e-15)
    assert np.allclose(zeta, w + 0.25 * w**2, atol=1e-15)
    zeta, u = camassa_holm_data(g, math.sqrt(0.1))
    # w and w'' vanish at the origin, so does u
    assert abs(u[g.N // 2 - 1]) < 1e-14
    with pytest.raises(ParameterError):
        ic_camassa_holm(1.0, g)


def test_cavitation_data():
    g = make_grid(256, 2.5)
    zeta, u = cavitation_data(g.x)
    assert np.min(1 + zeta) == pytest.approx(0.1, abs=1e-14)
    s = ic_cavitation(g)
    assert np.min(s.h) == pytest.approx(0.1, abs=1e-4)


# ---- characteristics oracle

def test_trig_interpolant_reproduces_samples_and_derivative():
    g = make_grid(64, 2.0)
    f = np.exp(np.sin(g.x / g.L))
    p = TrigInterpolant(g, f)
    assert np.allclose(p(g.x), f, atol=1e-13)
    xq = np.linspace(-5, 5, 37)
    assert np.allclose(p(xq), np.exp(np.sin(xq / g.L)), atol=1e-12)
    assert np.allclose(p.derivative(g.x), dx(f, g), atol=1e-12)


def test_constant_datum_never_breaks():
    g = make_grid(64, 2.0)
    sol = ib_characteristic_oracle(np.full(64, 0.3), 5.0, g)
    assert sol.shock_time == math.inf and not sol.past_shock
    assert np.allclose(sol.r, 0.3, atol=1e-14)


def test_shock_time_against_golden_section():
    g = make_grid(512, 3.0)
    r0 = lambda x: -x * np.exp(-(x**2))  # noqa: E731
    slope = lambda x: (2 * x**2 - 1) * np.exp(-(x**2))  # noqa: E731
    best = minimize_scalar(slope, bracket=(-1.0, 0.1, 1.0), method="golden",
                           options={"xtol": 1e-12})
    expected = -1.0 / (0.75 * best.fun)
    assert expected == pytest.approx(4 / 3, abs=1e-12)
    assert ib_shock_time(r0(g.x), g) == pytest.approx(expected, abs=1e-10)


def test_oracle_past_shock_and_at_zero():
    g = make_grid(256, 3.0)
    r0 = -g.x * np.exp(-(g.x**2))
    assert ib_characteristic_oracle(r0, 2.0, g).past_shock
    assert ib_characteristic_oracle(r0, 2.0, g).r is None
    assert np.allclose(ib_characteristic_oracle(r0, 0.0, g).r, r0, atol=1e-13)


def test_oracle_is_constant_along_characteristics():
    g = make_grid(256, 3.0)
    r0 = lambda x: 0.3 * np.exp(-(x**2))  # noqa: E731
    t = 0.8
    feet = np.linspace(-2, 2, 41)
    x = feet + (1 + 0.75 * r0(feet)) * t
    sol = ib_characteristic_oracle(r0, t, g, x=x)
    assert np.allclose(sol.r, r0(feet), atol=1e-12)


def test_small_delta_sgn_follows_the_oracle():
    s = scenario("simple_wave", delta=0.2, N=512, T=0.5, Nt=500)
    rep = run_scenario(s)
    g = s.grid
    zeta, u = simple_wave_data(g.x, -3.0)
    sol = ib_characteristic_oracle(riemann_invariant(zeta, u), 0.5, g)
    err = np.max(np.abs(rep.derived["riemann_final"] - sol.r))
    assert err <= 10 * 0.2**2


def test_perturbed_solitary_settles():
    rep = run_scenario(scenario("perturbed_solitary", c=2.0, lam=0.99))
    st = rep.derived["settling_zeta"]
    assert not rep.aborted and st["settled"]
    amps = st["amplitudes"]
    assert np.max(amps[len(amps) // 2:]) < np.max(amps[:len(amps) // 2])


# ---- diagnostics

def test_settling_statistics_on_damped_signal():
    t = np.linspace(0, 20, 2001)
    y = 1 + np.exp(-t / 2) * np.sin(8 * t)
    st = settling_statistics(t, y)
    assert st["settled"] and st["transient"] > 1
    assert np.all(np.diff(st["amplitudes"]) <= 1e-12)
    noisy = settling_statistics(t, np.sin(8 * t))
    assert not noisy["settled"]
    with pytest.raises(ParameterError):
        settling_statistics([0.0], [1.0])


def test_fit_solitary_recovers_velocity():
    g = make_grid(1024, 20.0)
    w = sgn_solitary(2.5, g)
    zeta = translate(w.zeta, g, 7.3)
    c, x0, misfit = fit_solitary(g.x, zeta, width=10.0)
    assert c == pytest.approx(2.5, rel=1e-8)
    assert x0 == pytest.approx(7.3, abs=1e-8)
    assert misfit < 1e-8
    bump = 0.5 * np.exp(-(g.x**2))
    assert fit_solitary(g.x, bump, width=5.0)[2] > 1e-2


def test_translate_is_spectral_shift():
    g = make_grid(128, 4.0)
    f = np.exp(-(g.x**2))
    assert np.allclose(translate(f, g, 1.5), np.exp(-((g.x - 1.5) ** 2)), atol=1e-13)
    assert np.allclose(translate(f, g, 2 * g.dx), np.roll(f, 2), atol=1e-14)
