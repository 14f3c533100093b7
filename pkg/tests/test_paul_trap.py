import math

import numpy as np
import pytest
from scipy.integrate import odeint

from ionsim import paul_trap
from ionsim.constants import E_CHARGE, YB171_MASS_KG
from ionsim.errors import PreconditionError
from ionsim.paul_trap import TrapConfig

OMEGA = 2 * math.pi * 8e6
# max |closed form - integrator| / x0 over 3 secular periods at eps = 0.040,
# frozen from an independent LSODA run (rtol 1e-11, drive-phase units)
FROZEN_DEV_EPS004 = 0.02403


def floquet_secular_omega(eps: float, omega: float) -> float:
    """Exact secular angular frequency from the one-period monodromy matrix.

    Works in drive phase tau = omega t, where x'' = -eps cos(tau) x.
    """
    def rhs(y, tau):
        return [y[1], -eps * math.cos(tau) * y[0]]

    ts = [0.0, 2 * math.pi]
    a = odeint(rhs, [1.0, 0.0], ts, rtol=1e-12, atol=1e-14, mxstep=100_000)[-1]
    b = odeint(rhs, [0.0, 1.0], ts, rtol=1e-12, atol=1e-14, mxstep=100_000)[-1]
    half_trace = 0.5 * (a[0] + b[1])
    return math.acos(half_trace) / (2 * math.pi) * omega


def test_secular_period_at_derived_epsilon():
    cfg = TrapConfig.from_secular_period(4.42e-6, OMEGA)
    assert cfg.epsilon == pytest.approx(0.040, rel=0.01)
    assert paul_trap.secular_period(TrapConfig(0.040, OMEGA)) == pytest.approx(4.42e-6, rel=0.01)


@pytest.mark.parametrize("eps", [0.01, 0.04, 0.1])
def test_secular_frequency_against_floquet(eps):
    exact = floquet_secular_omega(eps, OMEGA)
    approx = paul_trap.secular_frequency(TrapConfig(eps, OMEGA))
    # leading correction is O(eps^2)
    assert approx == pytest.approx(exact, rel=max(2 * eps**2, 1e-3))


def test_closed_form_matches_oracle_within_five_percent():
    cfg = TrapConfig(0.040, OMEGA)
    traj, dev = paul_trap.oracle_deviation(cfg, 3.0)
    worst = np.max(np.abs(dev)) / cfg.x0
    assert worst <= 0.05
    assert worst == pytest.approx(FROZEN_DEV_EPS004, rel=0.05)
    assert traj.times[-1] == pytest.approx(3 * paul_trap.secular_period(cfg))


def test_independent_integrator_agrees():
    cfg = TrapConfig(0.040, OMEGA)
    traj, _ = paul_trap.oracle_deviation(cfg, 1.0, samples=501)
    y0 = [paul_trap.closed_form_position(cfg, 0.0), paul_trap.closed_form_velocity(cfg, 0.0)]
    ref = odeint(lambda y, t: [y[1], -cfg.epsilon * OMEGA**2 * math.cos(OMEGA * t) * y[0]],
                 y0, traj.times, rtol=1e-11, atol=1e-20, hmax=2 * math.pi / (50 * OMEGA))
    assert np.max(np.abs(ref[:, 0] - traj.positions)) <= 1e-6 * cfg.x0


def test_deviation_shrinks_with_epsilon():
    devs = [np.max(np.abs(paul_trap.oracle_deviation(TrapConfig(e, OMEGA), 3.0, 2001)[1]))
            for e in (0.04, 0.02, 0.01)]
    assert devs[0] > devs[1] > devs[2]


def test_micromotion_ripple_is_epsilon():
    cfg = TrapConfig(0.040, OMEGA)
    T = 2 * math.pi / OMEGA
    traj = paul_trap.integrate_equation_of_motion(
        cfg, paul_trap.closed_form_position(cfg, 0.0), paul_trap.closed_form_velocity(cfg, 0.0),
        T, samples=401)
    ripple = (traj.positions.max() - traj.positions.min()) / 2 / cfg.x0
    assert ripple == pytest.approx(cfg.epsilon, rel=0.2)


def test_zero_epsilon_is_static():
    cfg = TrapConfig(0.0, OMEGA, x0=2e-6, theta0=0.3)
    t = np.linspace(0, 1e-5, 11)
    assert np.allclose(paul_trap.closed_form_position(cfg, t), 2e-6 * math.cos(0.3), rtol=0, atol=1e-20)
    assert paul_trap.secular_period(cfg) == math.inf


def test_from_lab():
    cfg = TrapConfig.from_lab(v0=100.0, mass=YB171_MASS_KG, r0=1e-3, omega=OMEGA)
    assert cfg.epsilon == pytest.approx(E_CHARGE * 100.0 / (OMEGA**2 * YB171_MASS_KG * 1e-6), rel=1e-15)


def test_preconditions():
    with pytest.raises(PreconditionError):
        TrapConfig(0.5, OMEGA)
    with pytest.raises(PreconditionError):
        TrapConfig(-0.01, OMEGA)
    with pytest.raises(PreconditionError):
        TrapConfig(0.04, 0.0)
    cfg = TrapConfig(0.04, OMEGA)
    with pytest.raises(PreconditionError):
        paul_trap.integrate_equation_of_motion(cfg, 1e-6, 0.0, 1e-6, dt_max=1.0)
    with pytest.raises(PreconditionError):
        paul_trap.integrate_equation_of_motion(cfg, 1e-6, 0.0, 1e-6, rtol=1e-6)
    with pytest.raises(PreconditionError):
        paul_trap.integrate_equation_of_motion(cfg, 1e-6, 0.0, -1.0)


def test_xy_phase_and_csv():
    cfg = TrapConfig(0.04, OMEGA)
    x, y = paul_trap.trajectory_xy(cfg, math.pi / 2, 1e-5, 5)
    assert y.positions[0] == pytest.approx(0.0, abs=1e-20)
    text = paul_trap.to_csv(x, y, np.zeros(5))
    lines = text.splitlines()
    assert lines[0] == "t_s,x_m,y_m,deviation_m" and len(lines) == 6


def test_axial_has_no_ripple():
    t = np.linspace(0, 1, 5)
    assert np.allclose(paul_trap.axial_position(2 * math.pi, 1.0, t), np.cos(2 * math.pi * t))
