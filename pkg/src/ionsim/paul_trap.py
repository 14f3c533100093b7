"""Ion motion in a linear Paul trap.

The radial motion is governed by ``x'' = -eps * Omega^2 * cos(Omega t + drive_phase) * x``,
where ``eps = e V0 / (Omega^2 M r0^2)`` is the only combination of the
physical trap parameters that the dynamics depend on. For small ``eps`` this
is well approximated by

    x(t) = x0 cos(eps Omega t / sqrt(2) + theta0) (1 + eps cos(Omega t))

which is a slow secular oscillation with a small ripple (micromotion) at the
drive frequency. :func:`integrate_equation_of_motion` solves the ODE directly
and serves as the reference for the approximation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ionsim import constants as const
from ionsim.errors import IntegrationError, PreconditionError

EPSILON_MAX = 0.2


@dataclass(frozen=True)
class TrapConfig:
    epsilon: float
    omega: float
    x0: float = 1e-6
    theta0: float = 0.0
    drive_phase: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon < EPSILON_MAX:
            raise PreconditionError(
                f"epsilon={self.epsilon} outside the approximation window [0, {EPSILON_MAX})"
            )
        if not self.omega > 0:
            raise PreconditionError(f"omega must be positive, got {self.omega}")

    @classmethod
    def from_lab(cls, v0: float, mass: float, r0: float, omega: float,
                 charge: float = const.E_CHARGE, **kwargs) -> "TrapConfig":
        """Build from RF amplitude (V), ion mass (kg), electrode distance (m) and drive (rad/s)."""
        eps = charge * v0 / (omega**2 * mass * r0**2)
        return cls(epsilon=eps, omega=omega, **kwargs)

    @classmethod
    def from_secular_period(cls, period: float, omega: float, **kwargs) -> "TrapConfig":
        """Choose ``epsilon`` so that the secular period equals ``period``."""
        eps = math.sqrt(2) * (2 * math.pi / period) / omega
        return cls(epsilon=eps, omega=omega, **kwargs)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    axis: str = "x"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.times.shape != self.positions.shape:
            raise ValueError("times and positions differ in length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("non-finite positions in trajectory")


def secular_frequency(cfg: TrapConfig) -> float:
    """Angular frequency of the secular motion, ``eps * Omega / sqrt(2)``."""
    return cfg.epsilon * cfg.omega / math.sqrt(2)


def secular_period(cfg: TrapConfig) -> float:
    w = secular_frequency(cfg)
    return math.inf if w == 0 else 2 * math.pi / w


def closed_form_position(cfg: TrapConfig, t):
    """Approximate ion position at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    slow = np.cos(secular_frequency(cfg) * t + cfg.theta0)
    ripple = 1.0 + cfg.epsilon * np.cos(cfg.omega * t + cfg.drive_phase)
    out = cfg.x0 * slow * ripple
    return float(out) if out.ndim == 0 else out


def closed_form_velocity(cfg: TrapConfig, t):
    """Time derivative of :func:`closed_form_position`."""
    t = np.asarray(t, dtype=float)
    ws = secular_frequency(cfg)
    ph = cfg.omega * t + cfg.drive_phase
    slow = np.cos(ws * t + cfg.theta0)
    dslow = -ws * np.sin(ws * t + cfg.theta0)
    ripple = 1.0 + cfg.epsilon * np.cos(ph)
    dripple = -cfg.epsilon * cfg.omega * np.sin(ph)
    out = cfg.x0 * (dslow * ripple + slow * dripple)
    return float(out) if out.ndim == 0 else out


def integrate_equation_of_motion(cfg: TrapConfig, x_init: float, v_init: float,
                                 t_end: float, dt_max: float | None = None,
                                 samples: int = 2001, rtol: float = 1e-9) -> Trajectory:
    """Integrate the driven equation of motion with an adaptive Runge-Kutta scheme.

    ``dt_max`` defaults to, and may not exceed, 1/50 of a drive period so the
    micromotion is resolved.
    """
    limit = 2 * math.pi / (50 * cfg.omega)
    if dt_max is None:
        dt_max = limit
    if not 0 < dt_max <= limit * (1 + 1e-12):
        raise PreconditionError(f"dt_max={dt_max} must be in (0, {limit:.3e}] to resolve micromotion")
    if not t_end > 0:
        raise PreconditionError(f"t_end must be positive, got {t_end}")
    if rtol > 1e-9:
        raise PreconditionError(f"rtol={rtol} looser than 1e-9")

    k = cfg.epsilon * cfg.omega**2
    w, ph = cfg.omega, cfg.drive_phase

    def rhs(t, y):
        return (y[1], -k * math.cos(w * t + ph) * y[0])

    scale = max(abs(x_init), abs(v_init) / w, cfg.x0, 1e-300)
    times = np.linspace(0.0, t_end, samples)
    sol = solve_ivp(
        rhs, (0.0, t_end), [x_init, v_init], method="DOP853",
        t_eval=times, rtol=rtol, atol=(rtol * 1e-3 * scale, rtol * 1e-3 * scale * w),
        max_step=dt_max,
    )
    if not sol.success:
        raise IntegrationError(f"trap integration failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError("non-finite state in trap integration")
    return Trajectory(sol.t, sol.y[0], "x", {"velocity": sol.y[1]})


def oracle_deviation(cfg: TrapConfig, n_periods: float = 3.0, samples: int = 4001) -> tuple[Trajectory, np.ndarray]:
    """Integrate from the closed form's own initial conditions and return pointwise deviation."""
    t_end = n_periods * secular_period(cfg)
    traj = integrate_equation_of_motion(
        cfg, closed_form_position(cfg, 0.0), closed_form_velocity(cfg, 0.0), t_end, samples=samples
    )
    return traj, traj.positions - closed_form_position(cfg, traj.times)


def axial_position(omega_z: float, z0: float, t, phase: float = 0.0):
    """DC axial confinement: plain harmonic motion without micromotion."""
    return z0 * np.cos(omega_z * np.asarray(t, dtype=float) + phase)


def trajectory_xy(cfg: TrapConfig, phase_diff: float, t_end: float, samples: int) -> tuple[Trajectory, Trajectory]:
    """Radial x and y trajectories whose secular phases differ by ``phase_diff``."""
    if samples < 2:
        raise PreconditionError("need at least 2 samples")
    t = np.linspace(0.0, t_end, samples)
    y_cfg = TrapConfig(cfg.epsilon, cfg.omega, cfg.x0, cfg.theta0 + phase_diff, cfg.drive_phase)
    return (Trajectory(t, closed_form_position(cfg, t), "x"),
            Trajectory(t, closed_form_position(y_cfg, t), "y"))


def to_csv(x: Trajectory, y: Trajectory | None = None, deviation: np.ndarray | None = None) -> str:
    """Render as CSV with header ``t_s,x_m[,y_m][,deviation_m]``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["t_s", "x_m"]
    cols = [x.times, x.positions]
    if y is not None:
        header.append("y_m")
        cols.append(y.positions)
    if deviation is not None:
        header.append("deviation_m")
        cols.append(deviation)
    w.writerow(header)
    for row in zip(*cols):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
