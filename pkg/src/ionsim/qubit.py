"""Hyperfine qubit driven by an oscillating electric field.

Amplitudes follow the convention

    |psi(t)> = c0(t) e^{+i wL t/2} |0> + c1(t) e^{-i wL t/2} |1>

with interaction-picture coefficients ``c0, c1``. A :class:`QubitState`
holds the full (lab-frame) amplitudes of ``|0>`` and ``|1>``; at ``t = 0``
the two descriptions coincide.

Two evolution routes are provided: :func:`evolve_rwa`, the closed-form
resonant solution after dropping the ``2 wL`` counter-rotating terms, and
:func:`evolve_full`, which integrates the coupled amplitude equations with
those terms retained.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numba
import numpy as np

from ionsim import constants as const
from ionsim.errors import IntegrationError, PreconditionError

NORM_TOL = 1e-9
RWA_VALID_RATIO = 1e-2


@dataclass(frozen=True)
class QubitState:
    c0: complex
    c1: complex

    def __post_init__(self):
        n = self.norm()
        if abs(n - 1.0) > NORM_TOL:
            raise PreconditionError(f"state not normalized: |c0|^2+|c1|^2 = {n!r}")

    def norm(self) -> float:
        return abs(self.c0) ** 2 + abs(self.c1) ** 2

    @property
    def p0(self) -> float:
        return abs(self.c0) ** 2

    @property
    def p1(self) -> float:
        return abs(self.c1) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1], dtype=complex)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(0j, 1.0 + 0j)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "QubitState":
        return cls(math.cos(theta / 2) * cmath.exp(-0.5j * phi),
                   math.sin(theta / 2) * cmath.exp(0.5j * phi))


@dataclass(frozen=True)
class QubitParams:
    omega_l: float
    omega_r: float

    def __post_init__(self):
        if not self.omega_l > 0:
            raise PreconditionError(f"omega_l must be positive, got {self.omega_l}")
        if not self.omega_r >= 0:
            raise PreconditionError(f"omega_r must be non-negative, got {self.omega_r}")

    @property
    def rwa_valid(self) -> bool:
        return self.omega_r / self.omega_l <= RWA_VALID_RATIO


@dataclass(frozen=True)
class BlochVector:
    theta: float
    phi: float

    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


def rabi_frequency(e_field: float, x01) -> float:
    """Angular Rabi frequency ``e E1 X01 / hbar``.

    Bound-state dipole elements are real; a complex ``x01`` is replaced by its
    modulus with a warning.
    """
    if e_field < 0:
        raise PreconditionError(f"field amplitude must be non-negative, got {e_field}")
    if isinstance(x01, complex):
        if x01.imag != 0:
            warnings.warn("complex dipole matrix element; using its modulus", stacklevel=2)
        x01 = abs(x01)
    return const.E_CHARGE * e_field * x01 / const.HBAR


def _wrap(phi: float) -> float:
    """Map an angle onto (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


def bloch_coordinates(state: QubitState) -> BlochVector:
    theta = 2 * math.atan2(abs(state.c1), abs(state.c0))
    if abs(state.c0) == 0 or abs(state.c1) == 0:
        phi = 0.0
    else:
        phi = _wrap(cmath.phase(state.c1) - cmath.phase(state.c0))
    return BlochVector(theta, phi)


def evolve_rwa(state0: BlochVector, params: QubitParams, t: float) -> QubitState:
    """Resonant Rabi oscillation in the rotating-wave approximation.

    The closed form holds on the ``phi0 = -pi/2`` slice only; use
    :func:`rotate_to_rwa_slice` for other initial azimuths.
    """
    if not math.isclose(state0.phi, -math.pi / 2, abs_tol=1e-12):
        raise PreconditionError(
            f"closed form needs phi0 = -pi/2, got {state0.phi}; see rotate_to_rwa_slice"
        )
    half_phase = 0.5 * (state0.phi - params.omega_l * t)
    half_theta = 0.5 * (state0.theta + params.omega_r * t)
    return QubitState(cmath.exp(-1j * half_phase) * math.cos(half_theta),
                      cmath.exp(1j * half_phase) * math.sin(half_theta))


def rotate_to_rwa_slice(state0: BlochVector) -> tuple[BlochVector, float]:
    """Shift the reference frame so the initial azimuth becomes ``-pi/2``.

    Returns the rotated vector and the drive-phase offset ``-pi/2 - phi0``
    that has to be added to the drive for the dynamics to be unchanged.
    """
    offset = -math.pi / 2 - state0.phi
    return BlochVector(state0.theta, -math.pi / 2), offset


def larmor_precess(state0: QubitState, omega_l: float, t: float) -> QubitState:
    """Free evolution: c0 gains e^{+i wL t/2}, c1 gains e^{-i wL t/2}."""
    return QubitState(state0.c0 * cmath.exp(0.5j * omega_l * t),
                      state0.c1 * cmath.exp(-0.5j * omega_l * t))


# Dormand-Prince 5(4) tableau
_A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
])
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1])
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


@numba.njit(cache=True)
def _rhs(t, c, omega_l, omega_r, omega_1, out):
    drive = omega_r * math.cos(omega_1 * t)
    rot = complex(math.cos(omega_l * t), -math.sin(omega_l * t))
    out[0] = -1j * drive * rot * c[1]
    out[1] = -1j * drive * rot.conjugate() * c[0]


@numba.njit(cache=True)
def _dopri5(c_init, omega_l, omega_r, omega_1, t_out, rtol, atol, h_max, A, C, B, E):
    n_out = t_out.shape[0]
    out = np.empty((n_out, 2), dtype=np.complex128)
    k = np.empty((7, 2), dtype=np.complex128)
    y = c_init.copy()
    tmp = np.empty(2, dtype=np.complex128)
    y_new = np.empty(2, dtype=np.complex128)
    t = 0.0
    h = h_max
    i = 0
    while i < n_out and t_out[i] <= 0.0:
        out[i] = y
        i += 1
    steps = 0
    rejects = 0
    _rhs(t, y, omega_l, omega_r, omega_1, k[0])
    while i < n_out:
        target = t_out[i]
        hit = False
        hh = min(h, h_max)
        if t + hh >= target:
            hh = target - t
            hit = True
        for s in range(1, 6):
            for m in range(2):
                acc = 0j
                for r in range(s):
                    acc += A[s, r] * k[r, m]
                tmp[m] = y[m] + hh * acc
            _rhs(t + C[s] * hh, tmp, omega_l, omega_r, omega_1, k[s])
        for m in range(2):
            acc = 0j
            for r in range(6):
                acc += B[r] * k[r, m]
            y_new[m] = y[m] + hh * acc
        _rhs(t + hh, y_new, omega_l, omega_r, omega_1, k[6])
        err = 0.0
        for m in range(2):
            acc = 0j
            for r in range(7):
                acc += E[r] * k[r, m]
            sc = atol + rtol * max(abs(y[m]), abs(y_new[m]))
            err += (abs(hh * acc) / sc) ** 2
        err = math.sqrt(err / 2)
        if err <= 1.0:
            steps += 1
            t = target if hit else t + hh
            y[0] = y_new[0]
            y[1] = y_new[1]
            k[0, 0] = k[6, 0]
            k[0, 1] = k[6, 1]
            if hit:
                out[i] = y
                i += 1
            if not hit or hh >= h:
                fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                h = hh * fac
        else:
            rejects += 1
            h = hh * max(0.2, 0.9 * err ** -0.2)
            if h < 1e-300 or h <= abs(t) * 1e-15:
                return out[:i], steps, rejects, False
    return out, steps, rejects, True


def integrate_amplitudes(c_init, params: QubitParams, drive_omega1: float, times,
                         tol: float = 1e-10) -> np.ndarray:
    """Interaction-picture amplitudes ``(c0, c1)`` at each of ``times``.

    Solves ``i c0' = wR cos(w1 t) e^{-i wL t} c1`` and
    ``i c1' = wR cos(w1 t) e^{+i wL t} c0`` without the rotating-wave
    approximation. Step size is capped at ``2 pi / (20 (wL + w1))``.
    """
    if tol > 1e-8:
        raise PreconditionError(f"tol={tol} looser than 1e-8")
    times = np.ascontiguousarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise PreconditionError("times must be a non-decreasing 1-D array of t >= 0")
    h_max = 2 * math.pi / (20 * (params.omega_l + abs(drive_omega1)))
    c = np.asarray(c_init, dtype=np.complex128).copy()
    out, _, _, ok = _dopri5(c, params.omega_l, params.omega_r, float(drive_omega1), times,
                            tol, tol * 1e-2, h_max, _A, _C, _B, _E)
    if not ok:
        raise IntegrationError("step size underflow in amplitude integration")
    drift = np.max(np.abs(np.sum(np.abs(out) ** 2, axis=1) - np.sum(np.abs(c) ** 2)))
    if drift > 10 * tol:
        raise IntegrationError(f"norm drift {drift:.2e} exceeds 10*tol")
    return out


def to_lab_frame(c: np.ndarray, omega_l: float, times) -> np.ndarray:
    """Attach the free-precession phases to interaction-picture amplitudes."""
    ph = 0.5j * omega_l * np.asarray(times, dtype=float)
    return np.stack([c[..., 0] * np.exp(ph), c[..., 1] * np.exp(-ph)], axis=-1)


def evolve_full(state0: QubitState, params: QubitParams, drive_omega1: float, t: float,
                tol: float = 1e-10) -> QubitState:
    """Evolve for time ``t`` with counter-rotating terms retained."""
    if t < 0:
        raise PreconditionError(f"t must be non-negative, got {t}")
    c = integrate_amplitudes(state0.as_array(), params, drive_omega1, [t], tol)
    lab = to_lab_frame(c, params.omega_l, [t])[0]
    return QubitState(complex(lab[0]), complex(lab[1]))


def rabi_curves(params: QubitParams, theta0: float, times, mode: str = "both",
                tol: float = 1e-10) -> dict:
    """Excited-state population on a time grid, resonant drive, ``phi0 = -pi/2``."""
    times = np.asarray(times, dtype=float)
    out = {"t_s": times}
    start = BlochVector(theta0, -math.pi / 2)
    if mode in ("rwa", "both"):
        out["p1_rwa"] = np.sin(0.5 * (theta0 + params.omega_r * times)) ** 2
    if mode in ("full", "both"):
        c0 = QubitState.from_bloch(start.theta, start.phi).as_array()
        c = integrate_amplitudes(c0, params, params.omega_l, times, tol)
        out["p1_full"] = np.abs(c[:, 1]) ** 2
    if mode not in ("rwa", "full", "both"):
        raise PreconditionError(f"unknown mode {mode!r}")
    if mode == "both":
        out["abs_diff"] = np.abs(out["p1_full"] - out["p1_rwa"])
    p1 = out.get("p1_full", out.get("p1_rwa"))
    out["p1"] = p1
    out["p0"] = 1.0 - p1
    return out


def max_rwa_deviation(ratio: float, omega_l: float = 2 * math.pi, samples: int = 4003,
                      periods: float = 1.0, tol: float = 1e-10) -> float:
    """Largest |P1_full - P1_rwa| over ``periods`` Rabi periods from ``|0>``.

    Frequencies are scale-free, so a unit Larmor frequency is used by default.
    """
    params = QubitParams(omega_l, ratio * omega_l)
    t_end = periods * 2 * math.pi / params.omega_r
    curves = rabi_curves(params, 0.0, np.linspace(0.0, t_end, samples), "both", tol)
    return float(np.max(curves["abs_diff"]))
