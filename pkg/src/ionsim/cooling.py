"""One-dimensional Doppler cooling and resolved-sideband cooling.

Every transition returns a :class:`Ledger` with the change carried by the
light field, the ion (or ion chain) and the internal state. Components sum
to zero for any legal step: momentum for Doppler events, energy for sideband
events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from ionsim import constants as const
from ionsim.errors import PreconditionError
from ionsim.rng import make_rng


@dataclass(frozen=True)
class Ledger:
    photon_delta: float = 0.0
    chain_delta: float = 0.0
    internal_delta: float = 0.0

    def total(self) -> float:
        return self.photon_delta + self.chain_delta + self.internal_delta

    def scale(self) -> float:
        return max(abs(self.photon_delta), abs(self.chain_delta), abs(self.internal_delta))

    def balanced(self, rel_tol: float = 1e-12) -> bool:
        return abs(self.total()) <= rel_tol * self.scale()

    def __add__(self, other: "Ledger") -> "Ledger":
        return Ledger(self.photon_delta + other.photon_delta,
                      self.chain_delta + other.chain_delta,
                      self.internal_delta + other.internal_delta)


def photon_momentum(wavelength: float) -> float:
    """``h / lambda`` in kg m/s."""
    if not wavelength > 0:
        raise PreconditionError(f"wavelength must be positive, got {wavelength}")
    return const.H / wavelength


def recoil_velocity(wavelength: float, mass: float = const.YB171_MASS_KG) -> float:
    return photon_momentum(wavelength) / mass


# --- Doppler cooling ---------------------------------------------------------

@dataclass(frozen=True)
class IonMotion1D:
    momentum: float
    mass: float = const.YB171_MASS_KG
    internal: Literal["ground", "excited"] = "ground"

    def __post_init__(self):
        if not self.mass > 0:
            raise PreconditionError(f"mass must be positive, got {self.mass}")

    @property
    def velocity(self) -> float:
        return self.momentum / self.mass

    @property
    def kinetic_energy(self) -> float:
        return self.momentum**2 / (2 * self.mass)


@dataclass(frozen=True)
class DopplerBeam:
    direction: int
    photon_momentum: float
    detuning: float
    acceptance_halfwidth: float

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise PreconditionError(f"direction must be +1 or -1, got {self.direction}")
        if not self.photon_momentum > 0:
            raise PreconditionError("photon_momentum must be positive")
        if self.acceptance_halfwidth < 0:
            raise PreconditionError("acceptance_halfwidth must be non-negative")

    @classmethod
    def from_wavelength(cls, direction: int, wavelength: float, detuning: float,
                        acceptance_halfwidth: float) -> "DopplerBeam":
        return cls(direction, photon_momentum(wavelength), detuning, acceptance_halfwidth)


def perceived_omega(beam: DopplerBeam, transition_omega: float, velocity):
    """Laser angular frequency in the ion frame, first order in v/c."""
    return (transition_omega + beam.detuning) * (1.0 - beam.direction * np.asarray(velocity) / const.C)


def absorbs(beam: DopplerBeam, transition_omega: float, velocity):
    """Top-hat acceptance: absorb iff the perceived light is within the window."""
    return np.abs(perceived_omega(beam, transition_omega, velocity) - transition_omega) <= beam.acceptance_halfwidth


def doppler_step(ion: IonMotion1D, beam: DopplerBeam, transition_omega: float,
                 seed: int | np.random.Generator | None = None,
                 emission: int | None = None) -> tuple[IonMotion1D, Ledger, bool]:
    """One absorb-then-emit event.

    On absorption the ion gains ``direction * p_ph``, then spontaneously
    emits a photon to the left or right (``emission`` = -1/+1, drawn at
    random when not given) and recoils against it.
    """
    if ion.internal != "ground":
        raise PreconditionError("doppler_step needs the ion in its ground state")
    if not bool(absorbs(beam, transition_omega, ion.velocity)):
        return ion, Ledger(), False
    if emission is None:
        rng = seed if isinstance(seed, np.random.Generator) else make_rng(0 if seed is None else seed)
        emission = 1 if rng.random() < 0.5 else -1
    elif emission not in (1, -1):
        raise PreconditionError(f"emission must be +1 or -1, got {emission}")
    p_ph = beam.photon_momentum
    absorbed = beam.direction * p_ph
    emitted = emission * p_ph
    after = replace(ion, momentum=ion.momentum + absorbed - emitted)
    ledger = Ledger(photon_delta=emitted - absorbed, chain_delta=absorbed - emitted)
    return after, ledger, True


@dataclass(frozen=True)
class DopplerRun:
    mean_ke: np.ndarray  # index 0 is the initial ensemble
    momenta: np.ndarray
    ledger: Ledger
    absorptions: int


def doppler_cool(initial_momenta: Sequence[float], beams: tuple[DopplerBeam, DopplerBeam],
                 transition_omega: float, steps: int, seed: int,
                 mass: float = const.YB171_MASS_KG) -> DopplerRun:
    """Alternate the two counter-propagating beams over the whole ensemble.

    Even steps use ``beams[0]``, odd steps ``beams[1]``; every ion gets one
    chance to absorb per step.
    """
    a, b = beams
    if a.direction != -b.direction:
        raise PreconditionError("beams must counter-propagate")
    if not (math.isclose(abs(a.detuning), abs(b.detuning))
            and math.isclose(a.acceptance_halfwidth, b.acceptance_halfwidth)):
        raise PreconditionError("beams must share |detuning| and acceptance")
    rng = make_rng(seed)
    p = np.array(initial_momenta, dtype=float)
    trace = np.empty(steps + 1)
    trace[0] = np.mean(p**2) / (2 * mass)
    photon_sum = chain_sum = 0.0
    n_abs = 0
    for k in range(steps):
        beam = beams[k % 2]
        hit = absorbs(beam, transition_omega, p / mass)
        emission = np.where(rng.random(p.size) < 0.5, 1.0, -1.0)
        kick = np.where(hit, beam.direction * beam.photon_momentum - emission * beam.photon_momentum, 0.0)
        p = p + kick
        chain_sum += float(np.sum(kick))
        photon_sum -= float(np.sum(kick))
        n_abs += int(np.count_nonzero(hit))
        trace[k + 1] = np.mean(p**2) / (2 * mass)
    return DopplerRun(trace, p, Ledger(photon_sum, chain_sum, 0.0), n_abs)


# --- resolved sideband cooling -----------------------------------------------

@dataclass(frozen=True)
class SidebandState:
    internal: Literal["g", "e"]
    n_phonon: int

    def __post_init__(self):
        if self.internal not in ("g", "e"):
            raise PreconditionError(f"internal must be 'g' or 'e', got {self.internal!r}")
        if self.n_phonon < 0:
            raise PreconditionError(f"n_phonon must be >= 0, got {self.n_phonon}")

    def __str__(self) -> str:
        return f"|{self.internal},{self.n_phonon}>"


def chain_energy(n_phonon: int, omega_chain: float) -> float:
    """Harmonic-oscillator energy hbar w (N + 1/2)."""
    return const.HBAR * omega_chain * (n_phonon + 0.5)


def sideband_pulse(state: SidebandState, omega_l: float, omega_chain: float) -> tuple[SidebandState, Ledger]:
    """Red-sideband pulse at ``wL - w_chain``: ``|g,N>`` -> ``|e,N-1>`` when N >= 1."""
    if state.internal == "e" or state.n_phonon == 0:
        return state, Ledger()
    ledger = Ledger(photon_delta=-const.HBAR * (omega_l - omega_chain),
                    chain_delta=-const.HBAR * omega_chain,
                    internal_delta=const.HBAR * omega_l)
    return SidebandState("e", state.n_phonon - 1), ledger


def sideband_decay(state: SidebandState, omega_l: float) -> tuple[SidebandState, Ledger]:
    """Spontaneous emission of a carrier photon; the phonon number is untouched."""
    if state.internal != "e":
        raise PreconditionError("sideband_decay needs the ion in |e>")
    ledger = Ledger(photon_delta=const.HBAR * omega_l, internal_delta=-const.HBAR * omega_l)
    return SidebandState("g", state.n_phonon), ledger


def cool_to_ground(n0: int, omega_l: float, omega_chain: float,
                   ledgers: list | None = None) -> list[SidebandState]:
    """Pulse/decay cycles from ``|g,n0>`` down to ``|g,0>``; returns every visited state.

    If ``ledgers`` is a list, the ledger of each transition is appended to it.
    """
    if n0 < 0:
        raise PreconditionError(f"n0 must be >= 0, got {n0}")
    state = SidebandState("g", n0)
    path = [state]
    while state.n_phonon > 0:
        state, led = sideband_pulse(state, omega_l, omega_chain)
        path.append(state)
        if ledgers is not None:
            ledgers.append(led)
        state, led = sideband_decay(state, omega_l)
        path.append(state)
        if ledgers is not None:
            ledgers.append(led)
    return path
