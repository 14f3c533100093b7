"""Angular-momentum coupling, term symbols, fine/hyperfine energies and photon units.

Quantum numbers are stored as twice their value so that every coupling and
``j(j+1)`` factor is computed with exact integer/rational arithmetic. Floats
enter only when a factor is multiplied by a dimensional energy.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ionsim import constants as const
from ionsim.errors import PreconditionError

_L_LETTERS = "SPDFGHIKLMNOQRTUV"
_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
_SUBSCRIPT = str.maketrans("0123456789/", "₀₁₂₃₄₅₆₇₈₉/")


@functools.total_ordering
@dataclass(frozen=True)
class HalfInt:
    """Non-negative integer or half-integer quantum number, stored as ``2j``."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or isinstance(self.twice, bool):
            raise TypeError(f"twice must be int, got {type(self.twice).__name__}")

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Build from an int, Fraction, float (multiple of 1/2) or ``HalfInt``."""
        if isinstance(value, HalfInt):
            return value
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise PreconditionError(f"{value!r} is not a multiple of 1/2")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def casimir(self) -> Fraction:
        """``j(j+1)``, exact."""
        return Fraction(self.twice * (self.twice + 2), 4)

    def degeneracy(self) -> int:
        """``2j+1``."""
        return self.twice + 1

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __lt__(self, other) -> bool:
        return self.twice < HalfInt.of(other).twice

    def __eq__(self, other) -> bool:
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        try:
            return self.twice == HalfInt.of(other).twice
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(("HalfInt", self.twice))

    def __float__(self) -> float:
        return self.twice / 2

    def __str__(self) -> str:
        return str(self.twice // 2) if self.is_integer else f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def couple(j1, j2) -> list[HalfInt]:
    """Allowed totals ``|j1-j2|, ..., j1+j2`` in ascending unit steps."""
    a, b = HalfInt.of(j1), HalfInt.of(j2)
    if a.twice < 0 or b.twice < 0:
        raise PreconditionError("angular momenta must be non-negative")
    lo, hi = abs(a.twice - b.twice), a.twice + b.twice
    return [HalfInt(t) for t in range(lo, hi + 1, 2)]


@dataclass(frozen=True)
class TermSymbol:
    S: HalfInt
    L: HalfInt
    J: HalfInt

    def __post_init__(self):
        if not self.L.is_integer:
            raise PreconditionError(f"L must be an integer, got {self.L}")
        if self.J not in couple(self.L, self.S):
            raise PreconditionError(f"J={self.J} cannot be formed from L={self.L}, S={self.S}")

    @property
    def multiplicity(self) -> int:
        return self.S.twice + 1

    @property
    def letter(self) -> str:
        return _L_LETTERS[self.L.twice // 2]

    @property
    def ascii(self) -> str:
        """Plain rendering, e.g. ``3P2`` or ``2P1/2``."""
        return f"{self.multiplicity}{self.letter}{self.J}"

    @property
    def unicode(self) -> str:
        """Pretty rendering, e.g. ``³P₂`` or ``²P₁/₂``."""
        return (
            str(self.multiplicity).translate(_SUPERSCRIPT)
            + self.letter
            + str(self.J).translate(_SUBSCRIPT)
        )

    def __str__(self) -> str:
        return self.ascii

    @classmethod
    def parse(cls, text: str) -> "TermSymbol":
        mult = int(text[0])
        L = HalfInt(2 * _L_LETTERS.index(text[1]))
        return cls(S=HalfInt(mult - 1), L=L, J=HalfInt.of(Fraction(text[2:])))


def _fold(values: Sequence[HalfInt]) -> set[HalfInt]:
    totals = {values[0]}
    for v in values[1:]:
        totals = {t for acc in totals for t in couple(acc, v)}
    return totals


def term_symbols(valence: Iterable[tuple]) -> frozenset[TermSymbol]:
    """LS-coupled term symbols for electrons in distinct shells.

    Each entry of ``valence`` is ``(l, s)``. Spins are coupled among
    themselves, orbitals among themselves, then J runs over ``couple(L, S)``.
    Pauli filtering for equivalent electrons is deliberately not applied.
    """
    pairs = [(HalfInt.of(l), HalfInt.of(s)) for l, s in valence]
    if not pairs:
        raise PreconditionError("valence list is empty")
    for l, s in pairs:
        if s.twice != 1:
            raise PreconditionError(f"electron spin must be 1/2, got {s}")
        if not l.is_integer:
            raise PreconditionError(f"orbital l must be an integer, got {l}")
    spins = _fold([s for _, s in pairs])
    orbitals = _fold([l for l, _ in pairs])
    return frozenset(
        TermSymbol(S, L, J) for S in spins for L in orbitals for J in couple(L, S)
    )


def ls_expectation(j, l, s) -> Fraction:
    """<L.S> in units of hbar^2: (j(j+1) - l(l+1) - s(s+1)) / 2."""
    j, l, s = HalfInt.of(j), HalfInt.of(l), HalfInt.of(s)
    if j not in couple(l, s):
        raise PreconditionError(f"j={j} is not reachable from l={l}, s={s}")
    return (j.casimir() - l.casimir() - s.casimir()) / 2


def spin_orbit_energy(Z: int, n: int, l, s, j) -> float:
    """Hydrogenic spin-orbit energy in joules.

    Returns exactly 0 for ``l = 0``, where <L.S> vanishes and the radial
    factor ``1/(l(l+1/2)(l+1))`` would be singular.
    """
    l, s, j = HalfInt.of(l), HalfInt.of(s), HalfInt.of(j)
    if Z < 1 or n < 1:
        raise PreconditionError(f"need Z >= 1 and n >= 1, got Z={Z}, n={n}")
    if not l.is_integer or l.twice > 2 * (n - 1):
        raise PreconditionError(f"l={l} is not allowed for n={n}")
    ls2 = ls_expectation(j, l, s) * 2  # j(j+1) - l(l+1) - s(s+1)
    if l.twice == 0:
        return 0.0
    lv = l.value
    radial = 1 / (lv * (lv + Fraction(1, 2)) * (lv + 1))
    prefactor = const.MU_B**2 / (4 * math.pi * const.EPS0 * const.C**2)
    return prefactor * float(radial * ls2) * Z**4 / (n**3 * const.A0**3)


@dataclass(frozen=True)
class HyperfineLevel:
    F: HalfInt
    energy: float
    factor: Fraction  # energy / a_energy, exact

    def to_dict(self) -> dict:
        return {
            "F": str(self.F),
            "energy_j": self.energy,
            "energy_ev": self.energy / const.E_CHARGE,
            "factor": str(self.factor),
        }


def hyperfine_levels(a_energy: float, i, j) -> list[HyperfineLevel]:
    """Hyperfine levels relative to the unsplit centroid.

    ``a_energy`` is the product A*hbar^2 in joules; each level sits at
    ``(a/2)(F(F+1) - I(I+1) - J(J+1))``.
    """
    i, j = HalfInt.of(i), HalfInt.of(j)
    levels = []
    for F in couple(i, j):
        factor = (F.casimir() - i.casimir() - j.casimir()) / 2
        levels.append(HyperfineLevel(F=F, energy=a_energy * float(factor), factor=factor))
    return levels


@dataclass(frozen=True)
class PhotonQuanta:
    wavelength: float
    frequency: float
    energy_j: float
    energy_ev: float

    def to_dict(self) -> dict:
        return {
            "wavelength_m": self.wavelength,
            "frequency_hz": self.frequency,
            "energy_j": self.energy_j,
            "energy_ev": self.energy_ev,
        }


def photon_quanta(*, wavelength: float | None = None, frequency: float | None = None) -> PhotonQuanta:
    """Convert a wavelength (m) or a frequency (Hz) into all photon quantities."""
    if (wavelength is None) == (frequency is None):
        raise PreconditionError("give exactly one of wavelength or frequency")
    given = wavelength if wavelength is not None else frequency
    if not given > 0 or not math.isfinite(given):
        raise PreconditionError(f"photon input must be positive and finite, got {given!r}")
    if wavelength is not None:
        frequency = const.C / wavelength
    else:
        wavelength = const.C / frequency
    energy_j = const.H * frequency
    return PhotonQuanta(wavelength, frequency, energy_j, energy_j / const.E_CHARGE)


def nuclear_magneton_ratio() -> float:
    """mu_N / mu_B = m_e / m_p."""
    return const.M_E / const.M_P
