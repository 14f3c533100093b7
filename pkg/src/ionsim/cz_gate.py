"""Cirac-Zoller controlled-Z gate on two ion qubits sharing one motional mode.

States live on ``|q1, q2, N>`` with ``q in {g, e}`` and ``N = 0..n_max``,
stored as a flat complex vector, q1-major, then q2, then N:

    index = (2 * q1 + q2) * (n_max + 1) + N        (g = 0, e = 1)

The pulses are ideal instantaneous maps given by their action on
``|internal, N>`` of the addressed ion. Basis states that the rules do not
mention are left unchanged; the auxiliary level used by the 2-pi pulse is
never populated after the pulse and is not represented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from ionsim.errors import PreconditionError

LEAK_TOL = 1e-12
G, E = 0, 1
_LABEL = {G: "g", E: "e"}

# (internal, N) -> (internal, N, phase)
_RED_PI = {(G, 0): (G, 0, 1), (G, 1): (E, 0, -1j), (E, 0): (G, 1, -1j)}
_AUX_2PI = {(G, 0): (G, 0, 1), (G, 1): (G, 1, -1), (E, 0): (E, 0, 1), (E, 1): (E, 1, 1)}


@dataclass(frozen=True)
class CompositeState:
    amplitudes: np.ndarray
    n_max: int = 2

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (4 * (self.n_max + 1),):
            raise PreconditionError(f"expected {4 * (self.n_max + 1)} amplitudes, got {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise PreconditionError(f"state not normalized (norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 4 * (self.n_max + 1)

    @staticmethod
    def index(q1: int, q2: int, n: int, n_max: int = 2) -> int:
        return (2 * q1 + q2) * (n_max + 1) + n

    @classmethod
    def basis(cls, q1, q2, n: int = 0, n_max: int = 2) -> "CompositeState":
        q1, q2 = _qubit(q1), _qubit(q2)
        amps = np.zeros(4 * (n_max + 1), dtype=complex)
        amps[cls.index(q1, q2, n, n_max)] = 1.0
        return cls(amps, n_max)

    @classmethod
    def from_computational(cls, vec, n_max: int = 2) -> "CompositeState":
        """Embed a 4-vector over (gg, ge, eg, ee) at N = 0."""
        amps = np.zeros(4 * (n_max + 1), dtype=complex)
        amps[:: n_max + 1] = vec
        return cls(amps, n_max)

    def amplitude(self, q1, q2, n: int) -> complex:
        return complex(self.amplitudes[self.index(_qubit(q1), _qubit(q2), n, self.n_max)])

    def computational(self) -> np.ndarray:
        """Amplitudes of (gg, ge, eg, ee) at N = 0."""
        return self.amplitudes[:: self.n_max + 1].copy()

    def weight_outside_ground(self) -> float:
        return float(1.0 - np.sum(np.abs(self.computational()) ** 2))

    def terms(self, tol: float = 1e-12) -> list[tuple[complex, str]]:
        out = []
        for q1 in (G, E):
            for q2 in (G, E):
                for n in range(self.n_max + 1):
                    a = self.amplitudes[self.index(q1, q2, n, self.n_max)]
                    if abs(a) > tol:
                        out.append((complex(a), f"|{_LABEL[q1]},{_LABEL[q2]},{n}>"))
        return out

    def __str__(self) -> str:
        return " + ".join(f"({_fmt(a)}){ket}" for a, ket in self.terms()) or "0"


def _fmt(a: complex) -> str:
    re, im = round(a.real, 12) + 0.0, round(a.imag, 12) + 0.0
    if im == 0:
        return f"{re:g}"
    if re == 0:
        return f"{im:g}i"
    return f"{re:g}{im:+g}i"


def _qubit(q) -> int:
    if q in (0, "g", "0"):
        return G
    if q in (1, "e", "1"):
        return E
    raise PreconditionError(f"qubit label must be g/e or 0/1, got {q!r}")


def pulse_matrix(rules: dict, ion: int, n_max: int) -> np.ndarray:
    """Full-space matrix of a single-ion rule table; unlisted states map to themselves."""
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    if ion not in (1, 2):
        raise PreconditionError(f"ion must be 1 or 2, got {ion!r}")
    dim = 4 * (n_max + 1)
    m = np.zeros((dim, dim), dtype=complex)
    for q1 in (G, E):
        for q2 in (G, E):
            for n in range(n_max + 1):
                src = CompositeState.index(q1, q2, n, n_max)
                q = q1 if ion == 1 else q2
                q_new, n_new, phase = rules.get((q, n), (q, n, 1))
                dst = CompositeState.index(q_new if ion == 1 else q1,
                                           q_new if ion == 2 else q2, n_new, n_max)
                m[dst, src] = phase
    return m


def red_pi_matrix(ion: int, n_max: int = 2) -> np.ndarray:
    return pulse_matrix(_RED_PI, ion, n_max)


def aux_2pi_matrix(ion: int, n_max: int = 2) -> np.ndarray:
    return pulse_matrix(_AUX_2PI, ion, n_max)


def apply_red_pi(state: CompositeState, ion: int) -> CompositeState:
    """Red-sideband pi pulse: ``|g,1> -> -i|e,0>``, ``|e,0> -> -i|g,1>``, ``|g,0>`` fixed."""
    return CompositeState(red_pi_matrix(ion, state.n_max) @ state.amplitudes, state.n_max)


def apply_aux_2pi(state: CompositeState, ion: int) -> CompositeState:
    """2-pi pulse via the auxiliary level: only ``|g,1>`` picks up a sign."""
    return CompositeState(aux_2pi_matrix(ion, state.n_max) @ state.amplitudes, state.n_max)


@dataclass(frozen=True)
class PulseStep:
    target_ion: Literal[1, 2]
    kind: Literal["red_pi", "aux_2pi"]

    def apply(self, state: CompositeState) -> CompositeState:
        if self.kind == "red_pi":
            return apply_red_pi(state, self.target_ion)
        if self.kind == "aux_2pi":
            return apply_aux_2pi(state, self.target_ion)
        raise PreconditionError(f"unknown pulse kind {self.kind!r}")


CZ_SEQUENCE = (PulseStep(1, "red_pi"), PulseStep(2, "aux_2pi"), PulseStep(1, "red_pi"))


def run_sequence(state: CompositeState, steps=CZ_SEQUENCE) -> list[CompositeState]:
    """Apply pulses in order and return the initial and every intermediate state."""
    history = [state]
    for step in steps:
        history.append(step.apply(history[-1]))
    return history


def cirac_zoller(state: CompositeState) -> CompositeState:
    """Three-pulse CZ; the motional mode must start in its ground state."""
    leak = state.weight_outside_ground()
    if leak > LEAK_TOL:
        raise PreconditionError(f"input has weight {leak:.3e} outside N = 0; cool the chain first")
    return run_sequence(state)[-1]


def extract_gate_matrix(gate: Callable[[CompositeState], CompositeState], n_max: int = 2) -> np.ndarray:
    """4x4 action of ``gate`` on the N = 0 computational subspace."""
    u = np.zeros((4, 4), dtype=complex)
    for col in range(4):
        vec = np.zeros(4, dtype=complex)
        vec[col] = 1.0
        out = gate(CompositeState.from_computational(vec, n_max))
        leak = out.weight_outside_ground()
        if leak > LEAK_TOL:
            raise PreconditionError(f"gate leaks {leak:.3e} out of the computational subspace")
        u[:, col] = out.computational()
    return u


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def compose_cnot(n_max: int = 2) -> np.ndarray:
    """(I x H) U_CZ (I x H) with U_CZ extracted from the pulse sequence."""
    ih = np.kron(np.eye(2), HADAMARD)
    return ih @ extract_gate_matrix(cirac_zoller, n_max) @ ih


def target_hadamard(state: CompositeState) -> CompositeState:
    """Hadamard on qubit 2, acting independently of q1 and N."""
    nm = state.n_max + 1
    amps = state.amplitudes.reshape(2, 2, nm)
    return CompositeState(np.einsum("ab,xbn->xan", HADAMARD, amps).reshape(-1), state.n_max)


def matrix_to_json(u: np.ndarray) -> list:
    """Nested list of ``[re, im]`` pairs."""
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in u]
