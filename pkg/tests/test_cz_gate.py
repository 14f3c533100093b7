import numpy as np
import pytest

from ionsim import cz_gate
from ionsim.cz_gate import CompositeState
from ionsim.errors import PreconditionError

CZ = np.diag([1, 1, 1, -1]).astype(complex)


def test_gate_matrix_is_exact_cz():
    u = cz_gate.extract_gate_matrix(cz_gate.cirac_zoller)
    assert np.array_equal(u, CZ)


@pytest.mark.parametrize("n_max", [1, 2, 4])
def test_gate_independent_of_truncation(n_max):
    assert np.array_equal(cz_gate.extract_gate_matrix(cz_gate.cirac_zoller, n_max), CZ)


@pytest.mark.parametrize("q1, q2, path", [
    ("g", "g", [(1, "|g,g,0>")] * 4),
    ("g", "e", [(1, "|g,e,0>")] * 4),
    ("e", "g", [(1, "|e,g,0>"), (-1j, "|g,g,1>"), (1j, "|g,g,1>"), (1, "|e,g,0>")]),
    ("e", "e", [(1, "|e,e,0>"), (-1j, "|g,e,1>"), (-1j, "|g,e,1>"), (-1, "|e,e,0>")]),
])
def test_intermediate_states(q1, q2, path):
    hist = cz_gate.run_sequence(CompositeState.basis(q1, q2))
    for state, (amp, ket) in zip(hist, path):
        (got_amp, got_ket), = state.terms()
        assert got_ket == ket and got_amp == amp


def test_cnot_from_hadamards():
    xor = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.max(np.abs(cz_gate.compose_cnot() - xor)) <= 1e-12


@pytest.mark.parametrize("build", [cz_gate.red_pi_matrix, cz_gate.aux_2pi_matrix])
@pytest.mark.parametrize("ion", [1, 2])
def test_pulse_matrices_unitary(build, ion):
    m = build(ion, 3)
    assert np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= 1e-12


def test_red_pi_acts_on_addressed_ion_only():
    s = CompositeState.basis("g", "e", 1)
    assert cz_gate.apply_red_pi(s, 1).terms() == [(-1j, "|e,e,0>")]
    # ion 2 sits in |e,1>, which no red-sideband rule touches
    assert cz_gate.apply_red_pi(s, 2).terms() == [(1, "|g,e,1>")]


def test_bell_demo():
    start = CompositeState.from_computational(np.array([1, 0, 1, 0]) / np.sqrt(2))
    out = cz_gate.target_hadamard(cz_gate.cirac_zoller(cz_gate.target_hadamard(start)))
    assert np.allclose(out.computational(), np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-12)


def test_phonon_input_rejected():
    with pytest.raises(PreconditionError):
        cz_gate.cirac_zoller(CompositeState.basis("g", "g", 1))


def test_state_validation_and_format():
    with pytest.raises(PreconditionError):
        CompositeState(np.ones(12))
    with pytest.raises(PreconditionError):
        CompositeState.basis("x", "g")
    with pytest.raises(PreconditionError):
        cz_gate.pulse_matrix({}, 3, 2)
    s = CompositeState.basis(1, 0)
    assert s.index(1, 0, 0) == 6 and str(s) == "(1)|e,g,0>"
    assert not s.amplitudes.flags.writeable


def test_matrix_json():
    js = cz_gate.matrix_to_json(CZ)
    assert js[3][3] == [-1.0, 0.0] and js[0][1] == [0.0, 0.0]
