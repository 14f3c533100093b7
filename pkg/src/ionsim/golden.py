"""Reference values from the worked examples, checked against the simulator."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from ionsim import atomic, cooling, cz_gate, paul_trap, qubit, readout, signal_chain
from ionsim import constants as const


@dataclass
class GoldenCheck:
    module: str
    name: str
    value: object
    expected: object
    tolerance: str
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("value", "expected"):
            d[k] = _jsonable(d[k])
        return d


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


def _rel(module, name, value, expected, rel):
    ok = abs(value - expected) <= rel * abs(expected)
    return GoldenCheck(module, name, value, expected, f"rel {rel:g}", bool(ok))


def _abs(module, name, value, expected, tol):
    ok = abs(value - expected) <= tol
    return GoldenCheck(module, name, value, expected, f"abs {tol:g}", bool(ok))


def _eq(module, name, value, expected):
    return GoldenCheck(module, name, value, expected, "exact", bool(value == expected))


def _atomic():
    m = "atomic"
    yield _eq(m, "couple(1/2,1/2)", [str(x) for x in atomic.couple(0.5, 0.5)], ["0", "1"])
    yield _eq(m, "couple(1,1/2)", [str(x) for x in atomic.couple(1, 0.5)], ["1/2", "3/2"])
    pp = sorted(t.ascii for t in atomic.term_symbols([(1, 0.5), (1, 0.5)]))
    yield _eq(m, "terms of two inequivalent p electrons", pp,
              sorted(["1S0", "1P1", "1D2", "3S1", "3P0", "3P1", "3P2", "3D1", "3D2", "3D3"]))
    yield _eq(m, "terms of one p electron",
              sorted(t.ascii for t in atomic.term_symbols([(1, 0.5)])), ["2P1/2", "2P3/2"])
    lv = atomic.hyperfine_levels(1.0, 0.5, 0.5)
    yield _eq(m, "hyperfine factors F=0,F=1", [str(x.factor) for x in lv], ["-3/4", "1/4"])
    a = const.H * const.QUBIT_FREQ_HZ
    lv = atomic.hyperfine_levels(a, 0.5, 0.5)
    yield _rel(m, "qubit splitting (Hz)", (lv[1].energy - lv[0].energy) / const.H, 12.64e9, 1e-12)
    p = atomic.photon_quanta(wavelength=398.91e-9)
    yield _rel(m, "398.91 nm frequency (Hz)", p.frequency, 752e12, 0.005)
    yield _rel(m, "398.91 nm energy (eV)", p.energy_ev, 3.11, 0.005)
    p = atomic.photon_quanta(wavelength=369e-9)
    yield _rel(m, "369 nm frequency (Hz)", p.frequency, 813e12, 0.005)
    yield _rel(m, "369 nm energy (eV)", p.energy_ev, 3.37, 0.005)
    p = atomic.photon_quanta(frequency=12.64e9)
    yield _rel(m, "12.64 GHz energy (eV)", p.energy_ev, 52e-6, 0.01)
    r = atomic.nuclear_magneton_ratio()
    yield _rel(m, "m_e/m_p", r, 1 / 1836, 1e-3)
    yield _abs(m, "m_p/m_e", 1 / r, 1836, 2)


def _trap():
    m = "paul_trap"
    omega = 2 * math.pi * 8e6
    cfg = paul_trap.TrapConfig.from_secular_period(4.42e-6, omega)
    yield _rel(m, "derived epsilon", cfg.epsilon, 0.040, 0.01)
    cfg = paul_trap.TrapConfig(0.040, omega)
    yield _rel(m, "secular period at eps=0.040 (s)", paul_trap.secular_period(cfg), 4.42e-6, 0.01)
    _, dev = paul_trap.oracle_deviation(cfg, 3.0)
    yield GoldenCheck(m, "closed form vs integrator, max |dev|/x0", float(np.max(np.abs(dev)) / cfg.x0),
                      "<= 0.05", "abs 0.05", bool(np.max(np.abs(dev)) <= 0.05 * cfg.x0))


def _qubit():
    m = "qubit"
    params = qubit.QubitParams(2 * math.pi * 12.64e9, 2 * math.pi * 1e5)
    s = qubit.evolve_rwa(qubit.BlochVector(0.0, -math.pi / 2), params, math.pi / params.omega_r)
    yield _abs(m, "pi pulse from |0> gives P1", s.p1, 1.0, 1e-12)


def _readout():
    m = "readout"
    yield _rel(m, "detuning ratio", readout.detuning_ratio(), 1.8e-5, 0.02)
    # reading 0-1 photons as |0> and 2+ as |1> is tau = 2 under n >= tau
    tau = 2
    yield _eq(m, "tau=2 classifies n=0,1,2,3", [int(n >= tau) for n in range(4)], [0, 0, 1, 1])
    res = readout.simulate_initialization(1, readout.InitModel(1 / 3), 10, seed=1, shots=100_000)
    se = math.sqrt((2 / 3) ** 10 * (1 - (2 / 3) ** 10) / 100_000)
    yield _abs(m, "init residual after 10 cycles, p=1/3", float(res[10]), (2 / 3) ** 10, 3 * se)


def _cooling():
    m = "cooling"
    p_ph = cooling.photon_momentum(const.COOLING_WAVELENGTH_M)
    w0 = 2 * math.pi * const.C / const.COOLING_WAVELENGTH_M
    beam = cooling.DopplerBeam(-1, p_ph, -2 * math.pi * 10e6, 2 * math.pi * 5e6)
    v = 10e6 / (w0 / (2 * math.pi) / const.C)  # Doppler shift cancels the detuning
    ion = cooling.IonMotion1D(v * const.YB171_MASS_KG)
    right, led_r, _ = cooling.doppler_step(ion, beam, w0, emission=+1)
    left, led_l, _ = cooling.doppler_step(ion, beam, w0, emission=-1)
    yield _abs(m, "emission right -> p_i - 2 p_ph", right.momentum, ion.momentum - 2 * p_ph, 1e-12 * ion.momentum)
    yield _abs(m, "emission left -> p_i", left.momentum, ion.momentum, 1e-12 * ion.momentum)
    away = cooling.IonMotion1D(-ion.momentum)
    _, _, absorbed = cooling.doppler_step(away, beam, w0, emission=+1)
    yield _eq(m, "receding ion does not absorb", absorbed, False)
    wl, wc = 2 * math.pi * 12.64e9, 2 * math.pi * 1e6
    yield _eq(m, "|g,2> pulse", str(cooling.sideband_pulse(cooling.SidebandState("g", 2), wl, wc)[0]), "|e,1>")
    yield _eq(m, "|g,0> pulse", str(cooling.sideband_pulse(cooling.SidebandState("g", 0), wl, wc)[0]), "|g,0>")
    ledgers: list = []
    path = [str(s) for s in cooling.cool_to_ground(2, wl, wc, ledgers)]
    yield _eq(m, "ladder from n0=2", path, ["|g,2>", "|e,1>", "|g,1>", "|e,0>", "|g,0>"])
    yield _eq(m, "sideband ledgers balance", all(l.balanced() for l in ledgers), True)


def _cz():
    m = "cz_gate"
    u = cz_gate.extract_gate_matrix(cz_gate.cirac_zoller)
    yield _eq(m, "CZ matrix", u.tolist(), np.diag([1, 1, 1, -1]).astype(complex).tolist())
    expected = {
        ("g", "g"): [(1, "|g,g,0>"), (1, "|g,g,0>"), (1, "|g,g,0>"), (1, "|g,g,0>")],
        ("g", "e"): [(1, "|g,e,0>"), (1, "|g,e,0>"), (1, "|g,e,0>"), (1, "|g,e,0>")],
        ("e", "g"): [(1, "|e,g,0>"), (-1j, "|g,g,1>"), (1j, "|g,g,1>"), (1, "|e,g,0>")],
        ("e", "e"): [(1, "|e,e,0>"), (-1j, "|g,e,1>"), (-1j, "|g,e,1>"), (-1, "|e,e,0>")],
    }
    for (q1, q2), steps in expected.items():
        hist = cz_gate.run_sequence(cz_gate.CompositeState.basis(q1, q2))
        ok = all(
            len(st.terms()) == 1 and st.terms()[0][1] == ket and abs(st.terms()[0][0] - a) <= 1e-12
            for st, (a, ket) in zip(hist, steps)
        )
        yield GoldenCheck(m, f"pulse path |{q1},{q2},0>", [str(st) for st in hist],
                          [f"({a}){ket}" for a, ket in steps], "abs 1e-12", ok)
    cnot = cz_gate.compose_cnot()
    xor = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    err = float(np.max(np.abs(cnot - xor)))
    yield _abs(m, "(I x H) CZ (I x H) - CNOT", err, 0.0, 1e-12)


def _signal():
    m = "signal_chain"
    cfg = signal_chain.MixConfig(signal_chain.HW_OMEGA_AWG, signal_chain.HW_OMEGA_1, 0.7)
    i, q = signal_chain.generate_iq(cfg, 1e-6, 20.48e9)
    lines = signal_chain.spectral_lines(signal_chain.upconvert_mix(i, q, cfg))
    yield _eq(m, "mixer lines at 5 GHz and 5.1 GHz (Hz)", [round(float(f)) for f in lines],
              [round(5e9), round(5.1e9)])
    chk = signal_chain.verify_envelope(cfg, 1e-6, 20.48e9, cutoff=5.05e9)
    yield _abs(m, "hardware-scale envelope error / peak", chk.relative_error, 0.0, 1e-3)


SUITES: dict[str, Callable] = {
    "atomic": _atomic,
    "paul_trap": _trap,
    "qubit": _qubit,
    "readout": _readout,
    "cooling": _cooling,
    "cz_gate": _cz,
    "signal_chain": _signal,
}


def golden_suite(filter: str | None = None) -> list[GoldenCheck]:
    checks = []
    for name, suite in SUITES.items():
        if filter and filter not in name:
            continue
        checks.extend(suite())
    return checks
