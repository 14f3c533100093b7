"""Command-line entry point: ``ionsim <subcommand> [flags]``.

Parameters come from built-in defaults, then an optional YAML config file
(``--config``, one mapping per subcommand), then command-line flags.

Exit codes: 0 success, 2 usage error, 3 precondition violation,
4 golden failure, 5 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
import yaml

from ionsim import __version__
from ionsim import atomic, cooling, cz_gate, golden, paul_trap, qubit, readout, signal_chain
from ionsim import constants as const
from ionsim.errors import PreconditionError
from ionsim.rng import GENERATOR_ID, make_rng

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_GOLDEN, EXIT_INTERNAL = 0, 2, 3, 4, 5
OUTPUT_DIR_ENV = "IONSIM_OUTPUT_DIR"


class UsageError(Exception):
    pass


class ConfigPrecondition(Exception):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _on_off(v) -> bool:
    return _bool(v)


def _int_list(v) -> list[int]:
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    return [int(x) for x in str(v).split(",") if x.strip()]


@dataclass(frozen=True)
class Opt:
    name: str  # flag name without leading dashes
    type: Callable = float
    default: Any = None
    help: str = ""
    choices: tuple | None = None
    flag: bool = False  # store_true switch

    @property
    def key(self) -> str:
        return self.name.replace("-", "_")


_COMMON = [
    Opt("seed", int, 0, "64-bit RNG seed"),
    Opt("format", str, None, "output format", ("csv", "json")),
]

OPTIONS: dict[str, list[Opt]] = {
    "terms": [
        Opt("orbitals", _int_list, [1, 1], "comma-separated l of each valence electron"),
        Opt("Z", int, None, "nuclear charge, for single-electron spin-orbit energies"),
        Opt("n", int, None, "principal quantum number, with --Z"),
    ],
    "trap": [
        Opt("epsilon", float, 0.04, "dimensionless stability parameter"),
        Opt("omega-hz", float, 8e6, "RF drive frequency in Hz"),
        Opt("x0", float, 1e-6, "amplitude (m)"),
        Opt("theta0", float, 0.0, "initial secular phase (rad)"),
        Opt("phase-diff", float, None, "y secular phase offset (rad); adds a y column"),
        Opt("t-end", float, None, "duration (s); default 3 secular periods"),
        Opt("samples", int, 2001, "number of samples"),
        Opt("oracle", _bool, False, "also integrate the equation of motion", flag=True),
    ],
    "rabi": [
        Opt("omega-l-hz", float, 12.64e9, "Larmor frequency in Hz"),
        Opt("omega-r-hz", float, 1e5, "Rabi frequency in Hz"),
        Opt("theta0", float, 0.0, "initial polar angle (rad)"),
        Opt("t-end", float, None, "duration (s); default one Rabi period"),
        Opt("samples", int, 201, "number of samples"),
        Opt("mode", str, "rwa", "evolution route", ("rwa", "full", "both")),
    ],
    "readout": [
        Opt("bright-mean", float, 10.0, "mean photon count for |1>"),
        Opt("dark-mean", float, 0.1, "mean background count for |0>"),
        Opt("leak", float, 0.0, "leak probability per scattering event"),
        Opt("shots", int, 100_000, "detection windows per state"),
    ],
    "init": [
        Opt("p-ground", float, 1 / 3, "branching to |0> per cycle"),
        Opt("p-dark", float, 0.0, "branching to the metastable dark state"),
        Opt("repump", _on_off, True, "935 nm repump on/off", ("on", "off")),
        Opt("cycles", int, 10, "pumping cycles"),
        Opt("shots", int, 100_000, "Monte Carlo shots"),
        Opt("start", int, 1, "initial qubit state", (0, 1)),
    ],
    "cool": [
        Opt("mode", str, "doppler", "cooling stage", ("doppler", "sideband")),
        Opt("n-ions", int, 200, "ensemble size (doppler)"),
        Opt("p-init-spread", float, 3.0 * const.YB171_MASS_KG, "initial momentum spread, kg m/s"),
        Opt("detuning-hz", float, -10e6, "laser detuning in Hz (negative = red)"),
        Opt("acceptance-hz", float, 5e6, "absorption window half-width in Hz"),
        Opt("steps", int, 2000, "Doppler steps"),
        Opt("n0", int, 5, "initial phonon number (sideband)"),
        Opt("chain-hz", float, 1e6, "ion-chain mode frequency in Hz (sideband)"),
    ],
    "cz": [
        Opt("input", str, "11", "input state", ("00", "01", "10", "11", "bell-demo")),
        Opt("show-steps", _bool, False, "print the state after every pulse", flag=True),
        Opt("matrix", _bool, False, "print the 4x4 gate matrix", flag=True),
    ],
    "mixer": [
        Opt("omega1-hz", float, signal_chain.DESK_OMEGA_1 / (2 * math.pi), "target carrier in Hz"),
        Opt("omega-awg-hz", float, signal_chain.DESK_OMEGA_AWG / (2 * math.pi), "AWG frequency in Hz"),
        Opt("phi", float, 0.7, "pulse phase (rad)"),
        Opt("envelope", str, "const", "envelope shape", ("const", "gauss")),
        Opt("duration", float, 10e-3, "record length (s)"),
        Opt("rate", float, 4e6, "sample rate (Hz)"),
        Opt("cutoff-hz", float, None, "low-pass cutoff (Hz); default mid-band"),
        Opt("hardware-scale", _bool, False, "use 5 GHz / 50 MHz with a matching record", flag=True),
    ],
    "golden": [
        Opt("filter", str, None, "run only suites whose name contains this"),
    ],
}

DEFAULT_FORMAT = {"terms": "json", "trap": "csv", "rabi": "csv", "readout": "json", "init": "csv",
                  "cool": "csv", "cz": "json", "mixer": "csv", "golden": "json"}


@dataclass
class ScenarioConfig:
    subcommand: str
    params: dict
    seed: int = 0
    output: Path | None = None
    format: str = "json"
    report: Path | None = None


@dataclass
class RunReport:
    scenario: dict
    wall_time_s: float = 0.0
    outputs: dict = field(default_factory=dict)
    golden: list = field(default_factory=list)
    generator: str = GENERATOR_ID
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.golden)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "wall_time_s": self.wall_time_s, "outputs": self.outputs,
                "golden": self.golden, "generator": self.generator, "version": self.version}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ionsim", description="Trapped-ion quantum computer simulator")
    parser.add_argument("--version", action="store_true", help="print version and RNG identity")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    for cmd, opts in OPTIONS.items():
        p = sub.add_parser(cmd, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", type=Path, help="YAML file with a section per subcommand")
        p.add_argument("--output", type=Path, help=f"output file (default: stdout or ${OUTPUT_DIR_ENV})")
        p.add_argument("--report", type=Path, help="write a JSON run report here")
        for o in opts + _COMMON:
            if o.flag:
                p.add_argument(f"--{o.name}", dest=o.key, action="store_true", help=o.help)
            elif o.type is _on_off:
                p.add_argument(f"--{o.name}", dest=o.key, choices=o.choices, help=o.help)
            else:
                p.add_argument(f"--{o.name}", dest=o.key, type=o.type, choices=o.choices, help=o.help)
    return parser


def _coerce(cmd: str, key: str, value):
    for o in OPTIONS[cmd] + _COMMON:
        if o.key == key:
            try:
                v = o.type(value)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{cmd}.{o.name}: cannot convert {value!r}: {exc}") from None
            if o.choices is not None and o.type is not _on_off and v not in o.choices:
                raise UsageError(f"{cmd}.{o.name}: {v!r} not in {list(o.choices)}")
            return v
    raise UsageError(f"{cmd}: unknown key {key!r}")


def parse_config(argv: list[str], config_text: str | None = None) -> ScenarioConfig:
    """Merge defaults, config file and flags into a validated scenario."""
    parser = build_parser()
    if not argv:
        raise UsageError(parser.format_usage().strip())
    ns = vars(parser.parse_args(argv))
    cmd = ns.pop("subcommand")
    if cmd is None:
        raise UsageError(parser.format_usage().strip())
    config_path = ns.pop("config", None)
    output = ns.pop("output", None)
    report = ns.pop("report", None)
    ns.pop("version", None)
    if config_path is not None:
        try:
            config_text = Path(config_path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None

    params = {o.key: o.default for o in OPTIONS[cmd] + _COMMON}
    if config_text:
        try:
            doc = yaml.safe_load(config_text) or {}
        except yaml.YAMLError as exc:
            raise UsageError(f"config is not valid YAML: {exc}") from None
        if not isinstance(doc, dict):
            raise UsageError("config must be a mapping of subcommand sections")
        for section in doc:
            if section not in OPTIONS:
                raise UsageError(f"unknown config section {section!r}")
        for k, v in (doc.get(cmd) or {}).items():
            key = str(k).replace("-", "_")
            params[key] = _coerce(cmd, key, v)
    params.update(ns)
    if isinstance(params.get("repump"), str):
        params["repump"] = _on_off(params["repump"])

    fmt = params.pop("format") or DEFAULT_FORMAT[cmd]
    seed = params.pop("seed")
    if not 0 <= seed < 2**64:
        raise ConfigPrecondition("seed", "must fit in 64 unsigned bits")
    if output is None and os.environ.get(OUTPUT_DIR_ENV):
        output = Path(os.environ[OUTPUT_DIR_ENV]) / f"{cmd}.{fmt}"
    cfg = ScenarioConfig(cmd, params, seed, output, fmt, report)
    validate(cfg)
    return cfg


def _need(cond: bool, key: str, message: str):
    if not cond:
        raise ConfigPrecondition(key, message)


def validate(cfg: ScenarioConfig) -> None:
    """Check module preconditions up front, naming the offending key."""
    p, cmd = cfg.params, cfg.subcommand
    if cmd == "terms":
        _need(len(p["orbitals"]) >= 1 and all(l >= 0 for l in p["orbitals"]), "orbitals",
              "need at least one non-negative l")
        if p["Z"] is not None or p["n"] is not None:
            _need(p["Z"] is not None and p["Z"] >= 1, "Z", "must be >= 1 (and given with --n)")
            _need(p["n"] is not None and p["n"] >= 1, "n", "must be >= 1 (and given with --Z)")
            _need(len(p["orbitals"]) == 1, "orbitals", "spin-orbit energies need one electron")
            _need(p["orbitals"][0] <= p["n"] - 1, "orbitals", "l must be <= n - 1")
    elif cmd == "trap":
        _need(0 <= p["epsilon"] < paul_trap.EPSILON_MAX, "epsilon",
              f"must be in [0, {paul_trap.EPSILON_MAX}) for the approximation to hold")
        _need(p["omega_hz"] > 0, "omega-hz", "must be positive")
        _need(p["samples"] >= 2, "samples", "must be >= 2")
        _need(p["t_end"] is None or p["t_end"] > 0, "t-end", "must be positive")
        _need(p["t_end"] is not None or p["epsilon"] > 0, "t-end", "required when epsilon = 0")
    elif cmd == "rabi":
        _need(p["omega_l_hz"] > 0, "omega-l-hz", "must be positive")
        _need(p["omega_r_hz"] >= 0, "omega-r-hz", "must be non-negative")
        _need(p["samples"] >= 2, "samples", "must be >= 2")
        _need(p["t_end"] is None or p["t_end"] > 0, "t-end", "must be positive")
        _need(p["t_end"] is not None or p["omega_r_hz"] > 0, "t-end", "required when omega-r-hz = 0")
    elif cmd == "readout":
        _need(p["dark_mean"] >= 0, "dark-mean", "must be non-negative")
        _need(p["bright_mean"] > p["dark_mean"], "bright-mean", "must exceed dark-mean")
        _need(0 <= p["leak"] < 1, "leak", "must be in [0, 1)")
        _need(p["shots"] >= 1, "shots", "must be >= 1")
    elif cmd == "init":
        _need(0 <= p["p_ground"] <= 1, "p-ground", "must be a probability")
        _need(0 <= p["p_dark"] <= 1 - p["p_ground"], "p-dark", "p-ground + p-dark must be <= 1")
        _need(p["cycles"] >= 1, "cycles", "must be >= 1")
        _need(p["shots"] >= 1, "shots", "must be >= 1")
    elif cmd == "cool":
        _need(p["n_ions"] >= 1, "n-ions", "must be >= 1")
        _need(p["p_init_spread"] >= 0, "p-init-spread", "must be non-negative")
        _need(p["acceptance_hz"] >= 0, "acceptance-hz", "must be non-negative")
        _need(p["steps"] >= 0, "steps", "must be non-negative")
        _need(p["n0"] >= 0, "n0", "must be non-negative")
        _need(p["chain_hz"] > 0, "chain-hz", "must be positive")
    elif cmd == "mixer":
        if not p["hardware_scale"]:
            _need(p["omega1_hz"] > p["omega_awg_hz"] > 0, "omega-awg-hz", "need omega1 > omega-awg > 0")
            _need(p["rate"] > 2 * (p["omega1_hz"] + 2 * p["omega_awg_hz"]), "rate",
                  "must exceed twice the upper mixing product")
            _need(p["duration"] * p["rate"] >= 2, "duration", "too short for the sample rate")
            if p["cutoff_hz"] is not None:
                _need(p["omega1_hz"] < p["cutoff_hz"] < p["omega1_hz"] + 2 * p["omega_awg_hz"],
                      "cutoff-hz", "must separate omega1 from omega1 + 2 omega-awg")


# --- runners -----------------------------------------------------------------

def _csv(header: list[str], columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(v if isinstance(v, str) else repr(float(v)) if not isinstance(v, (int, np.integer)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _run_terms(p, seed, fmt):
    valence = [(l, 0.5) for l in p["orbitals"]]
    terms = sorted(atomic.term_symbols(valence), key=lambda t: (t.S.twice, t.L.twice, t.J.twice))
    rows = []
    for t in terms:
        row = {"ascii": t.ascii, "unicode": t.unicode, "S": str(t.S), "L": str(t.L), "J": str(t.J)}
        if p["Z"] is not None:
            e = atomic.spin_orbit_energy(p["Z"], p["n"], t.L, t.S, t.J)
            row.update(energy_j=e, energy_ev=e / const.E_CHARGE)
        rows.append(row)
    if fmt == "csv":
        cols = ["ascii", "unicode", "S", "L", "J"] + (["energy_j", "energy_ev"] if p["Z"] else [])
        return _csv(cols, [[r[c] for r in rows] for c in cols]), {}
    return json.dumps({"terms": rows, "count": len(rows)}, indent=2, ensure_ascii=False) + "\n", {}


def _run_trap(p, seed, fmt):
    cfg = paul_trap.TrapConfig(p["epsilon"], 2 * math.pi * p["omega_hz"], p["x0"], p["theta0"])
    t_end = p["t_end"] if p["t_end"] is not None else 3 * paul_trap.secular_period(cfg)
    x, y = paul_trap.trajectory_xy(cfg, p["phase_diff"] or 0.0, t_end, p["samples"])
    dev = None
    summary = {}
    if p["oracle"]:
        traj = paul_trap.integrate_equation_of_motion(
            cfg, paul_trap.closed_form_position(cfg, 0.0), paul_trap.closed_form_velocity(cfg, 0.0),
            t_end, samples=p["samples"])
        dev = traj.positions - x.positions
        summary["max_deviation_over_x0"] = float(np.max(np.abs(dev)) / cfg.x0)
    y = y if p["phase_diff"] is not None else None
    if fmt == "json":
        doc = {"t_s": x.times.tolist(), "x_m": x.positions.tolist(), **summary}
        if y is not None:
            doc["y_m"] = y.positions.tolist()
        if dev is not None:
            doc["deviation_m"] = dev.tolist()
        return json.dumps(doc) + "\n", summary
    return paul_trap.to_csv(x, y, dev), summary


def _run_rabi(p, seed, fmt):
    params = qubit.QubitParams(2 * math.pi * p["omega_l_hz"], 2 * math.pi * p["omega_r_hz"])
    t_end = p["t_end"] if p["t_end"] is not None else 2 * math.pi / params.omega_r
    curves = qubit.rabi_curves(params, p["theta0"], np.linspace(0, t_end, p["samples"]), p["mode"])
    cols = ["t_s", "p0", "p1"] + [c for c in ("p1_rwa", "p1_full", "abs_diff") if c in curves]
    summary = {}
    if "abs_diff" in curves:
        summary["max_abs_diff"] = float(np.max(curves["abs_diff"]))
    if fmt == "json":
        return json.dumps({c: curves[c].tolist() for c in cols} | summary) + "\n", summary
    return _csv(cols, [curves[c] for c in cols]), summary


def _run_readout(p, seed, fmt):
    model = readout.ReadoutModel(p["bright_mean"], p["dark_mean"], p["leak"])
    h0 = readout.simulate_readout(0, model, p["shots"], seed)
    h1 = readout.simulate_readout(1, model, p["shots"], seed)
    th = readout.calibrate_threshold(h0, h1)
    # fidelity on fresh shots so the threshold is not scored on its own training data
    fid = readout.readout_fidelity(model, th.tau, p["shots"], (seed + 1) % 2**64)
    doc = {"histogram0": h0.to_dict(), "histogram1": h1.to_dict(), "threshold": th.tau,
           "threshold_degenerate": th.degenerate, **fid.to_dict()}
    return json.dumps(doc, indent=2) + "\n", {"threshold": th.tau, "f0": fid.f0, "f1": fid.f1}


def _run_init(p, seed, fmt):
    model = readout.InitModel(p["p_ground"], p["p_dark"], p["repump"])
    res = readout.simulate_initialization(p["start"], model, p["cycles"], seed, p["shots"])
    if fmt == "json":
        return json.dumps({"cycle": list(range(res.size)), "residual": res.tolist()}) + "\n", {}
    return _csv(["cycle", "residual"], [range(res.size), res]), {}


def _run_cool(p, seed, fmt):
    if p["mode"] == "sideband":
        wl, wc = 2 * math.pi * const.QUBIT_FREQ_HZ, 2 * math.pi * p["chain_hz"]
        ledgers: list = []
        path = cooling.cool_to_ground(p["n0"], wl, wc, ledgers)
        e_chain = [cooling.chain_energy(s.n_phonon, wc) for s in path]
        summary = {"ledger_balanced": all(l.balanced() for l in ledgers)}
        if fmt == "json":
            return json.dumps({"states": [str(s) for s in path], "e_chain_j": e_chain, **summary}) + "\n", summary
        return _csv(["step", "internal", "n_phonon", "e_chain_j"],
                    [range(len(path)), [s.internal for s in path], [s.n_phonon for s in path], e_chain]), summary
    p_ph = cooling.photon_momentum(const.COOLING_WAVELENGTH_M)
    w0 = 2 * math.pi * const.C / const.COOLING_WAVELENGTH_M
    det, acc = 2 * math.pi * p["detuning_hz"], 2 * math.pi * p["acceptance_hz"]
    beams = (cooling.DopplerBeam(-1, p_ph, det, acc), cooling.DopplerBeam(+1, p_ph, det, acc))
    half = make_rng(seed, 1).normal(0.0, p["p_init_spread"], size=(p["n_ions"] + 1) // 2)
    momenta = np.concatenate([half, -half])[: p["n_ions"]]
    run = cooling.doppler_cool(momenta, beams, w0, p["steps"], seed)
    summary = {"absorptions": run.absorptions, "ledger_total": run.ledger.total()}
    if fmt == "json":
        return json.dumps({"mean_ke_j": run.mean_ke.tolist(), **summary}) + "\n", summary
    return _csv(["step", "mean_ke_j"], [range(run.mean_ke.size), run.mean_ke]), summary


def _state_json(s: cz_gate.CompositeState) -> list:
    return [{"ket": ket, "amplitude": [a.real + 0.0, a.imag + 0.0]} for a, ket in s.terms()]


def _run_cz(p, seed, fmt):
    doc: dict = {"input": p["input"]}
    if p["input"] == "bell-demo":
        # CNOT from CZ: |+>|g> -> (|gg> + |ee>)/sqrt(2)
        start = cz_gate.CompositeState.from_computational(np.array([1, 0, 1, 0]) / math.sqrt(2))
        h1 = cz_gate.target_hadamard(start)
        hist = cz_gate.run_sequence(h1)
        final = cz_gate.target_hadamard(hist[-1])
        labels = ["input", "hadamard on ion 2", "red pi on ion 1", "aux 2pi on ion 2",
                  "red pi on ion 1", "hadamard on ion 2"]
        states = [start, *hist, final]
    else:
        start = cz_gate.CompositeState.basis(int(p["input"][0]), int(p["input"][1]))
        states = cz_gate.run_sequence(start)
        labels = ["input", "red pi on ion 1", "aux 2pi on ion 2", "red pi on ion 1"]
        final = cz_gate.cirac_zoller(start)
    doc["output"] = _state_json(final)
    doc["output_text"] = str(final)
    if p["show_steps"]:
        doc["steps"] = [{"after": lab, "state": _state_json(s), "text": str(s)} for lab, s in zip(labels, states)]
    if p["matrix"]:
        doc["matrix"] = cz_gate.matrix_to_json(cz_gate.extract_gate_matrix(cz_gate.cirac_zoller))
    return json.dumps(doc, indent=2) + "\n", {}


def _run_mixer(p, seed, fmt):
    if p["hardware_scale"]:
        w1, wa = signal_chain.HW_OMEGA_1, signal_chain.HW_OMEGA_AWG
        duration, rate = 1e-6, 20.48e9
    else:
        w1, wa = 2 * math.pi * p["omega1_hz"], 2 * math.pi * p["omega_awg_hz"]
        duration, rate = p["duration"], p["rate"]
    env = signal_chain.Envelope()
    if p["envelope"] == "gauss":
        env = signal_chain.Envelope("gauss", center=duration / 2, sigma=duration / 10)
    cfg = signal_chain.MixConfig(wa, w1, p["phi"], env)
    chk = signal_chain.verify_envelope(cfg, duration, rate, p["cutoff_hz"])
    summary = chk.summary()
    if fmt == "json":
        return json.dumps(summary, indent=2) + "\n", summary
    return chk.to_csv(), summary


def _run_golden(p, seed, fmt):
    checks = [c.to_dict() for c in golden.golden_suite(p["filter"])]
    doc = {"passed": all(c["passed"] for c in checks), "checks": checks}
    return json.dumps(doc, indent=2) + "\n", {"golden": checks}


RUNNERS = {"terms": _run_terms, "trap": _run_trap, "rabi": _run_rabi, "readout": _run_readout,
           "init": _run_init, "cool": _run_cool, "cz": _run_cz, "mixer": _run_mixer, "golden": _run_golden}


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary sibling and rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_scenario(cfg: ScenarioConfig, stdout=None) -> RunReport:
    """Dispatch to the owning module and emit its output."""
    stdout = sys.stdout if stdout is None else stdout
    started = time.perf_counter()
    try:
        text, summary = RUNNERS[cfg.subcommand](cfg.params, cfg.seed, cfg.format)
    except PreconditionError as exc:
        raise PreconditionError(f"{cfg.subcommand}: {exc}") from exc
    scenario = {"subcommand": cfg.subcommand, "seed": cfg.seed, "format": cfg.format,
                "params": {k: v for k, v in cfg.params.items()}}
    report = RunReport(scenario)
    digest = hashlib.sha256(text.encode()).hexdigest()
    if cfg.output is not None:
        write_atomic(cfg.output, text)
        report.outputs[str(cfg.output)] = digest
    else:
        stdout.write(text)
        report.outputs["<stdout>"] = digest
    if cfg.subcommand == "mixer" and cfg.format == "csv":
        # the CSV carries the waveform; the scalar summary goes alongside it
        side = stdout if cfg.output is not None else sys.stderr
        side.write(json.dumps(summary) + "\n")
    report.golden = summary.pop("golden", [])
    report.scenario["summary"] = summary
    report.wall_time_s = time.perf_counter() - started
    if cfg.report is not None:
        write_atomic(cfg.report, json.dumps(report.to_dict(), indent=2, default=str) + "\n")
    return report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv[:1] == ["--version"]:
        print(f"ionsim {__version__}\nrng: {GENERATOR_ID}")
        return EXIT_OK
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigPrecondition as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        report = run_scenario(cfg)
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001
        print(f"internal error in {cfg.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if cfg.subcommand == "golden" and not report.passed:
        failed = [f"{c['module']}: {c['name']}" for c in report.golden if not c["passed"]]
        print("golden failures:\n  " + "\n  ".join(failed), file=sys.stderr)
        return EXIT_GOLDEN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
