"""AWG I/Q generation, I-Q mixer up-conversion and low-pass filtering.

The AWG produces

    I(t) = -2 s(t) cos(phi) sin(w_awg t)
    Q(t) =  2 s(t) sin(phi) sin(w_awg t)

and the mixer multiplies I by the LO ``cos((w1 + w_awg) t)`` and Q by the
same LO shifted by -pi/2. After the mixer the signal holds a line at ``w1``
and one at ``w1 + 2 w_awg``; removing the upper line leaves
``s(t) sin(w1 t + phi)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import hilbert

from ionsim.errors import PreconditionError

EDGE_GUARD = 0.05

# desk-scale frequencies, same ratio as 5 GHz / 50 MHz
DESK_OMEGA_1 = 2 * math.pi * 500e3
DESK_OMEGA_AWG = 2 * math.pi * 5e3
HW_OMEGA_1 = 2 * math.pi * 5e9
HW_OMEGA_AWG = 2 * math.pi * 50e6


@dataclass(frozen=True)
class Envelope:
    """Pulse envelope s(t): ``const``, ``gauss`` or ``table`` (linear interpolation)."""

    kind: str = "const"
    amplitude: float = 1.0
    center: float = 0.0
    sigma: float = 1.0
    table_t: tuple = ()
    table_s: tuple = ()

    def __post_init__(self):
        if self.kind not in ("const", "gauss", "table"):
            raise PreconditionError(f"unknown envelope kind {self.kind!r}")
        if self.kind == "gauss" and not self.sigma > 0:
            raise PreconditionError("gaussian envelope needs sigma > 0")
        if self.kind == "table" and (len(self.table_t) < 2 or len(self.table_t) != len(self.table_s)):
            raise PreconditionError("table envelope needs matching t/s arrays of length >= 2")

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "const":
            return np.full_like(t, self.amplitude)
        if self.kind == "gauss":
            return self.amplitude * np.exp(-0.5 * ((t - self.center) / self.sigma) ** 2)
        return np.interp(t, self.table_t, self.table_s)


@dataclass(frozen=True)
class MixConfig:
    omega_awg: float
    omega_1: float
    phi: float = 0.0
    envelope: Envelope = field(default_factory=Envelope)

    def __post_init__(self):
        if not self.omega_1 > self.omega_awg > 0:
            raise PreconditionError(
                f"need omega_1 > omega_awg > 0, got {self.omega_1}, {self.omega_awg}"
            )

    @property
    def lo_omega(self) -> float:
        return self.omega_1 + self.omega_awg

    @property
    def band_hz(self) -> tuple[float, float]:
        """Frequencies (Hz) a separating low-pass cutoff must lie between."""
        return self.omega_1 / (2 * math.pi), (self.omega_1 + 2 * self.omega_awg) / (2 * math.pi)


@dataclass(frozen=True)
class SampledSignal:
    sample_rate: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise PreconditionError("sample_rate must be positive")
        arr = np.asarray(self.samples, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """One-sided frequencies (Hz) and amplitudes normalised so a unit sine reads 1."""
        n = self.samples.size
        amp = np.abs(np.fft.rfft(self.samples)) * 2 / n
        amp[0] /= 2
        if n % 2 == 0:
            amp[-1] /= 2
        return np.fft.rfftfreq(n, 1 / self.sample_rate), amp


def _nyquist_guard(sample_rate: float, max_omega: float, what: str):
    if not sample_rate > 2 * max_omega / (2 * math.pi):
        raise PreconditionError(
            f"sample rate {sample_rate:g} Hz cannot carry {what} at {max_omega / (2 * math.pi):g} Hz"
        )


def _grid(duration: float, sample_rate: float) -> np.ndarray:
    n = int(round(duration * sample_rate))
    if n < 2:
        raise PreconditionError("duration too short for the sample rate")
    return np.arange(n) / sample_rate


def generate_iq(cfg: MixConfig, duration: float, sample_rate: float) -> tuple[SampledSignal, SampledSignal]:
    _nyquist_guard(sample_rate, cfg.omega_awg, "the AWG tone")
    t = _grid(duration, sample_rate)
    carrier = 2 * cfg.envelope(t) * np.sin(cfg.omega_awg * t)
    i_sig = -math.cos(cfg.phi) * carrier
    q_sig = math.sin(cfg.phi) * carrier
    return SampledSignal(sample_rate, i_sig), SampledSignal(sample_rate, q_sig)


def upconvert_mix(i: SampledSignal, q: SampledSignal, cfg: MixConfig) -> SampledSignal:
    """I times the LO plus Q times the LO delayed by a quarter period (-pi/2)."""
    if i.sample_rate != q.sample_rate or i.samples.shape != q.samples.shape:
        raise PreconditionError("I and Q must share sample rate and length")
    _nyquist_guard(i.sample_rate, cfg.omega_1 + 2 * cfg.omega_awg, "the upper mixing product")
    t = i.times
    lo = cfg.lo_omega * t
    return SampledSignal(i.sample_rate, i.samples * np.cos(lo) + q.samples * np.cos(lo - math.pi / 2))


def lowpass(signal: SampledSignal, cutoff: float, band: tuple[float, float] | None = None) -> SampledSignal:
    """Ideal brick-wall filter: zero every FFT bin above ``cutoff`` (Hz).

    With ``band`` given, the cutoff must fall strictly inside it.
    """
    if band is not None and not band[0] < cutoff < band[1]:
        raise PreconditionError(f"cutoff {cutoff:g} Hz is outside the separating band {band}")
    if not 0 < cutoff < signal.sample_rate / 2:
        raise PreconditionError(f"cutoff {cutoff:g} Hz must be in (0, Nyquist)")
    spec = np.fft.rfft(signal.samples)
    freqs = np.fft.rfftfreq(signal.samples.size, 1 / signal.sample_rate)
    spec[freqs > cutoff] = 0
    return SampledSignal(signal.sample_rate, np.fft.irfft(spec, n=signal.samples.size))


def interior(n: int, guard: float = EDGE_GUARD) -> slice:
    k = int(math.ceil(guard * n))
    return slice(k, n - k)


@dataclass(frozen=True)
class EnvelopeCheck:
    max_error: float
    peak: float
    recovered_phi: float
    envelope_rms_error: float
    times: np.ndarray = field(repr=False)
    vg: np.ndarray = field(repr=False)
    filtered: np.ndarray = field(repr=False)
    target: np.ndarray = field(repr=False)

    @property
    def relative_error(self) -> float:
        return self.max_error / self.peak

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_s", "vg", "target", "error"])
        for row in zip(self.times, self.filtered, self.target, self.filtered - self.target):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"max_error": self.max_error, "peak": self.peak,
                "relative_error": self.relative_error, "recovered_phi": self.recovered_phi,
                "envelope_rms_error": self.envelope_rms_error}


def recover_phase(filtered: np.ndarray, envelope: np.ndarray, omega_1: float, t: np.ndarray) -> float:
    """Least-squares fit of ``a s sin(w1 t) + b s cos(w1 t)``; phase is ``atan2(b, a)``."""
    basis = np.stack([envelope * np.sin(omega_1 * t), envelope * np.cos(omega_1 * t)], axis=1)
    (a, b), *_ = np.linalg.lstsq(basis, filtered, rcond=None)
    return math.atan2(b, a)


def verify_envelope(cfg: MixConfig, duration: float, sample_rate: float,
                    cutoff: float | None = None) -> EnvelopeCheck:
    """Run I/Q -> mixer -> low-pass and compare against ``s(t) sin(w1 t + phi)``.

    Metrics skip the first and last 5% of the record.
    """
    if cutoff is None:
        cutoff = 0.5 * sum(cfg.band_hz)
    i, q = generate_iq(cfg, duration, sample_rate)
    vg = upconvert_mix(i, q, cfg)
    out = lowpass(vg, cutoff, cfg.band_hz)
    t = vg.times
    s = cfg.envelope(t)
    target = s * np.sin(cfg.omega_1 * t + cfg.phi)
    sl = interior(t.size)
    peak = float(np.max(np.abs(s[sl])))
    err = float(np.max(np.abs(out.samples[sl] - target[sl])))
    phi = recover_phase(out.samples[sl], s[sl], cfg.omega_1, t[sl])
    env = np.abs(hilbert(out.samples))
    env_rms = float(np.sqrt(np.mean((env[sl] - s[sl]) ** 2)) / peak)
    return EnvelopeCheck(err, peak, phi, env_rms, t, vg.samples, out.samples, target)


def spectral_lines(signal: SampledSignal, rel_threshold: float = 1e-6) -> np.ndarray:
    """Frequencies (Hz) of spectral bins above ``rel_threshold`` of the strongest one."""
    f, a = signal.spectrum()
    return f[a > rel_threshold * a.max()]
