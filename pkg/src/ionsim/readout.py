"""Fluorescence readout and optical-pumping initialization, by Monte Carlo."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ionsim import constants as const
from ionsim.errors import PreconditionError
from ionsim.rng import make_rng

# substream indices
_STREAM_DARK = 0
_STREAM_BRIGHT = 1
_STREAM_INIT = 2


@dataclass(frozen=True)
class ReadoutModel:
    bright_mean: float = 10.0
    dark_mean: float = 0.1
    leak_per_scatter: float = 0.0

    def __post_init__(self):
        if not self.bright_mean > self.dark_mean >= 0:
            raise PreconditionError(
                f"need bright_mean > dark_mean >= 0, got {self.bright_mean}, {self.dark_mean}"
            )
        if not 0 <= self.leak_per_scatter < 1:
            raise PreconditionError(f"leak_per_scatter must be in [0, 1), got {self.leak_per_scatter}")


@dataclass(frozen=True)
class InitModel:
    p_to_ground: float = 1 / 3
    p_dark_state: float = 0.0
    repump: bool = True

    def __post_init__(self):
        if self.p_to_ground < 0 or self.p_dark_state < 0 or self.p_to_ground + self.p_dark_state > 1:
            raise PreconditionError(
                f"branching ratios {self.p_to_ground}, {self.p_dark_state} are not a valid split"
            )


@dataclass(frozen=True)
class PhotonHistogram:
    counts: dict[int, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("histogram occurrences do not sum to shots")

    @classmethod
    def from_samples(cls, samples) -> "PhotonHistogram":
        samples = np.asarray(samples, dtype=np.int64)
        return cls(dict(sorted(Counter(samples.tolist()).items())), int(samples.size))

    @property
    def max_count(self) -> int:
        return max(self.counts) if self.counts else 0

    def pmf(self, size: int | None = None) -> np.ndarray:
        size = self.max_count + 1 if size is None else size
        p = np.zeros(size)
        for n, k in self.counts.items():
            if n < size:
                p[n] = k
        return p / self.shots

    def frac_at_least(self, tau: int) -> float:
        return sum(k for n, k in self.counts.items() if n >= tau) / self.shots

    def mean(self) -> float:
        return sum(n * k for n, k in self.counts.items()) / self.shots

    def variance(self) -> float:
        m = self.mean()
        return sum(k * (n - m) ** 2 for n, k in self.counts.items()) / self.shots

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": {str(n): k for n, k in self.counts.items()}}


def _bright_counts(model: ReadoutModel, shots: int, rng: np.random.Generator) -> np.ndarray:
    # Would-be count first so that runs differing only in leak share it.
    would_be = rng.poisson(model.bright_mean, size=shots)
    if model.leak_per_scatter == 0:
        return would_be
    # scattering events completed before the first leak
    before_leak = rng.geometric(model.leak_per_scatter, size=shots) - 1
    return np.minimum(would_be, before_leak)


def sample_counts(true_state: int, model: ReadoutModel, shots: int, seed: int) -> np.ndarray:
    if shots < 1:
        raise PreconditionError(f"shots must be >= 1, got {shots}")
    if true_state == 0:
        return make_rng(seed, _STREAM_DARK).poisson(model.dark_mean, size=shots)
    if true_state == 1:
        return _bright_counts(model, shots, make_rng(seed, _STREAM_BRIGHT))
    raise PreconditionError(f"true_state must be 0 or 1, got {true_state!r}")


def simulate_readout(true_state: int, model: ReadoutModel, shots: int, seed: int) -> PhotonHistogram:
    """Photon-count histogram for ``shots`` detection windows.

    A dark ion (``|0>``) shows Poisson background. A bright ion (``|1>``)
    would scatter ``Poisson(bright_mean)`` photons, but every scattering event
    independently leaves the cycling transition with probability
    ``leak_per_scatter``, after which it goes dark.
    """
    return PhotonHistogram.from_samples(sample_counts(true_state, model, shots, seed))


def expected_bright_mean(model: ReadoutModel, n_max: int | None = None) -> float:
    """Exact mean of the leak-truncated bright count: sum_n P(K >= n) (1 - leak)^n."""
    from scipy.stats import poisson

    if n_max is None:
        n_max = int(model.bright_mean + 20 * math.sqrt(model.bright_mean) + 50)
    n = np.arange(1, n_max + 1)
    return float(np.sum(poisson.sf(n - 1, model.bright_mean) * (1 - model.leak_per_scatter) ** n))


@dataclass(frozen=True)
class Threshold:
    tau: int
    error: float
    degenerate: bool = False
    errors: np.ndarray = field(default=None, repr=False, compare=False)


def threshold_errors(hist0: PhotonHistogram, hist1: PhotonHistogram) -> np.ndarray:
    """Empirical P(n >= tau | 0) + P(n < tau | 1) for tau = 0 .. max count + 1."""
    size = max(hist0.max_count, hist1.max_count) + 2
    p0, p1 = hist0.pmf(size), hist1.pmf(size)
    false_bright = 1.0 - np.concatenate(([0.0], np.cumsum(p0)[:-1]))
    false_dark = np.concatenate(([0.0], np.cumsum(p1)[:-1]))
    return false_bright + false_dark


def calibrate_threshold(hist0: PhotonHistogram, hist1: PhotonHistogram) -> Threshold:
    """Smallest tau minimising the summed misclassification; ``n >= tau`` means bright."""
    if hist0.shots < 1 or hist1.shots < 1:
        raise PreconditionError("histograms must be non-empty")
    errors = threshold_errors(hist0, hist1)
    # ties within float noise go to the smaller tau
    best = float(np.min(errors))
    tau = int(np.flatnonzero(errors <= best + 1e-12)[0])
    degenerate = np.array_equal(hist0.pmf(len(errors)), hist1.pmf(len(errors)))
    return Threshold(tau, float(errors[tau]), bool(degenerate), errors)


@dataclass(frozen=True)
class Fidelity:
    f0: float
    f1: float
    stderr0: float
    stderr1: float

    def to_dict(self) -> dict:
        return {"f0": self.f0, "f1": self.f1, "stderr": [self.stderr0, self.stderr1]}


def readout_fidelity(model: ReadoutModel, threshold: int, shots: int, seed: int) -> Fidelity:
    """Monte Carlo P(read 0 | prepared 0) and P(read 1 | prepared 1) with binomial errors."""
    if threshold < 0:
        raise PreconditionError(f"threshold must be >= 0, got {threshold}")
    n0 = sample_counts(0, model, shots, seed)
    n1 = sample_counts(1, model, shots, seed)
    f0 = float(np.mean(n0 < threshold))
    f1 = float(np.mean(n1 >= threshold))
    se = lambda f: math.sqrt(f * (1 - f) / shots)
    return Fidelity(f0, f1, se(f0), se(f1))


def simulate_initialization(start: int, model: InitModel, max_cycles: int, seed: int,
                            shots: int) -> np.ndarray:
    """Fraction of shots outside ``|0>`` after each pumping cycle.

    Element ``k`` is the residual after ``k`` cycles (element 0 is the
    starting population). ``|0>`` is absorbing. From ``|1>`` the ion is
    excited and decays to ``|0>`` with ``p_to_ground``, to the metastable
    dark state with ``p_dark_state`` (immediately repumped to ``|0>`` when
    ``repump`` is on, otherwise trapped), and otherwise back to ``|1>``.
    """
    if max_cycles < 1:
        raise PreconditionError(f"max_cycles must be >= 1, got {max_cycles}")
    if shots < 1:
        raise PreconditionError(f"shots must be >= 1, got {shots}")
    if start not in (0, 1):
        raise PreconditionError(f"start must be 0 or 1, got {start!r}")
    rng = make_rng(seed, _STREAM_INIT)
    state = np.full(shots, start, dtype=np.int8)  # 0, 1, or 2 (dark)
    residual = np.empty(max_cycles + 1)
    residual[0] = np.mean(state != 0)
    for k in range(1, max_cycles + 1):
        u = rng.random(shots)
        excited = state == 1
        to_ground = excited & (u < model.p_to_ground)
        to_dark = excited & (u >= model.p_to_ground) & (u < model.p_to_ground + model.p_dark_state)
        state[to_ground] = 0
        state[to_dark] = 0 if model.repump else 2
        residual[k] = np.mean(state != 0)
    return residual


def detuning_ratio() -> float:
    """Off-resonant gap (qubit + P1/2 hyperfine splitting) relative to the 369 nm line."""
    return (const.QUBIT_FREQ_HZ + const.P_HALF_HYPERFINE_HZ) / const.READOUT_FREQ_HZ
