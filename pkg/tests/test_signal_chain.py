import math

import numpy as np
import pytest

from ionsim import signal_chain as sc
from ionsim.errors import PreconditionError
from ionsim.signal_chain import Envelope, MixConfig

W1, WA = sc.DESK_OMEGA_1, sc.DESK_OMEGA_AWG
DURATION, RATE = 10e-3, 4e6
PHASES = np.linspace(-math.pi, math.pi, 8, endpoint=False) + 0.1
ENVELOPES = {
    "const": Envelope(),
    "gauss": Envelope("gauss", center=DURATION / 2, sigma=DURATION / 10),
}


def mixer_identity(cfg, t):
    """Product-to-sum expansion of the mixer output: lower line minus upper line."""
    s = cfg.envelope(t)
    return s * np.sin(cfg.omega_1 * t + cfg.phi) - s * np.sin((cfg.omega_1 + 2 * cfg.omega_awg) * t + cfg.phi)


@pytest.mark.parametrize("env", list(ENVELOPES))
@pytest.mark.parametrize("phi", PHASES)
def test_pipeline_recovers_target(env, phi):
    cfg = MixConfig(WA, W1, float(phi), ENVELOPES[env])
    chk = sc.verify_envelope(cfg, DURATION, RATE)
    assert chk.relative_error <= 1e-3
    assert math.remainder(chk.recovered_phi - phi, 2 * math.pi) == pytest.approx(0, abs=1e-6)


def test_mixer_output_matches_trig_identity():
    cfg = MixConfig(WA, W1, 0.7, ENVELOPES["gauss"])
    i, q = sc.generate_iq(cfg, DURATION, RATE)
    vg = sc.upconvert_mix(i, q, cfg)
    assert np.max(np.abs(vg.samples - mixer_identity(cfg, vg.times))) <= 1e-9


def test_two_spectral_lines():
    cfg = MixConfig(WA, W1, 0.3)
    i, q = sc.generate_iq(cfg, DURATION, RATE)
    vg = sc.upconvert_mix(i, q, cfg)
    lines = sc.spectral_lines(vg)
    assert list(np.round(lines)) == [500e3, 510e3]
    f, a = vg.spectrum()
    assert a[np.isin(f, lines)] == pytest.approx([1.0, 1.0], rel=1e-9)


def test_hardware_scale_lines():
    cfg = MixConfig(sc.HW_OMEGA_AWG, sc.HW_OMEGA_1, 0.7)
    i, q = sc.generate_iq(cfg, 1e-6, 20.48e9)
    lines = sc.spectral_lines(sc.upconvert_mix(i, q, cfg))
    assert list(np.round(lines)) == [5e9, 5.1e9]


def test_filtered_spectrum_purity():
    cfg = MixConfig(WA, W1, 0.3)
    i, q = sc.generate_iq(cfg, DURATION, RATE)
    out = sc.lowpass(sc.upconvert_mix(i, q, cfg), 505e3)
    f, a = out.spectrum()
    main = a[np.argmax(a)]
    assert f[np.argmax(a)] == pytest.approx(500e3)
    others = np.delete(a, np.argmax(a))
    assert 20 * np.log10(others.max() / main) < -60


def test_parseval_and_filter_energy():
    cfg = MixConfig(WA, W1, 1.1, ENVELOPES["const"])
    i, q = sc.generate_iq(cfg, DURATION, RATE)
    vg = sc.upconvert_mix(i, q, cfg)
    spec = np.fft.fft(vg.samples)
    assert np.sum(vg.samples**2) == pytest.approx(np.sum(np.abs(spec) ** 2) / vg.samples.size, rel=1e-10)
    out = sc.lowpass(vg, 505e3)
    # two equal lines: filtering keeps half the energy
    assert np.sum(out.samples**2) == pytest.approx(0.5 * np.sum(vg.samples**2), rel=1e-9)


def test_removed_line_is_the_upper_sideband():
    cfg = MixConfig(WA, W1, -0.4)
    i, q = sc.generate_iq(cfg, DURATION, RATE)
    vg = sc.upconvert_mix(i, q, cfg)
    residual = vg.samples - sc.lowpass(vg, 505e3).samples
    upper = -np.sin((W1 + 2 * WA) * vg.times - 0.4)
    assert np.max(np.abs(residual - upper)) <= 1e-9


def test_cutoff_outside_band_rejected():
    cfg = MixConfig(WA, W1, 0.0)
    with pytest.raises(PreconditionError):
        sc.verify_envelope(cfg, DURATION, RATE, cutoff=495e3)
    with pytest.raises(PreconditionError):
        sc.verify_envelope(cfg, DURATION, RATE, cutoff=515e3)


def test_small_awg_frequency_needs_a_tight_cutoff():
    # lines 200 Hz apart: a mid-band cutoff still separates them, one outside does not
    cfg = MixConfig(2 * math.pi * 100.0, W1, 0.2)
    assert sc.verify_envelope(cfg, 0.1, RATE).relative_error <= 1e-3
    i, q = sc.generate_iq(cfg, 0.1, RATE)
    leaky = sc.lowpass(sc.upconvert_mix(i, q, cfg), 600e3)
    t = leaky.times
    target = np.sin(W1 * t + 0.2)
    assert np.max(np.abs(leaky.samples - target)) > 0.5


def test_nyquist_and_config_guards():
    with pytest.raises(PreconditionError):
        MixConfig(W1, WA)
    cfg = MixConfig(WA, W1, 0.0)
    i, q = sc.generate_iq(cfg, DURATION, 1e6)  # fine for the 5 kHz AWG tone
    with pytest.raises(PreconditionError):
        sc.upconvert_mix(i, q, cfg)  # but not for the 510 kHz product
    with pytest.raises(PreconditionError):
        sc.generate_iq(cfg, 1e-9, RATE)
    with pytest.raises(PreconditionError):
        Envelope("gauss", sigma=0.0)
    with pytest.raises(PreconditionError):
        Envelope("triangle")


def test_table_envelope_interpolates():
    env = Envelope("table", table_t=(0.0, 1.0), table_s=(0.0, 2.0))
    assert env(np.array([0.5]))[0] == pytest.approx(1.0)


def test_csv_and_summary():
    chk = sc.verify_envelope(MixConfig(WA, W1, 0.5), 1e-3, RATE)
    lines = chk.to_csv().splitlines()
    assert lines[0] == "t_s,vg,target,error" and len(lines) == 4001
    assert set(chk.summary()) >= {"max_error", "recovered_phi"}
