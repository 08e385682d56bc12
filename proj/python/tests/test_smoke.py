import math
import os

import numpy as np
import pytest

import spikevib

SOURCE = os.environ.get("SPIKEVIB_SOURCE_DIR", os.path.join(os.path.dirname(__file__), "..", ".."))
SYNTHETIC = os.path.join(SOURCE, "configs", "synthetic.toml")


def test_center_frequencies_geometric():
    f = spikevib.center_frequencies(16, 20.0, 2000.0)
    assert len(f) == 16
    assert f[0] == pytest.approx(20.0)
    assert f[-1] == pytest.approx(2000.0)
    ratios = np.diff(np.log(f))
    assert np.allclose(ratios, ratios[0])


def test_unity_gain_at_center():
    for fc in (100.0, 1000.0, 5000.0):
        assert spikevib.channel_magnitude(fc, 20000.0, fc) == pytest.approx(1.0, abs=0.01)


def test_gammatone_envelope_peak():
    b = 100.0
    assert spikevib.gammatone(1000.0, b, 0.0) == 0.0
    assert abs(spikevib.gammatone(1000.0, b, 3.0 / (2.0 * math.pi * b))) > 0.0


def test_config_loads_and_rejects_unknown():
    cfg = spikevib.PipelineConfig(SYNTHETIC)
    assert cfg.n_channels == 16
    assert cfg.t_adapt == 2.0
    assert spikevib.PipelineConfig(SYNTHETIC).hash() == cfg.hash()
    with pytest.raises(spikevib.Error):
        spikevib.PipelineConfig(SYNTHETIC, ["encoder.no_such_key=1"])


def test_filterbank_shape_and_zero_input():
    cfg = spikevib.PipelineConfig(SYNTHETIC)
    y = spikevib.filterbank(np.zeros(1000), 20000.0, cfg)
    assert y.shape == (16, 1000)
    assert not y.any()


def test_pipeline_detects_burst():
    cfg = spikevib.PipelineConfig(SYNTHETIC)
    comps = [(50.0, 1.0), (300.0, 0.5), (1200.0, 0.3)]
    x = spikevib.synth(10.0, 20000.0, comps, noise_std=1.0, seed=1, burst_gain=3.0, burst_onset=5.0)
    assert len(x) == 200000
    times, channels = spikevib.encode(x, 20000.0, cfg)
    assert len(times) == len(channels) > 0
    assert np.all(np.diff(times) >= 0)

    head = times < 5.0
    tuned = spikevib.tune(times[head], channels[head], 5.0, cfg)
    assert tuned["w_ho"] > 0 and tuned["tau_c"] > 0

    out = spikevib.simulate(times, channels, 10.0, tuned["w_ho"], tuned["tau_c"], cfg)
    assert out["first_spike"] is not None
    assert 5.0 <= out["first_spike"] <= 6.0


def test_poisson_regeneration_deterministic():
    t = np.arange(0.0, 1.0, 0.01)
    c = np.zeros(len(t), dtype=np.uint32)
    a = spikevib.regenerate_poisson(t, c, 1.0, 0.1, 5)
    b = spikevib.regenerate_poisson(t, c, 1.0, 0.1, 5)
    assert np.array_equal(a[0], b[0])


def test_detection_datapoint():
    assert spikevib.detection_datapoint(555.0) == 542
    assert spikevib.detection_datapoint(556.032) == 544
