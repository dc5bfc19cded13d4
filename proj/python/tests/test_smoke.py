import math
import os

import numpy as np
import pytest

import microlocal as ml


def test_zero_signal_has_zero_norm():
    r = ml.norm(np.zeros(256), ml.SpaceParams(s=0.2, sprime=0.5, sigma=0.1))
    assert r["value"] == 0.0


def test_phi_round_trip():
    f = ml.band_limited_noise(8, seed=3)
    g = ml.phi_synthesis(ml.phi_analysis(f))
    assert np.linalg.norm(g - f) / np.linalg.norm(f) < 1e-8


def test_wavelet_round_trip():
    f = ml.cusp(9)
    c0, levels = ml.wavelet_analysis(f, r=4)
    assert len(levels) == 10
    g = ml.wavelet_synthesis(c0, levels, r=4)
    assert np.max(np.abs(g - f)) < 1e-10


def test_norm_equivalence_is_close():
    f = ml.band_limited_noise(9, seed=5, max_freq=24)
    p = ml.SpaceParams(family=ml.Family.F, s=0.2, sprime=0.5, sigma=0.2, x0=0.3)
    e = ml.equivalence(f, p)
    for key in ("log_phi_over_function", "log_wavelet_over_function"):
        assert abs(e[key]) < 3.0
    assert math.isclose(e["function"], ml.norm(f, p)["value"], rel_tol=1e-12)


def test_sequence_norm_matches_phi_coefficients():
    f = ml.weierstrass(8)
    p = ml.SpaceParams(tilde=True, sprime=0.3, sigma=0.2, p=ml.INF, q=ml.INF, x0=0.5)
    r = ml.sequence_norm(ml.phi_analysis(f), p)
    assert r["value"] > 0 and len(r["witness_P"]) == 2


def test_hilbert_is_an_isometry_on_mean_zero_signals():
    f = ml.band_limited_noise(8, seed=9)
    assert np.isclose(np.linalg.norm(ml.hilbert(f)), np.linalg.norm(f))
    g = ml.bessel_potential(ml.bessel_potential(f, 1.0), -1.0)
    assert np.max(np.abs(g - f)) < 1e-10


def test_difference_norms_are_positive():
    f = ml.band_limited_noise(9, seed=2)
    d = ml.difference_norms(f, ml.SpaceParams(s=0.1, sprime=0.3, sigma=0.1, x0=0.5))
    assert all(d[k] > 0 for k in ("lhs", "sup_difference", "oscillation", "mean_difference"))


def test_frontier_cells():
    cells = ml.frontier_scan(ml.cusp(9), 0.5, [0.25, 0.75], [0.0])
    assert [c["finite"] for c in cells] == [True, False]


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        ml.norm(np.zeros(100), ml.SpaceParams())
    with pytest.raises(ValueError):
        ml.SpaceParams(p=0.0)
    with pytest.raises(ValueError):
        ml.run_suite("nope")


def test_degeneracy_suite_passes():
    rep = ml.run_suite("degeneracy")
    assert rep["passed"]


@pytest.mark.skipif("MICROLOCAL_CALIBRATION" not in os.environ, reason="calibration file not provided")
def test_equivalence_suite_against_calibration():
    rep = ml.run_suite("equivalence", os.environ["MICROLOCAL_CALIBRATION"])
    assert rep["passed"] and rep["checks"]
