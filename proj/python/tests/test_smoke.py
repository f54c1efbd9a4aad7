import math

import numpy as np
import pytest

import jmgt


def test_version():
    assert jmgt.__version__ == "0.1.0"


def test_reference_thresholds():
    th = jmgt.thresholds(jmgt.ModelParams(1.0, 1.0))
    a_large = (-26.0 + math.sqrt(1700.0)) / 64.0
    assert th.N0_raw == pytest.approx(math.sqrt(a_large), rel=1e-12)
    assert th.N0 == pytest.approx(1.1 * th.N0_raw, rel=1e-14)


def test_roots_satisfy_the_cubic():
    p = jmgt.ModelParams(2.0, 0.5, 2.0, 0.75)
    r = jmgt.characteristic_roots(3.0, p)
    for mu in (r.mu1, r.mu2, r.mu3):
        assert jmgt.cubic_residual(mu, 3.0, p) < 1e-10 * (1 + abs(mu) ** 3)
    assert r.regime == jmgt.Regime.large_freq
    assert r.mu3 == r.mu2.conjugate()


def test_kernel_identity_at_zero():
    k = jmgt.kernel_eval(0.0, 1.5, jmgt.ModelParams(1.0, 1.0))
    assert np.allclose(k, np.eye(3))


def test_linear_propagation_shape_and_start():
    g = jmgt.FrequencyGrid(1, 16)
    rng = np.random.default_rng(0)
    w = [rng.normal(size=16) + 1j * rng.normal(size=16) for _ in range(3)]
    out = jmgt.propagate_dt(g, *w, jmgt.ModelParams(1.0, 1.0), [0.0, 0.5, 1.0])
    assert out.shape == (3, 16)
    assert np.allclose(out[0], w[1])
    assert jmgt.sobolev_hom_norm(g, out[2], 0.0) < jmgt.sobolev_hom_norm(g, out[0], 0.0)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        jmgt.ModelParams(-1.0, 1.0)
    with pytest.raises(ValueError):
        jmgt.run_experiment("roots", {"bogus": "1"})


def test_roots_scenario(tmp_path):
    r = jmgt.run_experiment("roots", {"sweep": "0.1:10:20", "output": str(tmp_path)})
    assert r["exit_code"] == 0
    assert r["results"]["rows"] == 20
    assert (tmp_path / "roots.csv").exists()
    assert "roots" in jmgt.scenarios()


def test_decay_exponent():
    assert jmgt.linear_decay_exponent(1, 1.0, 0.0, 1.0) == pytest.approx(-0.75)
