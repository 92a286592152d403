import math

import pytest

import exo


def test_free_group_spheres():
    f2 = exo.free_group(2)
    assert [len(f2.sphere(k)) for k in range(1, 6)] == [4 * 3 ** (k - 1) for k in range(1, 6)]
    assert f2.sphere(1) == ["a", "A", "b", "B"]


def test_model_round_trip_keeps_digest():
    m = exo.free_action(2, 8, 3)
    assert exo.load_model(m.to_dict()).digest == m.digest


def test_convolution_and_norms():
    z = exo.free_group(1)
    f = exo.Function.sphere(z, 1)
    h = f.star() * f
    assert h.support_size() == 3
    assert exo.lp_norm(h, 2) == pytest.approx(math.sqrt(6))
    seq = exo.power_sequence_norm(f, 2)
    assert seq["entries"][0]["value"] == pytest.approx(70 ** 0.125, rel=1e-12)


def test_delta_and_overlap():
    f2 = exo.free_group(2)
    assert exo.hyperbolicity_delta(f2, 3)["delta"] == 0
    assert exo.overlap_constant(f2, 0) == 5


def test_kernels():
    f2 = exo.free_group(2)
    assert exo.psd_check(f2, {"exp_length": 0.7}, 2)["pass"]
    assert exo.matrix_coeff_recovery(f2, {"haagerup": 3}, 0, "a b", 2) == pytest.approx(math.exp(-2 / 3))
    assert exo.haagerup_witness_check(f2, [1, 2], [0, 2], [0.1])["pass"]


def test_reduced_norm_and_bound():
    f2 = exo.free_group(2)
    est = exo.reduced_norm(exo.Function.sphere(f2, 1), 6)
    assert est["monotone"]
    assert 3.0 < est["value"] < 2 * math.sqrt(3)
    assert exo.verify_norm_bound(f2, 0.5, 2, 4.0, 5)["pass"]


def test_certificate():
    f2 = exo.free_group(2)
    assert exo.extension_criteria(f2, 0.65, 6.0)["verdict"] == "Extends"
    band = exo.threshold_band(f2, 2.0, 4.0)
    assert band["lower"] == pytest.approx(3 ** -0.5, abs=1e-12)
    assert band["upper"] == pytest.approx(3 ** -0.25, abs=1e-12)
    assert exo.certificate(f2, 2.0, 6.0, 0.65)["verdict"] == "Certified"
    assert exo.certificate(f2, 2.0, 6.0, 0.5)["verdict"] == "Inconclusive"


def test_errors_map_to_python_exceptions():
    with pytest.raises(exo._core.SubexponentialGrowth):
        exo.threshold_band(exo.free_group(1), 2.0, 4.0)
    with pytest.raises(exo._core.BudgetExceeded):
        exo.hyperbolicity_delta(exo.free_group(2), 6)
