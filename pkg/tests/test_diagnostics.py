import pytest

from sylvbq.diagnostics import discriminant_diagnostics, pair_norm, stability_probe
from sylvbq.exceptions import ConfigError


def test_first_discriminant_hand_value():
    d = discriminant_diagnostics(0.01, 0.2, 2.0, 1.0)
    # 361 + 32 + 4.16 - 0.0256
    assert d.Delta1 == pytest.approx(397.1344, rel=1e-14)
    assert d.Delta1_closed == pytest.approx(d.Delta1, rel=1e-14)
    assert d.eta1 == pytest.approx((397.1344 ** 0.5 - 19.16) / 16, rel=1e-12)


def test_closed_form_needs_phi_norm_two():
    d = discriminant_diagnostics(0.01, 0.2, 1.0, 1.0)
    assert abs(d.Delta1 - d.Delta1_closed) > 1.0


def test_boundary_case_zero_eps_zero_l():
    d = discriminant_diagnostics(0.0, 0.2, 2.0, 0.0)
    assert d.Delta1 == 361.0 and d.eta1 == 0.0


@pytest.mark.parametrize("eps", [0.0, 0.5, 1.0, 10.0])
def test_first_discriminant_small_step_limit(eps):
    d = discriminant_diagnostics(1e-9, 0.2, 2.0, eps)
    assert d.Delta1 == pytest.approx(361 + 32 * eps, abs=1e-5)
    assert d.Delta1_limit == 361 + 32 * eps


def test_negative_discriminant_is_reported():
    d = discriminant_diagnostics(10.0, 0.2, 100.0, 0.0)
    assert d.Delta1 < 0 and d.eta1 is None and d.eta0 is None


def test_second_discriminant_leading_order():
    for q in (0.01, 1.0):
        h = 2 / 640
        d = discriminant_diagnostics(h ** 3, h, 2.0, 1.0, q=q)
        assert d.Delta2 / d.Delta2_leading == pytest.approx(1.0, abs=1e-5)
    # the q-free form is only right for q = 1
    d = discriminant_diagnostics(h ** 3, h, 2.0, 1.0, q=1.0)
    assert d.Delta2 / d.Delta2_asymptotic == pytest.approx(1.0, abs=1e-5)
    assert d.Delta2_printed * h ** 4 == pytest.approx(676 + 8 * h * h)


def test_diagnostics_validation():
    with pytest.raises(ConfigError):
        discriminant_diagnostics(0.01, 0.0, 2, 1)
    with pytest.raises(ConfigError):
        discriminant_diagnostics(-0.01, 0.2, 2, 1)


def test_probe_zero_data():
    rec = stability_probe(0.0, 20)
    assert rec.max_norm == 0.0 and rec.bounded and rec.scale == 0.0


def test_probe_hits_requested_initial_norm():
    rec = stability_probe(1e-3, 5)
    assert rec.norms[0][1] == pytest.approx(1e-3, rel=1e-10)


def test_probe_larger_data_not_smaller_bound():
    a = stability_probe(1e-3, 50)
    b = stability_probe(2e-3, 50)
    assert b.max_norm >= a.max_norm


def test_probe_reports_exceedance():
    rec = stability_probe(1e-3, 10, epsilon=1e-4)
    assert not rec.bounded and rec.first_exceed_step == 0
    with pytest.raises(ConfigError):
        stability_probe(-1.0, 5)


def test_pair_norm():
    import numpy as np

    assert pair_norm(np.array([[3.0]]), np.array([[4.0]])) == 5.0
