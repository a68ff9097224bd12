import math

try:
    from qlinksim import _core
except ImportError:  # in-tree runs import the extension directly
    import _core


def test_plan_single_pump():
    scheme = _core.plan_single_pump(737.0, 1350.0)
    assert abs(scheme.pump_nm[0] - 1623.0) < 0.5
    assert scheme.low_noise
    assert scheme.regime == _core.Regime.AntiStokes


def test_converter_efficiency():
    model = _core.downconverter_defaults()
    p_star = _core.optimal_pump_power_mw(model)
    assert abs(p_star - 131.0) < 2.0
    eta = _core.external_efficiency(model, 130.0)
    assert abs(eta - 0.122) < 0.003
    assert _core.external_efficiency(model, 0.0) == 0.0


def test_readout_error():
    spin = _core.SpinCavityModel()
    err = _core.readout_error_analytic(spin)
    assert 3e-6 < err < 1.2e-5


def test_transfer_fidelity():
    spin = _core.SpinCavityModel()
    fidelity, sigma, heralds = _core.transfer_fidelity(spin, 2000, 7)
    assert heralds > 500
    assert abs(fidelity - _core.transfer_fidelity_analytic(spin)) < 5 * sigma


def test_hbt_quick():
    source = _core.SourceModel()
    source.emission = 0.5
    detector = _core.DetectorModel()
    detector.efficiency = 1.0
    pump = _core.optimal_pump_power_mw(_core.downconverter_defaults())
    g2, sigma, low_confidence = _core.hbt_g2_run(source, pump, 0.0, detector, 0.5, 3)
    assert g2 < 0.05
    assert not math.isnan(sigma)
    assert not low_confidence
