import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dopolab.errors import GeometryError, ParameterError
from dopolab.params import (
    DimensionlessParams,
    PhysicalSetup,
    decay_rate,
    derived_rates,
    dimensionless,
    pump_power_for_sigma,
    threshold_pump_amplitude,
    waist_radius,
)


def test_derived_quantities_above_threshold():
    p = DimensionlessParams(sigma=math.sqrt(2.0), kappa=1.0, g=1e-3)
    assert p.above_threshold
    assert p.d == pytest.approx(2.5e-7)
    assert p.rho == pytest.approx(math.sqrt(math.sqrt(2.0) - 1.0))
    assert p.D == pytest.approx(2.5e-7 / (math.sqrt(2.0) - 1.0))


def test_below_threshold_has_no_pattern():
    p = DimensionlessParams(sigma=0.5, kappa=1.0, g=1e-3)
    assert not p.above_threshold
    assert p.rho is None
    assert p.D is None
    assert p.as_dict()["D"] is None


@pytest.mark.parametrize("field,value", [("sigma", -1.0), ("kappa", 0.0), ("g", 0.0), ("g", float("nan"))])
def test_dimensionless_rejects_bad_values(field, value):
    values = {"sigma": 1.5, "kappa": 1.0, "g": 1e-3}
    values[field] = value
    with pytest.raises(ParameterError):
        DimensionlessParams(**values)


def test_geometry_error_for_unstable_resonator():
    setup = PhysicalSetup(R=0.04, L=0.1)
    with pytest.raises(GeometryError):
        waist_radius(setup)


def test_signal_waist_is_wider_by_sqrt2():
    setup = PhysicalSetup()
    assert waist_radius(setup, "signal") == pytest.approx(math.sqrt(2.0) * waist_radius(setup, "pump"))


def test_decay_rates_and_kappa():
    setup = PhysicalSetup(T_p=0.1, T_s=0.01)
    assert decay_rate(setup, "pump") / decay_rate(setup, "signal") == pytest.approx(10.0)
    assert dimensionless(setup).kappa == pytest.approx(10.0)


def test_sigma_is_pump_over_threshold():
    setup = PhysicalSetup()
    rates = derived_rates(setup)
    assert dimensionless(setup).sigma == pytest.approx(rates.E_p / threshold_pump_amplitude(setup))


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.1, max_value=20.0))
def test_pump_power_inverts_sigma(sigma):
    setup = PhysicalSetup()
    power = pump_power_for_sigma(setup, sigma)
    assert dimensionless(setup.replace(P_laser=power)).sigma == pytest.approx(sigma, rel=1e-10)


def test_setup_validation():
    with pytest.raises(ParameterError):
        PhysicalSetup(T_s=1.5)
    with pytest.raises(ParameterError):
        PhysicalSetup(chi2=0.0)


def test_standard_setup_reproduces_tabulated_rates():
    setup = PhysicalSetup()
    rates = derived_rates(setup)
    assert waist_radius(setup, "pump") == pytest.approx(167e-6, rel=0.01)
    assert rates.gamma_p == pytest.approx(0.15e9, rel=0.01)
    assert rates.gamma_s == pytest.approx(0.015e9, rel=0.01)
    assert rates.chi == pytest.approx(64.0, rel=0.01)
