import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tdsts import Displacement, OscillatorParams, Squeeze, StateSpec, ThermalSpec
from tdsts.validation import full_parameter_set

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

UNIT = OscillatorParams()


@pytest.fixture
def full_case():
    return full_parameter_set()


@pytest.fixture
def full_spec(full_case):
    return full_case.spec


def spec_of(alpha=0j, r=0.0, phi=0.0, tau1=(), tau2=(), osc=UNIT):
    return StateSpec.from_tau(alpha, r, phi, tau1, tau2, osc)


@st.composite
def oscillators(draw):
    m, omega, hbar = (draw(st.floats(0.5, 2.0)) for _ in range(3))
    return OscillatorParams(m, omega, hbar)


@st.composite
def states(draw, alpha_max=2.0, r_max=1.5, tau_max=3.0, units=True):
    osc = draw(oscillators()) if units else UNIT
    alpha = Displacement.from_polar(draw(st.floats(0, alpha_max)), draw(st.floats(0, 2 * math.pi)))
    z = Squeeze(draw(st.floats(0, r_max)), draw(st.floats(0, 2 * math.pi)))
    temps = [osc.temperature_from_tau(draw(st.floats(0, tau_max))) for _ in range(2)]
    return StateSpec(osc, alpha, z, ThermalSpec([temps[0]], [temps[1]]))


times = st.floats(0, 4 * math.pi)


def simpson2d(values, xs, ys):
    from scipy.integrate import simpson

    return simpson(simpson(values, x=ys, axis=1), x=xs)
