import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curved_dirac import special_fn as sf
from curved_dirac.errors import DomainError, PoleError

# frozen mpmath.hyp1f1 values (dps = 40)
ORACLE = [
    (0.3 + 0.2j, 1.1 - 0.4j, 0.7j, 0.8206233680100479 + 0.0837405112135068j),
    (-2, 0.5, 0.9, -1.52),
    (1.5 + 2j, 3.2 + 1j, -1.2, 0.4444291733316797 - 0.27026621161091957j),
    (0.25, 2, 1.5, 1.2676352284308732),
    (-0.5 - 3j, 0.2 + 1.5j, 1.0, 0.35597420002001073 + 0.5554369079296471j),
]


@pytest.mark.parametrize("a,b,z,expected", ORACLE)
def test_against_frozen_oracle(a, b, z, expected):
    assert abs(sf.hyp1f1(a, b, z) - expected) <= 1e-14 * max(1.0, abs(expected))


def test_elementary_closed_forms():
    assert abs(sf.hyp1f1(1, 2, 1) - (math.e - 1)) <= 1e-14
    for z in (0.3, -0.9, 0.5j):
        assert abs(sf.hyp1f1(2.3, 2.3, z) - cmath.exp(z)) <= 1e-15
    # 1F1(-n; b; z) is a polynomial: 1F1(-2; 0.5; z) = 1 - 4z + 4z^2/3
    z = 0.7
    assert abs(sf.hyp1f1(-2, 0.5, z) - (1 - 4 * z + 4 * z * z / 3)) <= 1e-15


def test_array_input():
    zs = np.linspace(0.0, 1.0, 5)
    vals = sf.hyp1f1(0.5, 1.5, zs)
    assert vals.shape == (5,)
    assert vals[0] == 1


@pytest.mark.parametrize("b", [0, -1, -3, -2 + 1e-13])
def test_pole(b):
    with pytest.raises(PoleError):
        sf.hyp1f1(0.5, b, 0.3)


def test_domain_guard():
    with pytest.raises(DomainError):
        sf.hyp1f1(0.5, 1.5, 2.0)
    with pytest.raises(DomainError):
        sf.KummerParams(0.5, 1.5, 1.6j)


cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
in_disk = st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False)
lower = cplx.filter(lambda b: abs(b - round(b.real)) > 0.05 or round(b.real) > 0)


@settings(max_examples=80, deadline=None)
@given(a=cplx, b=lower, z=in_disk)
def test_matches_mpmath(a, b, z):
    ref = complex(mpmath.hyp1f1(a, b, z))
    got = sf.hyp1f1(a, b, z)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=80, deadline=None)
@given(a=cplx, b=lower, z=in_disk)
def test_ode_residual(a, b, z):
    assert sf.kummer_ode_residual(a, b, z) <= 1e-10


@settings(max_examples=80, deadline=None)
@given(a=cplx, b=lower.filter(lambda b: abs(b - 1 - round(b.real - 1)) > 0.05 or round(b.real) > 1), z=in_disk)
def test_contiguous_relations(a, b, z):
    r1, r2 = sf.kummer_recurrence_residual(sf.KummerParams(a, b, z))
    assert r1 <= 1e-12 and r2 <= 1e-12


def test_second_relation_nan_on_pole():
    r1, r2 = sf.kummer_recurrence_residual(sf.KummerParams(0.3, 1.0, 0.4))
    assert r1 <= 1e-14 and math.isnan(r2)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivative_vs_mpmath(order):
    a, b, z = 0.4 - 0.3j, 1.7 + 0.2j, 0.6
    ref = complex(mpmath.diff(lambda t: mpmath.hyp1f1(a, b, t), z, order))
    assert abs(sf.hyp1f1_deriv(a, b, z, order) - ref) <= 1e-12 * max(1, abs(ref))


def test_derivative_of_polynomial_vanishes():
    assert sf.hyp1f1_deriv(-1, 2.0, 0.5, 2) == 0


@pytest.mark.parametrize("a,deg", [(-3, 3), (0, 0), (-2 + 1e-14j, 2), (0.5, None), (-1.5, None), (2, None)])
def test_terminating_degree(a, deg):
    assert sf.terminating_degree(a) == deg


def test_zpow():
    assert sf.zpow(0.25, 0.5 + 1j) == pytest.approx(cmath.exp((0.5 + 1j) * math.log(0.25)))
    np.testing.assert_allclose(sf.zpow(np.array([1.0, 4.0]), 0.5), [1.0, 2.0])
