import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curved_dirac import gamma_algebra as ga
from curved_dirac.errors import DomainError, ParameterError, SingularMetricError

finite = st.floats(-3, 3, allow_nan=False)


def test_model_params_derived():
    p = ga.ModelParams(alpha=0.3, tau=2.0, curvature_R=0.25)
    assert p.beta == pytest.approx(-1.2)
    assert p.kappa == 0.5
    assert p.k_ab == pytest.approx(1 - 0.36)


@pytest.mark.parametrize("kw", [{"tau": 0.0}, {"alpha": 1.0, "tau": 1.0}, {"curvature_R": -1.0}, {"mass": -1}])
def test_model_params_rejects(kw):
    with pytest.raises(ParameterError):
        ga.ModelParams(**kw)


def test_metric_hand_values():
    # g00 = 1 - b^2, g01 = -ab, g11 = -a^2 at alpha = 0
    met = ga.build_metric(ga.ModelParams(), 0.6, 0.5)
    np.testing.assert_allclose(met.g_upper, [[0.75, -0.30], [-0.30, -0.36]], atol=1e-15)
    assert float(met.det) == pytest.approx(-0.36)
    np.testing.assert_allclose(met.g_upper @ met.g_lower, np.eye(2), atol=1e-14)


def test_metric_singular():
    with pytest.raises(SingularMetricError):
        ga.build_metric(ga.ModelParams(), 0.0, 0.3)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_gamma():
    with pytest.raises(DomainError):
        ga.build_gamma(ga.ModelParams(), np.inf, 0.0)


@settings(max_examples=60, deadline=None)
@given(a=finite.filter(lambda v: abs(v) > 1e-3), b=finite, alpha=st.floats(-0.9, 0.9), tau=st.floats(0.2, 3.0))
def test_clifford_identity(a, b, alpha, tau):
    p = ga.ModelParams(alpha=alpha, tau=tau)
    g = ga.build_gamma(p, a, b)
    met = ga.build_metric(p, a, b).g_upper
    scale = 1 + a * a + b * b + 1 / tau**2 + tau**2
    for mu in range(2):
        for nu in range(2):
            diff = ga.anticommutator(g[mu], g[nu]) - 2 * met[mu, nu] * ga.I2
            assert ga.max_entry(diff) <= 1e-13 * scale


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-0.9, 0.9), tau=st.floats(0.2, 3.0))
def test_projector_squares(alpha, tau):
    p = ga.ModelParams(alpha=alpha, tau=tau)
    P = ga.projector(p)
    np.testing.assert_allclose(P @ P, p.k_ab * np.eye(2), atol=1e-14)


def test_gamma_product_identity(hyperbolic):
    # (g0 g1)^2 = 2 g^01 g0 g1 - g^00 g^11 I follows from the Clifford relations alone
    fx = hyperbolic.fields(np.linspace(-2, 2, 7))
    p = hyperbolic.params
    g0, g1 = ga.build_gamma(p, fx.a, fx.b)
    gu = ga.build_metric(p, fx.a, fx.b).g_upper
    prod = g0 @ g1
    rhs = 2 * gu[:, 0, 1, None, None] * prod - (gu[:, 0, 0] * gu[:, 1, 1])[:, None, None] * np.eye(2)
    np.testing.assert_allclose(prod @ prod, rhs, atol=1e-13)
    np.testing.assert_allclose(ga.gamma5(p, fx.a, fx.b), 1j * prod, atol=0)


def test_connection_contraction_value():
    # a = 0.6, b = 0.5, a' = 0.2, b' = 0.4: G^0 = a b' = 0.24, G^1 = a a' = 0.12
    _, _, up0, up1 = ga.connection_contractions(ga.ModelParams(), 0.6, 0.5, 0.2, 0.4)
    assert up0 == pytest.approx(0.24)
    assert up1 == pytest.approx(0.12)


def test_sigma0_value():
    # Sigma_0 = a b' - a' b = 0.6*0.4 - 0.2*0.5 = 0.14
    _, _, s0, _ = ga.sigma_connections(ga.ModelParams(), 0.6, 0.5, 0.2, 0.4)
    assert s0 == pytest.approx(0.14)


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.73, 2.0])
def test_omega_lambda_independent(glued, lam):
    xs = glued.sample_points(25)
    fx = glued.fields(xs)
    p = glued.params
    ref = ga.build_omega(p, fx.da, glued.eta)
    got = ga.assemble_omega(p, fx.a, fx.b, fx.da, fx.db, lam)
    assert ga.max_entry(got - ref) <= 1e-12


def test_algebra_residual_small(glued):
    for x in (-0.5, 0.3, 1.1):
        ra, rb = ga.algebra_residual(glued.params, glued, x, relative=True)
        assert ra <= 1e-6 and rb <= 1e-6


def test_algebra_residual_detects_wrong_eta(hyperbolic):
    # rebuilding Omega with a different constant breaks the identity
    class Wrong:
        domain, eta, params = hyperbolic.domain, 1.5 * hyperbolic.eta, hyperbolic.params
        branch_of = staticmethod(hyperbolic.branch_of)
        fields = staticmethod(hyperbolic.fields)

    ra, rb = ga.algebra_residual(hyperbolic.params, Wrong(), 0.7, relative=True)
    assert max(ra, rb) > 1e-3


def test_algebra_residual_stencil_outside(linear):
    with pytest.raises(DomainError):
        ga.algebra_residual(linear.params, linear, linear.domain[1] - 1e-9)
