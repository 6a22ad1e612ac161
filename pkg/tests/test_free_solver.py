import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curved_dirac import background as bg
from curved_dirac import free_solver as fs
from curved_dirac import verify as vf
from curved_dirac.errors import MatchingSingularError, ParameterError, UnsupportedFamilyError
from curved_dirac.gamma_algebra import ModelParams

# frozen positive roots of the quartic, 40-digit mpmath
OMEGA_ORACLE = [
    (1.0, 1.0, 0.4, 0.69851382311835661081),
    (0.5, 1.0, 0.15, 0.88301425921583343576),
    (-1.5, 1.0, 0.8, 0.96599889630342117712),
    (2.5, 1.0, 0.4, 0.43521825361524689249),
    (0.0, 1.0, 0.4, 1.0770329614269008063),
]

energies = st.floats(-10, 10, allow_nan=False)
etas = st.sampled_from([0.001, 0.15, 0.4, 0.8, 1.5])


@pytest.mark.parametrize("eps,m,eta,omega", OMEGA_ORACLE)
def test_omega_oracle(eps, m, eta, omega):
    assert fs.decay_parameter(eps, m, eta).omega == pytest.approx(omega, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(eps=energies, eta=etas)
def test_omega_bounds_and_quartic(eps, eta):
    dd = fs.decay_parameter(eps, 1.0, eta)
    assert abs(eta) <= dd.omega <= dd.effective_mass_M
    assert fs.quartic_residual(dd) <= 1e-12
    assert fs.decay_parameter(-eps, 1.0, eta).omega == dd.omega


@pytest.mark.parametrize("eta", [0.15, 0.4, 0.8, 1.5])
def test_omega_at_zero_energy(eta):
    assert abs(fs.decay_parameter(0.0, 1.0, eta).omega - math.sqrt(1 + eta * eta)) <= 1e-14


@pytest.mark.parametrize("eps,omega,k", [(0.6, 0.8, 0.0), (1.25, 0.0, 0.75), (-1.25, 0.0, -0.75)])
def test_flat_limit(eps, omega, k):
    dd = fs.decay_parameter(eps, 1.0, 0.0)
    assert dd.omega == pytest.approx(omega, abs=1e-15)
    assert dd.wavenumber == pytest.approx(k, abs=1e-15)
    assert dd.unbound_flat == (omega == 0.0)


def test_kappa_squared_is_mode_exponent():
    # kappa^2 = m^2 + eta^2 - eps^2 - 2 i eps eta, up to rounding
    dd = fs.decay_parameter(0.8, 1.0, 0.4)
    assert dd.kappa**2 == pytest.approx(1 + 0.16 - 0.64 - 2j * 0.8 * 0.4, rel=1e-14)


def test_reduced_matrix_alpha_zero():
    p = ModelParams(tau=1.3, eta=0.4)
    np.testing.assert_allclose(fs.reduced_matrix(p, 0.7), fs.free_matrix(1.0, 0.7 + 0.4j, 1.3), atol=1e-15)


@pytest.mark.parametrize("alpha", [0.2, -0.5])
def test_reduced_matrix_eigenvalues(alpha):
    # det M = -(m^2 - E^2)(1 - alpha^2 tau^2)/(1 + alpha beta) = E^2 - m^2: exponents independent of alpha
    p = ModelParams(alpha=alpha, tau=1.1, eta=0.4)
    E = 0.7 + 0.4j
    M = fs.reduced_matrix(p, 0.7)
    assert np.trace(M) == pytest.approx(0)
    assert np.linalg.det(M) == pytest.approx(E * E - 1.0)


@pytest.mark.parametrize("subspace", [fs.POSITIVE, fs.NEGATIVE])
@pytest.mark.parametrize("eps,eta", [(-1.5, 0.15), (0.5, 0.4), (1.0, 0.8), (2.5, 0.4)])
def test_second_order_equation_analytic(subspace, eps, eta):
    dd = fs.decay_parameter(eps, 1.0, eta)
    ys = np.linspace(-3, 3, 41) / dd.omega
    chi, _, d2 = fs.chi_exact_derivatives(dd, 1.0, 1.0, 1.2, 0.8, ys, subspace)
    assert fs.second_order_residual(dd, chi, d2) <= 1e-10


@pytest.mark.parametrize("subspace", [fs.POSITIVE, fs.NEGATIVE])
def test_first_order_system_analytic(subspace):
    dd = fs.decay_parameter(0.8, 1.0, 0.4)
    ys = np.linspace(-2, 2, 11)
    chi, d1, _ = fs.chi_exact_derivatives(dd, 1.0, 0.7, 1.0, 0.5, ys, subspace)
    M = fs.free_matrix(1.0, dd.E, 0.7)
    lhs = np.stack(d1, -1)
    rhs = -np.einsum("ij,nj->ni", M, np.stack(chi, -1))
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


@pytest.mark.parametrize("eps,eta", [(0.8, 0.4), (-1.5, 0.15)])
def test_rk4_fallback_matches_closed_form(eps, eta):
    dd = fs.decay_parameter(eps, 1.0, eta)
    grid = vf.GridSpec(0.0, 3.0 / dd.omega, 3001)
    ys = grid.points()
    up, down = fs.chi_pair_array(dd, 1.0, 1.0, 1.0, 0.3, ys, form="exact")
    M = fs.free_matrix(1.0, dd.E, 1.0)
    sol = vf.rk4_coupled(lambda y: np.broadcast_to(-M, (len(y), 2, 2)), (up[0], down[0]), grid)
    ref = np.stack([up, down], -1)
    assert np.max(np.abs(sol - ref)) / np.max(np.abs(ref)) <= 1e-6


@pytest.mark.parametrize("subspace", [fs.POSITIVE, fs.NEGATIVE])
@pytest.mark.parametrize("eps", [0.5, 0.8, 1.0, 1.2])
def test_origin_matching(linear, hyperbolic, subspace, eps):
    for prof in (linear, hyperbolic):
        sp = fs.FreeSpinor.for_profile(prof, eps, 1.2, 0.8, subspace=subspace)
        plus = fs.evaluate_spinor(prof, sp, 0.3, 0.0, branch=1)
        minus = fs.evaluate_spinor(prof, sp, 0.3, 0.0, branch=-1)
        assert np.max(np.abs(plus - minus)) <= 1e-12


def test_matching_needs_energy_and_curvature():
    with pytest.raises(MatchingSingularError):
        fs.match_at_origin(1, 1, fs.decay_parameter(0.0, 1.0, 0.4))
    sp = fs.FreeSpinor.matched(0.0, 1.0, 0.5, eta=0.4)
    assert (sp.A_minus, sp.B_minus) == (sp.A_plus, sp.B_plus)


@pytest.mark.parametrize("eps", [0.8, -1.5])
@pytest.mark.parametrize("name", ["linear", "hyperbolic", "trig"])
def test_exact_form_solves_dirac(request, name, eps):
    prof = request.getfixturevalue(name)
    xs = np.linspace(0.05, 0.8, 7) * prof.domain[1]
    for subspace in (fs.POSITIVE, fs.NEGATIVE):
        sp = fs.FreeSpinor.for_profile(prof, eps, 1.2, 0.8, subspace=subspace)
        fn = fs.spinor_callable(prof, sp, amplitude_power=1, form="exact")
        assert vf.dirac_residual(prof, fn, eps, xs) <= 1e-8
        assert vf.dirac_residual(prof, fn, eps, -xs) <= 1e-8


def test_figure_prefactor_defect(linear):
    # the figure-form a^{-1} prefactor leaves an O(1) residual; a^{+1} removes it
    xs = np.linspace(0.3, 2.5, 9)
    sp = fs.FreeSpinor.for_profile(linear, 0.8, 1.0, 0.0)
    good = vf.dirac_residual(linear, fs.spinor_callable(linear, sp, amplitude_power=1), 0.8, xs)
    bad = vf.dirac_residual(linear, fs.spinor_callable(linear, sp, amplitude_power=-1), 0.8, xs)
    assert good <= 1e-8
    assert bad > 0.1


def test_figure_second_term_defect(linear):
    # on x > 0 only the A-term of the figure form is a genuine mode
    xs = np.linspace(0.3, 2.5, 9)
    sp = fs.FreeSpinor.for_profile(linear, 0.8, 0.0, 1.0)
    r = vf.dirac_residual(linear, fs.spinor_callable(linear, sp, amplitude_power=1), 0.8, xs)
    assert r > 0.1


def test_transcription_path_agrees(linear):
    sp = fs.FreeSpinor.for_profile(linear, 0.8, 1.2, 0.8)
    for sp_ in (sp, fs.FreeSpinor.for_profile(linear, -1.1, 0.4 + 0.2j, 1.0, subspace=fs.NEGATIVE)):
        xs = np.linspace(-0.95, 0.95, 41) * linear.domain[1]
        a = fs.evaluate_spinor(linear, sp_, 0.7, xs)
        b = fs.evaluate_spinor_linear_flat(linear, sp_, 0.7, xs)
        assert np.max(np.abs(a - b)) <= 1e-13 * np.max(np.abs(a))


def test_transcription_needs_linear(hyperbolic):
    sp = fs.FreeSpinor.for_profile(hyperbolic, 0.8, 1.0, 0.0)
    with pytest.raises(UnsupportedFamilyError):
        fs.evaluate_spinor_linear_flat(hyperbolic, sp, 0.0, 0.1)


def test_alpha_nonzero_rejected():
    prof = bg.solve_profile(bg.LinearFlat(0.3, 0.5), ModelParams(alpha=0.2, curvature_R=0.2))
    sp = fs.FreeSpinor.for_profile(prof, 0.8, 1.0, 0.0)
    with pytest.raises(ParameterError):
        fs.evaluate_spinor(prof, sp, 0.0, 0.1)


@pytest.mark.parametrize("name", ["linear", "hyperbolic"])
@pytest.mark.parametrize("eps", [0.5, 0.8, 1.0, 1.2])
def test_density_properties(request, name, eps):
    prof = request.getfixturevalue(name)
    sp = fs.FreeSpinor.for_profile(prof, eps, 1.2, 0.8)
    u, rho = fs.density_on_grid(prof, sp, 257)
    assert u[0] == -1 and u[-1] == 1
    assert rho[0] == 0 and rho[-1] == 0
    assert np.all(rho[1:-1] >= 0)
    for edge in prof.domain:
        psi = fs.evaluate_spinor(prof, sp, 0.0, edge * (1 - 1e-12))
        assert fs.probability_density(prof, psi, edge * (1 - 1e-12))[0] <= 1e-10


def test_density_two_paths(hyperbolic):
    sp = fs.FreeSpinor.for_profile(hyperbolic, 0.8, 1.2, 0.8)
    xs = np.linspace(-3, 3, 13)
    psi = fs.evaluate_spinor(hyperbolic, sp, 0.0, xs)
    np.testing.assert_allclose(fs.density_via_gamma(hyperbolic, psi, xs),
                               fs.probability_density(hyperbolic, psi, xs), rtol=1e-12)


def test_current_is_real_and_finite(hyperbolic):
    sp = fs.FreeSpinor.for_profile(hyperbolic, 0.8, 1.2, 0.8)
    xs = np.linspace(-3, 3, 13)
    j1 = fs.probability_current(hyperbolic, fs.evaluate_spinor(hyperbolic, sp, 0.0, xs), xs)
    assert j1.dtype == float and np.all(np.isfinite(j1))


def test_norm_envelope(linear):
    xs = np.array([-2.0, 0.0, 2.0])
    env = fs.norm_envelope(linear, 0.8, xs)
    assert env[1] == pytest.approx(1.0)
    assert np.all(env > 0)
    low = fs.norm_envelope_lower(linear, xs)
    assert low[1] == pytest.approx(1.0)


def test_flat_plane_wave(flat):
    sp, fn = fs.flat_plane_wave(flat, 1.3, 1.0, 0.4)
    assert sp.decay.unbound_flat
    xs = np.linspace(-0.01, 0.01, 5)
    assert vf.dirac_residual(flat, fn, 1.3, xs) <= 1e-8
    with pytest.raises(MatchingSingularError):
        fs.evaluate_spinor(flat, sp, 0.0, 0.1)


def test_plane_wave_needs_flat(linear):
    with pytest.raises(ParameterError):
        fs.flat_plane_wave(linear, 1.3)
