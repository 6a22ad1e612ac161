"""Exact free-particle solutions on a static background.

Writing Psi(t, x) = a(x)^p exp(i eps (q(x) - t)) chi(y(x)) reduces the Dirac
equation to the constant-coefficient system

    d chi / dy = -M chi,      M = [[m, -E/tau], [E tau, -m]]   (alpha = 0)

with E = eps + i eta.  Both components solve chi'' = kappa^2 chi with
kappa = omega - i eps eta / omega, where omega is the positive decay
parameter; the genuine modes are exp(-kappa y) and exp(+kappa y).

Two representations are provided:

* ``form="figure"`` keeps the closed form used for the figure data, in which
  both terms carry the envelope exp(-/+ omega y) and opposite oscillations.  On
  each branch only one of its two terms is an exact mode.
* ``form="exact"`` is the global combination c_- exp(-kappa y) + c_+ exp(kappa y)
  of genuine modes, used by the verification suite.

The amplitude power ``p`` defaults to -1 (the prefactor of the figure data).  The
Dirac operator itself is solved by ``p = +1``: only then do the a'(x)
terms of the connection cancel.  See :func:`evaluate_spinor`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .background import BackgroundProfile, _LinearFlatProfile
from .errors import (DegenerateEnergyError, MatchingSingularError, ParameterError,
                     UnsupportedFamilyError)
from .gamma_algebra import ModelParams, build_gamma

POSITIVE = "positive"
NEGATIVE = "negative"
_SUBSPACES = (POSITIVE, NEGATIVE)


@dataclass(frozen=True)
class DecayData:
    epsilon: float
    eta: float
    mass: float
    omega: float
    wavenumber: float
    effective_mass_M: float

    @property
    def E(self) -> complex:
        return complex(self.epsilon, self.eta)

    @property
    def unbound_flat(self) -> bool:
        """True for the flat-space scattering case eta = 0, eps^2 > m^2 (omega = 0)."""
        return self.omega == 0.0

    @property
    def kappa(self) -> complex:
        """Complex exponent omega - i eps eta / omega of the decaying mode exp(-kappa y)."""
        if self.omega == 0.0:
            return -1j * self.wavenumber
        return complex(self.omega, -self.epsilon * self.eta / self.omega)


def decay_parameter(epsilon: float, m: float, eta: float, *, mass_sq: float | None = None) -> DecayData:
    """Positive root omega of omega^4 - (M^2 - eps^2) omega^2 - eta^2 eps^2 = 0.

    ``mass_sq`` replaces m^2 (it may be negative, as happens for the
    interacting problem); M^2 = mass_sq + eta^2.  The root is evaluated in a
    cancellation-free form on both sides of eps^2 = M^2.
    """
    epsilon, eta = float(epsilon), float(eta)
    msq = float(m) ** 2 if mass_sq is None else float(mass_sq)
    big_m_sq = msq + eta * eta
    d = big_m_sq - epsilon * epsilon
    c = 2.0 * eta * epsilon
    root = math.hypot(d, c)
    if d >= 0:
        om_sq = 0.5 * (d + root)
    elif c == 0.0:
        om_sq = 0.0
    else:
        om_sq = 0.5 * c * c / (root - d)
    omega = math.sqrt(om_sq)
    if omega > 0:
        wn = eta * epsilon / omega
    else:
        wn = math.copysign(math.sqrt(-d), epsilon)
    return DecayData(epsilon, eta, math.sqrt(max(msq, 0.0)), omega, wn, math.sqrt(max(big_m_sq, 0.0)))


def quartic_residual(dd: DecayData) -> float:
    """Relative residual of the quartic that defines omega."""
    w2 = dd.omega**2
    big_m_sq = dd.mass**2 + dd.eta**2
    terms = (w2 * w2, (big_m_sq - dd.epsilon**2) * w2, dd.eta**2 * dd.epsilon**2)
    scale = max(max(abs(t) for t in terms), 1e-300)
    return abs(terms[0] - terms[1] - terms[2]) / scale


def _check_E(E: complex):
    if E == 0:
        raise DegenerateEnergyError("E = eps + i eta vanishes")


def free_matrix(m: float, E: complex, tau: float) -> np.ndarray:
    """M of d chi/dy = -M chi for alpha = 0."""
    return np.array([[m, -E / tau], [E * tau, -m]], dtype=complex)


def reduced_matrix(params: ModelParams, epsilon: float) -> np.ndarray:
    """M of d chi/dy = -M chi for general alpha (reduces to :func:`free_matrix` at alpha = 0)."""
    k = math.sqrt(params.k_ab)
    E = complex(epsilon, params.eta if params.eta is not None else 0.0)
    at = params.alpha * params.tau
    diag = (params.mass - at * E) / k
    off = (at * params.mass - E) / k
    tau = params.tau
    return np.array([[diag, off / tau], [-off * tau, -diag]], dtype=complex)


def chi_pair(dd: DecayData, m: float, tau: float, A: complex, B: complex, y: float,
             subspace: str = POSITIVE, *, branch: int | None = None, form: str = "figure"):
    """(chi_up, chi_down) at y.

    For ``form="figure"`` (A, B) are the constants of the branch given by
    ``branch`` (default: sign of y).  For ``form="exact"`` they multiply the
    modes exp(-kappa y) and exp(+kappa y) and ``branch`` is ignored.
    """
    up, down = chi_pair_array(dd, m, tau, A, B, np.asarray(y, dtype=float), subspace,
                              branch=branch, form=form)
    if np.ndim(y) == 0:
        return complex(up), complex(down)
    return up, down


def chi_pair_array(dd, m, tau, A, B, y, subspace=POSITIVE, *, branch=None, form="figure"):
    if subspace not in _SUBSPACES:
        raise ParameterError(f"subspace must be one of {_SUBSPACES}")
    E = dd.E
    _check_E(E)
    y = np.asarray(y, dtype=float)
    if form == "exact":
        kap = dd.kappa
        em, ep = np.exp(-kap * y), np.exp(kap * y)
        if subspace == POSITIVE:
            up = A * em + B * ep
            down = tau / E * ((m - kap) * A * em + (m + kap) * B * ep)
        else:
            down = A * em + B * ep
            up = ((m + kap) * A * em + (m - kap) * B * ep) / (tau * E)
        return up, down
    if form != "figure":
        raise ParameterError("form must be 'figure' or 'exact'")
    if dd.omega == 0.0:
        raise MatchingSingularError("form='figure' needs omega > 0; use form='exact'")
    if branch is not None:
        s = branch
    else:
        s = np.where(y >= 0, 1, -1) if y.ndim else (1 if y >= 0 else -1)
    w = dd.omega
    osc = dd.epsilon * dd.eta / w
    env = np.exp(-s * w * y)
    ea, eb = env * np.exp(1j * osc * y), env * np.exp(-1j * osc * y)
    if subspace == POSITIVE:
        up = A * ea + B * eb
        down = tau / E * ((m - s * w + 1j * osc) * A * ea + (m - s * w - 1j * osc) * B * eb)
    else:
        down = A * ea + B * eb
        up = ((m + s * w - 1j * osc) * A * ea + (m + s * w + 1j * osc) * B * eb) / (tau * E)
    return up, down


def chi_exact_derivatives(dd: DecayData, m, tau, A, B, y, subspace=POSITIVE):
    """Analytic (chi, chi', chi'') for the exact form, each a tuple (up, down)."""
    kap = dd.kappa
    y = np.asarray(y, dtype=float)
    out = []
    for order in range(3):
        ca, cb = (-kap) ** order, kap**order
        out.append(chi_pair_array(dd, m, tau, A * ca, B * cb, y, subspace, form="exact"))
    return tuple(out)


def second_order_residual(dd: DecayData, chi, d2chi) -> float:
    """max |chi'' + (eps^2 - m^2 - eta^2 + 2 i eps eta) chi| / max |chi|."""
    coef = dd.epsilon**2 - dd.mass**2 - dd.eta**2 + 2j * dd.epsilon * dd.eta
    num = max(np.max(np.abs(np.asarray(c2) + coef * np.asarray(c))) for c, c2 in zip(chi, d2chi))
    den = max(np.max(np.abs(c)) for c in chi)
    return float(num / den)


def match_at_origin(A_plus: complex, B_plus: complex, dd: DecayData) -> tuple[complex, complex]:
    """Constants on x < 0 that make the figure form continuous at x = 0.

    The same formula holds in both subspaces.
    """
    prod = dd.epsilon * dd.eta
    if prod == 0:
        raise MatchingSingularError("matching needs eps * eta != 0")
    corr = 1j * dd.omega**2 / prod * (A_plus + B_plus)
    return A_plus + corr, B_plus - corr


@dataclass(frozen=True)
class FreeSpinor:
    epsilon: float
    eta: float
    mass: float
    tau: float
    A_plus: complex
    B_plus: complex
    A_minus: complex
    B_minus: complex
    subspace: str = POSITIVE

    @property
    def E(self) -> complex:
        return complex(self.epsilon, self.eta)

    @property
    def decay(self) -> DecayData:
        return decay_parameter(self.epsilon, self.mass, self.eta)

    @classmethod
    def matched(cls, epsilon: float, A_plus: complex, B_plus: complex, *, eta: float,
                mass: float = 1.0, tau: float = 1.0, subspace: str = POSITIVE) -> "FreeSpinor":
        dd = decay_parameter(epsilon, mass, eta)
        if dd.epsilon * dd.eta == 0:
            # continuity imposed directly: the same constants on both sides
            am, bm = A_plus, B_plus
        else:
            am, bm = match_at_origin(A_plus, B_plus, dd)
        return cls(float(epsilon), float(eta), float(mass), float(tau), complex(A_plus),
                   complex(B_plus), complex(am), complex(bm), subspace)

    @classmethod
    def for_profile(cls, profile: BackgroundProfile, epsilon: float, A_plus=1.0, B_plus=0.0,
                    subspace: str = POSITIVE) -> "FreeSpinor":
        p = profile.params
        return cls.matched(epsilon, A_plus, B_plus, eta=profile.eta, mass=p.mass, tau=p.tau,
                           subspace=subspace)


def _require_alpha_zero(profile: BackgroundProfile):
    if profile.params.alpha != 0:
        raise ParameterError("closed-form free solutions are implemented for alpha = 0")


def chi_on_profile(profile, spinor: FreeSpinor, x, *, form="figure", branch=None):
    """chi(y(x)) with the branch constants selected by the sign of x; shape (n, 2).

    ``branch`` forces the constants of one side (used to compare the two
    one-sided limits at x = 0).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dd = spinor.decay
    y = profile.y(x)
    if form == "exact":
        up, down = chi_pair_array(dd, spinor.mass, spinor.tau, spinor.A_plus, spinor.B_plus,
                                  y, spinor.subspace, form="exact")
        return np.stack([up, down], -1)
    if dd.omega == 0.0:
        raise MatchingSingularError("omega = 0: use form='exact' for the flat scattering state")
    plus = x >= 0 if branch is None else np.full(x.shape, branch == 1)
    out = np.empty(x.shape + (2,), dtype=complex)
    for mask, s, A, B in ((plus, 1, spinor.A_plus, spinor.B_plus),
                          (~plus, -1, spinor.A_minus, spinor.B_minus)):
        if np.any(mask):
            u, d = chi_pair_array(dd, spinor.mass, spinor.tau, A, B, y[mask], spinor.subspace,
                                  branch=s)
            out[mask, 0], out[mask, 1] = u, d
    return out


def evaluate_spinor(profile: BackgroundProfile, spinor: FreeSpinor, t: float, x, *,
                    amplitude_power: int = -1, form: str = "figure",
                    branch: int | None = None) -> np.ndarray:
    """Psi(t, x) = (a sqrt(1+alpha beta))^p exp(i eps (q - t)) chi(y(x)), shape (n, 2).

    x = 0 uses the x >= 0 branch.  ``amplitude_power=+1`` is the choice that
    solves the first-order equation; -1 is the prefactor of the figure data.
    """
    _require_alpha_zero(profile)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    profile._require_inside(x)
    chi = chi_on_profile(profile, spinor, x, form=form, branch=branch)
    amp = (profile.a(x) * math.sqrt(profile.params.k_ab)) ** amplitude_power
    phase = np.exp(1j * spinor.epsilon * (profile.q(x) - t))
    return (amp * phase)[:, None] * chi


def spinor_callable(profile, spinor, *, t=0.0, amplitude_power=-1, form="figure"):
    """x -> Psi(t, x) as an (n, 2) array; convenient for the finite-difference oracles."""
    return lambda xs: evaluate_spinor(profile, spinor, t, xs, amplitude_power=amplitude_power,
                                      form=form)


def evaluate_spinor_linear_flat(profile: BackgroundProfile, spinor: FreeSpinor, t: float, x) -> np.ndarray:
    """Direct transcription of the explicit LinearFlat wavefunction (alpha = 0).

    Written in terms of theta, xi, kappa and the log form of y only, as an
    independent path against :func:`evaluate_spinor`.
    """
    if not isinstance(profile, _LinearFlatProfile):
        raise UnsupportedFamilyError("explicit form exists for LinearFlat only")
    _require_alpha_zero(profile)
    fam = profile.family
    kap = profile.params.kappa
    x = np.atleast_1d(np.asarray(x, dtype=float))
    profile._require_inside(x)
    dd = spinor.decay
    w, eta, eps, m, tau = dd.omega, dd.eta, dd.epsilon, dd.mass, spinor.tau
    E = complex(eps, eta)
    osc = eps * eta / w
    out = np.empty(x.shape + (2,), dtype=complex)
    for mask, s, A, B in ((x >= 0, 1, spinor.A_plus, spinor.B_plus),
                          (x < 0, -1, spinor.A_minus, spinor.B_minus)):
        xm = x[mask]
        if fam.sign_a1 == 1:
            lin = 1 - s * fam.xi * kap * xm
            ys = -s * np.log(lin) / eta
        else:  # mirrored space
            lin = 1 + s * fam.xi * kap * xm
            ys = s * np.log(lin) / eta
        sq = -fam.sign_a1 * s  # sign in front of xi kappa x in a(x)
        pref = (np.exp(-s * w * ys) * np.exp(-1j * eps * (t - sq * xm * fam.xi / fam.theta))
                * np.exp(-1j * eps * sq * ys) / (fam.theta / fam.xi * lin))
        ea, eb = np.exp(1j * osc * ys), np.exp(-1j * osc * ys)
        if spinor.subspace == POSITIVE:
            up = A * ea + B * eb
            down = ((m - s * w + 1j * osc) * A * ea + (m - s * w - 1j * osc) * B * eb) / (E / tau)
        else:
            up = ((m + s * w - 1j * osc) * A * ea + (m + s * w + 1j * osc) * B * eb) / (tau * E)
            down = A * ea + B * eb
        out[mask, 0] = pref * up
        out[mask, 1] = pref * down
    return out


def probability_density(profile: BackgroundProfile, psi, x) -> np.ndarray:
    """rho = J^0 = g^00 (Psi^dagger Psi); psi has shape (n, 2)."""
    psi = np.atleast_2d(psi)
    return profile.g00(np.atleast_1d(x)) * np.sum(np.abs(psi) ** 2, axis=-1)


def density_via_gamma(profile: BackgroundProfile, psi, x) -> np.ndarray:
    """J^0 = Psi^dagger gamma^0 gamma^0 Psi, the matrix path."""
    psi = np.atleast_2d(psi)
    fx = profile.fields(np.atleast_1d(x))
    g0, _ = build_gamma(profile.params, fx.a, fx.b)
    return np.real(np.einsum("ni,nij,njk,nk->n", psi.conj(), g0, g0, psi))


def probability_current(profile: BackgroundProfile, psi, x) -> np.ndarray:
    """Real part of J^1 = Psi^dagger gamma^0 gamma^1 Psi."""
    psi = np.atleast_2d(psi)
    fx = profile.fields(np.atleast_1d(x))
    g0, g1 = build_gamma(profile.params, fx.a, fx.b)
    return np.real(np.einsum("ni,nij,njk,nk->n", psi.conj(), g0, g1, psi))


def density_on_grid(profile: BackgroundProfile, spinor: FreeSpinor, n: int = 512, *,
                    amplitude_power: int = -1, form: str = "figure"):
    """(x/X, rho) on n points spanning [X_-, X_+]; the end points carry the limit rho = 0."""
    lo, hi = profile.domain
    u = np.linspace(-1.0, 1.0, n)
    xs = np.where(u < 0, -u * lo, u * hi)
    rho = np.zeros(n)
    inner = (u > -1) & (u < 1)
    psi = evaluate_spinor(profile, spinor, 0.0, xs[inner], amplitude_power=amplitude_power, form=form)
    rho[inner] = probability_density(profile, psi, xs[inner])
    return u, rho


def norm_integral(profile: BackgroundProfile, spinor: FreeSpinor, **kw) -> float:
    """Diagnostic int |sqrt(-g) Psi|^2 dx over the domain (not used for normalisation)."""
    from .verify import adaptive_quadrature

    k = profile.params.k_ab

    def integrand(s):
        psi = evaluate_spinor(profile, spinor, 0.0, s, **kw)
        a = float(profile.a(s))
        return float(k * a * a * np.sum(np.abs(psi) ** 2))

    lo, hi = profile.domain
    eps = 1e-9 * (hi - lo)
    return adaptive_quadrature(integrand, lo + eps, 0.0, tol=1e-8) + \
        adaptive_quadrature(integrand, 0.0, hi - eps, tol=1e-8)


def norm_envelope(profile: BackgroundProfile, epsilon: float, x):
    """N(x, eps) = exp(-/+ omega y) / (1 -/+ xi kappa x) for the LinearFlat family."""
    if not isinstance(profile, _LinearFlatProfile):
        raise UnsupportedFamilyError("norm_envelope is defined for LinearFlat profiles")
    dd = decay_parameter(epsilon, profile.params.mass, profile.eta)
    x = np.asarray(x, dtype=float)
    s = np.where(x >= 0, 1.0, -1.0)
    fam = profile.family
    lin = profile.a(x) * math.sqrt(profile.params.k_ab) / (fam.theta / fam.xi)
    out = np.exp(-s * dd.omega * profile.y(x)) / lin
    return out if out.ndim else float(out)


def norm_envelope_lower(profile: BackgroundProfile, x):
    """(1 -/+ xi kappa x)^(-1 + sqrt(1 + m^2 / (theta^2 R)))."""
    if not isinstance(profile, _LinearFlatProfile):
        raise UnsupportedFamilyError("norm_envelope is defined for LinearFlat profiles")
    fam = profile.family
    p = profile.params
    x = np.asarray(x, dtype=float)
    lin = profile.a(x) * math.sqrt(p.k_ab) / (fam.theta / fam.xi)
    expo = -1.0 + math.sqrt(1.0 + p.mass**2 / (fam.theta**2 * p.curvature_R))
    return lin**expo


def flat_plane_wave(profile: BackgroundProfile, epsilon: float, A: complex = 1.0, B: complex = 0.0):
    """Scattering state on a Flat profile (eta = 0, eps^2 > m^2): exact exp(-/+ i k y) modes."""
    if profile.eta != 0:
        raise ParameterError("plane waves need eta = 0")
    p = profile.params
    spinor = FreeSpinor(float(epsilon), 0.0, p.mass, p.tau, complex(A), complex(B), complex(A),
                        complex(B))
    return spinor, spinor_callable(profile, spinor, amplitude_power=1, form="exact")


__all__ = [
    "DecayData", "FreeSpinor", "POSITIVE", "NEGATIVE", "decay_parameter", "quartic_residual",
    "free_matrix", "reduced_matrix", "chi_pair", "chi_pair_array", "chi_exact_derivatives",
    "second_order_residual", "match_at_origin", "chi_on_profile", "evaluate_spinor",
    "spinor_callable", "evaluate_spinor_linear_flat", "probability_density", "density_via_gamma",
    "probability_current", "density_on_grid", "norm_integral", "norm_envelope",
    "norm_envelope_lower", "flat_plane_wave",
]
