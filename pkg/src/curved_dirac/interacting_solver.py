"""Scalar, pseudo-scalar and vector couplings; the generalized Morse closed form.

With the minimal substitutions d_mu -> d_mu + i A_mu and m -> m + S + i W gamma^5,
and the gauge phase exp(-i p(x)), dp/dx = A_1 + (b/a) A_0, the reduced
spinor obeys

    d chi / dy = -M chi,   M = [[A, (-B + i C)/tau], [tau (B + i C), -A]]

with A = m + S + a b W, B = E - A_0 and C = a W.  For A_0 = 0,
W = W0 / a and S = S0 b on a LinearFlat background (alpha = 0) one has
b = +/-(1 - z) with z = exp(-/+ eta y) on the spatial branch +/-x > 0, and
each component reduces to Kummer's equation provided V0 = S0 + W0 = +/-eta/2.

Sign bookkeeping, with ``branch`` = +1 for x >= 0 and -1 for x < 0:

    component / subspace      M_eff^2                   nu1
    upper, positive           (m + branch V0)^2 + eta^2 - W0^2   nu2 [2 (nu2 + branch m/eta) + 1]
    lower, positive           same                      nu2 [2 (nu2 + branch m/eta) - 1]
    lower, negative (solved)  same                      nu2 [2 (nu2 + branch m/eta) - 1]
    upper, negative (mapped)  same                      nu2 [2 (nu2 + branch m/eta) + 1]

The exponent is nu = +/-(omega' - i eta eps / omega') / eta, where omega' is
the free decay parameter with m^2 replaced by (m + branch V0)^2 - W0^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import special_fn as sf
from .background import BackgroundProfile, _LinearFlatProfile
from .errors import (ClosedFormUnavailableError, DomainError, KineticBalanceSingularError,
                     ParameterError, UnsupportedFamilyError)
from .free_solver import NEGATIVE, POSITIVE, decay_parameter
from .verify import GridSpec, adaptive_quadrature, grid_derivative, rk4_coupled

NU2_TOL = 1e-12


# -- potentials ------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialConfig:
    """S(x) = S0 b(x), W(x) = W0 / a(x), A_0 and A_1 polynomials in x.

    ``A0_spec`` and ``A1_spec`` are coefficient lists, lowest order first.
    """

    S0: float = 0.0
    W0: float = 0.0
    A0_spec: tuple[float, ...] = ()
    A1_spec: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("S0", "W0"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        object.__setattr__(self, "A0_spec", tuple(float(c) for c in self.A0_spec))
        object.__setattr__(self, "A1_spec", tuple(float(c) for c in self.A1_spec))

    @classmethod
    def morse(cls, S0: float, W0: float) -> "PotentialConfig":
        return cls(S0=S0, W0=W0)

    @property
    def V0(self) -> float:
        return self.S0 + self.W0

    @staticmethod
    def _poly(coeffs, x, deriv=0):
        x = np.asarray(x, dtype=float)
        if not coeffs:
            return np.zeros_like(x)
        p = np.polynomial.Polynomial(coeffs)
        return (p.deriv(deriv) if deriv else p)(x)

    def S(self, profile, x):
        return self.S0 * profile.fields(x).b

    def W(self, profile, x):
        return self.W0 / profile.fields(x).a

    def A0(self, x, deriv=0):
        return self._poly(self.A0_spec, x, deriv)

    def A1(self, x, deriv=0):
        return self._poly(self.A1_spec, x, deriv)

    def coupling(self, profile):
        """x -> (S, W, A_0, A_1) arrays, the form the Dirac-operator oracle accepts."""
        def fn(x):
            fx = profile.fields(x)
            return self.S0 * fx.b, self.W0 / fx.a, self.A0(x), self.A1(x)
        return fn

    def to_json(self) -> dict:
        return {"S0": self.S0, "W0": self.W0, "A0_spec": list(self.A0_spec),
                "A1_spec": list(self.A1_spec)}

    @classmethod
    def from_json(cls, doc) -> "PotentialConfig":
        if isinstance(doc, str):
            doc = json.loads(doc)
        unknown = set(doc) - {"S0", "W0", "A0_spec", "A1_spec"}
        if unknown:
            raise ParameterError(f"unknown potential keys: {sorted(unknown)}")
        return cls(float(doc.get("S0", 0.0)), float(doc.get("W0", 0.0)),
                   tuple(doc.get("A0_spec", ())), tuple(doc.get("A1_spec", ())))


def gauge_phase(profile: BackgroundProfile, config: PotentialConfig, x):
    """p(x) with dp/dx = A_1 + (b/a) A_0 and p(0) = 0.

    Exact polynomial integral when A_0 = 0, quadrature otherwise.
    """
    x = np.asarray(x, dtype=float)
    profile._require_inside(x)
    if not config.A0_spec:
        if not config.A1_spec:
            out = np.zeros_like(x)
        else:
            out = np.polynomial.Polynomial(config.A1_spec).integ(lbnd=profile._origin())(x)
        return out if out.ndim else float(out)

    def integrand(s):
        fx = profile.fields(s)
        return float(config.A1(s) + fx.b / fx.a * config.A0(s))

    xa = np.atleast_1d(x)
    out = np.array([adaptive_quadrature(integrand, profile._origin(), float(v)) for v in xa])
    return out if x.ndim else float(out[0])


class CoupledCoeffs(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    dA: np.ndarray
    dB: np.ndarray
    dC: np.ndarray


def coupled_coeffs(profile: BackgroundProfile, config: PotentialConfig, epsilon: float, x) -> CoupledCoeffs:
    """A, B, C and their y-derivatives (d/dy = a sqrt(1 + alpha beta) d/dx)."""
    x = np.asarray(x, dtype=float)
    fx = profile.fields(x)
    m = profile.params.mass
    E = complex(epsilon, profile.eta)
    v0 = config.V0
    dydx_inv = fx.a * math.sqrt(profile.params.k_ab)
    A = m + v0 * fx.b
    B = E - config.A0(x) + 0j
    C = np.full_like(fx.a, config.W0)
    dA = dydx_inv * v0 * fx.db
    dB = -dydx_inv * config.A0(x, 1) + 0j
    dC = np.zeros_like(fx.a)
    return CoupledCoeffs(A, B, C, dA, dB, dC)


def coupled_matrix(coeffs: CoupledCoeffs, tau: float) -> np.ndarray:
    """M(y) of d chi/dy = -M chi, shape (n, 2, 2)."""
    A = np.asarray(coeffs.A, dtype=complex)
    B = np.asarray(coeffs.B, dtype=complex)
    C = np.asarray(coeffs.C, dtype=complex)
    row0 = np.stack([A, (-B + 1j * C) / tau], -1)
    row1 = np.stack([tau * (B + 1j * C), -A], -1)
    return np.stack([row0, row1], -2)


def _derivs(y, chi, dchi, d2chi):
    if dchi is None or d2chi is None:
        y = np.asarray(y, dtype=float)
        h = y[1] - y[0]
        if not np.allclose(np.diff(y), h, rtol=1e-9, atol=0):
            raise ParameterError("finite-difference residuals need a uniform y grid")
        dchi = grid_derivative(chi, h, 1) if dchi is None else dchi
        d2chi = grid_derivative(chi, h, 2) if d2chi is None else d2chi
    return np.asarray(dchi), np.asarray(d2chi)


def _max_finite(v) -> float:
    v = np.abs(np.asarray(v))
    v = v[np.isfinite(v)]
    return float(np.max(v)) if v.size else 0.0


def second_order_residual_up(y, chi_up, coeffs: CoupledCoeffs, dchi=None, d2chi=None) -> float:
    """max |chi'' - (B' - iC')/(B - iC) (chi' + A chi) + (A' - A^2 + B^2 + C^2) chi| / max|chi|.

    Derivatives default to 4th-order differences on the (uniform) y grid;
    the two end points on each side are then excluded.
    """
    chi = np.asarray(chi_up, dtype=complex)
    dchi, d2chi = _derivs(y, chi, dchi, d2chi)
    A, B, C, dA, dB, dC = coeffs
    res = d2chi - (dB - 1j * dC) / (B - 1j * C) * (dchi + A * chi) + (dA - A * A + B * B + C * C) * chi
    scale = _max_finite(chi)
    return _max_finite(res) / scale if scale else 0.0


def second_order_residual_down(y, chi_down, coeffs: CoupledCoeffs, dchi=None, d2chi=None) -> float:
    """Lower-component analogue: chi'' + (B' + iC')/(B + iC) (-chi' + A chi) - (A' + A^2 - B^2 - C^2) chi."""
    chi = np.asarray(chi_down, dtype=complex)
    dchi, d2chi = _derivs(y, chi, dchi, d2chi)
    A, B, C, dA, dB, dC = coeffs
    res = d2chi + (dB + 1j * dC) / (B + 1j * C) * (-dchi + A * chi) - (dA + A * A - B * B - C * C) * chi
    scale = _max_finite(chi)
    return _max_finite(res) / scale if scale else 0.0


def _safe_div(num, den):
    den = np.asarray(den)
    if np.any(np.abs(den) < 1e-300):
        raise KineticBalanceSingularError("kinetic-balance denominator vanishes")
    return num / den


def kinetic_balance_down(chi_up, dchi_up, coeffs: CoupledCoeffs, tau: float):
    """chi_down = tau (chi_up' + A chi_up) / (B - iC)."""
    return _safe_div(tau * (np.asarray(dchi_up) + coeffs.A * np.asarray(chi_up)), coeffs.B - 1j * coeffs.C)


def kinetic_balance_up(chi_down, dchi_down, coeffs: CoupledCoeffs, tau: float):
    """chi_up = (-chi_down' + A chi_down) / (tau (B + iC))."""
    return _safe_div(-np.asarray(dchi_down) + coeffs.A * np.asarray(chi_down),
                     tau * (coeffs.B + 1j * coeffs.C))


# -- Morse reduction ---------------------------------------------------------------

@dataclass(frozen=True)
class MorseProblem:
    S0: float
    W0: float
    epsilon: float
    eta: float
    mass: float
    tau: float
    branch: int
    root: int = 1
    V0: float = field(init=False)
    nu2: float = field(init=False)
    M_eff_sq: float = field(init=False)
    omega: float = field(init=False)
    nu0: complex = field(init=False)
    nu: complex = field(init=False)
    nu1_up: float = field(init=False)
    nu1_down: float = field(init=False)

    def __post_init__(self):
        if self.branch not in (1, -1) or self.root not in (1, -1):
            raise ParameterError("branch and root must be +1 or -1")
        if self.eta == 0:
            raise ClosedFormUnavailableError("the closed form needs eta != 0")
        v0 = self.S0 + self.W0
        ratio = v0 / self.eta
        if abs(abs(ratio) - 0.5) > NU2_TOL:
            raise ClosedFormUnavailableError(
                f"closed form needs (S0 + W0)^2 = (eta/2)^2; got V0/eta = {ratio!r}")
        nu2 = math.copysign(0.5, ratio)
        s = self.branch
        m, eta = self.mass, self.eta
        mass_sq = (m + s * v0) ** 2 - self.W0**2
        dd = decay_parameter(self.epsilon, 0.0, eta, mass_sq=mass_sq)
        kap = dd.kappa
        put = object.__setattr__
        put(self, "V0", v0)
        put(self, "nu2", nu2)
        put(self, "M_eff_sq", mass_sq + eta * eta)
        put(self, "omega", dd.omega)
        put(self, "nu0", complex(self.M_eff_sq / eta**2 - (self.epsilon / eta) ** 2
                                 - 2j * self.epsilon / eta))
        put(self, "nu", self.root * kap / eta)
        put(self, "nu1_up", nu2 * (2 * (nu2 + s * m / eta) + 1))
        put(self, "nu1_down", nu2 * (2 * (nu2 + s * m / eta) - 1))

    @property
    def E(self) -> complex:
        return complex(self.epsilon, self.eta)

    def nu1(self, component: str) -> float:
        return self.nu1_up if component == "up" else self.nu1_down

    def kummer_params(self, component: str = "up") -> tuple[complex, complex]:
        return self.nu + 0.5 - self.nu1(component), 2 * self.nu + 1

    def z_of_y(self, y):
        return np.exp(-self.branch * self.eta * np.asarray(y, dtype=float))

    def y_of_z(self, z):
        return -np.log(np.asarray(z, dtype=float)) / (self.branch * self.eta)

    def invariants(self) -> dict:
        return {"nu_sq_minus_nu0": abs(self.nu**2 - self.nu0) / max(1.0, abs(self.nu0)),
                "nu2_sq_minus_quarter": abs(self.nu2**2 - 0.25)}


def morse_reduce(profile: BackgroundProfile, S0: float, W0: float, epsilon: float,
                 branch: int = 1, *, root: int = 1) -> MorseProblem:
    if not isinstance(profile, _LinearFlatProfile):
        raise UnsupportedFamilyError("the Morse reduction is derived for the LinearFlat family")
    if profile.params.alpha != 0:
        raise ParameterError("the Morse reduction assumes alpha = 0")
    p = profile.params
    return MorseProblem(float(S0), float(W0), float(epsilon), profile.eta, p.mass, p.tau,
                        int(branch), int(root))


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0) | (z > 1)):
        raise DomainError("z must lie in (0, 1]")
    return z


def _kummer_block(mp: MorseProblem, z, component):
    """(chi, dchi/dz, d2chi/dz2) of z^nu e^{-z/2} 1F1(nu + 1/2 - nu1; 2 nu + 1; z)."""
    z = _check_z(z)
    a, b = mp.kummer_params(component)
    sf.check_lower(b)
    H = sf.hyp1f1(a, b, z)
    H1 = sf.hyp1f1_deriv(a, b, z, 1)
    H2 = sf.hyp1f1_deriv(a, b, z, 2)
    pre = sf.zpow(z, mp.nu) * np.exp(-z / 2)
    g = mp.nu / z - 0.5
    chi = pre * H
    d1 = pre * (g * H + H1)
    d2 = pre * ((g * g - mp.nu / z**2) * H + 2 * g * H1 + H2)
    return chi, d1, d2


def morse_chi_up(mp: MorseProblem, z):
    """Upper component of the positive subspace."""
    return _kummer_block(mp, z, "up")[0]


def morse_chi_up_derivs(mp: MorseProblem, z):
    return _kummer_block(mp, z, "up")


def morse_chi_down(mp: MorseProblem, z):
    """Lower component from the specialised kinetic balance in the variable z."""
    chi, d1, _ = _kummer_block(mp, z, "up")
    z = np.asarray(z, dtype=float)
    s = mp.branch
    pref = s * mp.tau / complex(mp.epsilon, mp.eta - mp.W0)
    return pref * ((s * mp.mass + mp.V0 - z * mp.V0) * chi - z * mp.eta * d1)


def morse_negative_down(mp: MorseProblem, z):
    """Lower component of the negative subspace (solved first)."""
    return _kummer_block(mp, z, "down")[0]


def morse_negative_down_derivs(mp: MorseProblem, z):
    return _kummer_block(mp, z, "down")


def morse_negative_up(mp: MorseProblem, z):
    """Upper component of the negative subspace, mapped from the lower one."""
    chi, d1, _ = _kummer_block(mp, z, "down")
    z = np.asarray(z, dtype=float)
    s = mp.branch
    pref = s / (mp.tau * complex(mp.epsilon, mp.eta + mp.W0))
    return pref * ((s * mp.mass + mp.V0 - z * mp.V0) * chi + z * mp.eta * d1)


def morse_chi(mp: MorseProblem, z, subspace: str = POSITIVE) -> np.ndarray:
    """(chi_up, chi_down) stacked on the last axis."""
    if subspace == POSITIVE:
        return np.stack([np.atleast_1d(morse_chi_up(mp, z)), np.atleast_1d(morse_chi_down(mp, z))], -1)
    if subspace == NEGATIVE:
        return np.stack([np.atleast_1d(morse_negative_up(mp, z)),
                         np.atleast_1d(morse_negative_down(mp, z))], -1)
    raise ParameterError("subspace must be 'positive' or 'negative'")


def kummer_equation_residual(mp: MorseProblem, z, component: str = "up") -> float:
    """Residual of z^2 chi'' + z chi' + (-nu0 + nu1 z - nu2^2 z^2) chi = 0, relative to max|terms|."""
    chi, d1, d2 = _kummer_block(mp, z, component)
    z = np.asarray(z, dtype=float)
    terms = [z * z * d2, z * d1, -mp.nu0 * chi, mp.nu1(component) * z * chi, -mp.nu2**2 * z * z * chi]
    res = sum(terms)
    scale = np.maximum.reduce([np.abs(t) for t in terms])
    return float(np.max(np.abs(res) / scale))


def polynomial_degree(mp: MorseProblem, component: str = "up") -> int | None:
    """Degree if 1F1 terminates (nu + 1/2 - nu1 a non-positive integer), else None."""
    return sf.terminating_degree(mp.kummer_params(component)[0])


def evaluate_interacting_spinor(profile: BackgroundProfile, config: PotentialConfig, mp: MorseProblem,
                                t: float, x, *, subspace: str = POSITIVE,
                                amplitude_power: int = -1) -> np.ndarray:
    """Psi = (a sqrt(1+alpha beta))^p exp(i eps (q - t)) exp(-i p(x)) chi(z(x)), shape (n, 2).

    Only the half-domain of ``mp.branch`` is admissible.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    profile._require_inside(x)
    on_branch = x >= 0 if mp.branch == 1 else x < 0
    if not np.all(on_branch):
        raise DomainError("x lies on the other spatial branch of this Morse problem")
    if abs(config.V0 - mp.V0) > 1e-15 or config.W0 != mp.W0:
        raise ParameterError("potential config does not match the Morse problem")
    z = mp.z_of_y(profile.y(x))
    chi = morse_chi(mp, np.clip(z, np.finfo(float).tiny, 1.0), subspace)
    amp = (profile.a(x) * math.sqrt(profile.params.k_ab)) ** amplitude_power
    phase = np.exp(1j * mp.epsilon * (profile.q(x) - t) - 1j * gauge_phase(profile, config, x))
    return (amp * phase)[:, None] * chi


# -- numeric route -------------------------------------------------------------------

def coeffs_in_y(profile: BackgroundProfile, config: PotentialConfig, epsilon: float):
    """y -> CoupledCoeffs, through x(y)."""
    return lambda y: coupled_coeffs(profile, config, epsilon, profile.x_of_y(np.asarray(y, dtype=float)))


def integrate_coupled(profile: BackgroundProfile, config: PotentialConfig, epsilon: float,
                      initial, grid: GridSpec, *, backward: bool = False) -> np.ndarray:
    """RK4 solution of d chi/dy = -M(y) chi on ``grid`` (an independent oracle)."""
    tau = profile.params.tau
    cf = coeffs_in_y(profile, config, epsilon)
    return rk4_coupled(lambda ys: -coupled_matrix(cf(ys), tau), initial, grid, backward=backward)


def numeric_decaying_solution(profile: BackgroundProfile, config: PotentialConfig, epsilon: float,
                              branch: int = 1, *, y_far: float | None = None, n: int = 20001):
    """Fallback when no closed form exists: start in the decaying asymptotic mode and integrate to y = 0.

    Returns (y grid, chi samples) on the half-line of ``branch``, scaled so chi_up(0) = 1.
    """
    tau = profile.params.tau
    cf = coeffs_in_y(profile, config, epsilon)
    if y_far is None:
        y_far = 40.0 / max(abs(profile.eta), 1e-3)
        y_far = min(y_far, 200.0)
    y_end = branch * y_far
    m_far = coupled_matrix(cf(np.array([y_end])), tau)[0]
    vals, vecs = np.linalg.eig(m_far)
    # exp(-lambda y) decays towards branch * infinity when branch * Re(lambda) > 0
    idx = int(np.argmax(branch * vals.real))
    vec = vecs[:, idx]
    lo, hi = sorted((0.0, y_end))
    grid = GridSpec(lo, hi, n)
    sol = rk4_coupled(lambda ys: -coupled_matrix(cf(ys), tau), vec, grid, backward=(branch == 1))
    ys = grid.points()
    origin = 0 if branch == 1 else -1
    sol = sol / sol[origin, 0]
    return ys, sol


__all__ = [
    "PotentialConfig", "gauge_phase", "CoupledCoeffs", "coupled_coeffs", "coupled_matrix",
    "second_order_residual_up", "second_order_residual_down", "kinetic_balance_down",
    "kinetic_balance_up", "MorseProblem", "morse_reduce", "morse_chi_up", "morse_chi_up_derivs",
    "morse_chi_down", "morse_negative_down", "morse_negative_down_derivs", "morse_negative_up",
    "morse_chi", "kummer_equation_residual", "polynomial_degree", "evaluate_interacting_spinor",
    "coeffs_in_y", "integrate_coupled", "numeric_decaying_solution",
]
