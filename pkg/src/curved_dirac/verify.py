"""Independent numerical oracles: fixed-step RK4, finite differences, quadrature.

Nothing here knows about closed-form solutions; the routines only see
callables and grids, which keeps them usable as cross-checks for the
analytic code paths.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import gamma_algebra as ga
from .errors import AccuracyError, BlowUpError, DomainError


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("GridSpec needs n >= 8")
        if not self.lo < self.hi:
            raise ValueError("GridSpec needs lo < hi")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


def rk4_coupled(matrix_fn, initial, grid: GridSpec, *, backward: bool = False) -> np.ndarray:
    """Integrate d(chi)/dy = F(y) chi, F = matrix_fn(y), with classical RK4.

    ``matrix_fn`` must accept an array of y values and return an array of
    shape ``(n, 2, 2)``.  Integration starts at ``grid.lo`` (or ``grid.hi``
    when ``backward``); samples are returned in grid order, shape ``(n, 2)``.
    """
    ys = grid.points()
    h = grid.spacing
    if backward:
        ys = ys[::-1]
        h = -h
    mids = ys[:-1] + 0.5 * h
    f_nodes = np.asarray(matrix_fn(ys), dtype=complex).reshape(-1, 4).tolist()
    f_mids = np.asarray(matrix_fn(mids), dtype=complex).reshape(-1, 4).tolist()

    u, v = complex(initial[0]), complex(initial[1])
    out = [(u, v)]
    for i in range(len(ys) - 1):
        a0, b0, c0, d0 = f_nodes[i]
        am, bm, cm, dm = f_mids[i]
        a1, b1, c1, d1 = f_nodes[i + 1]
        k1u, k1v = a0 * u + b0 * v, c0 * u + d0 * v
        uu, vv = u + 0.5 * h * k1u, v + 0.5 * h * k1v
        k2u, k2v = am * uu + bm * vv, cm * uu + dm * vv
        uu, vv = u + 0.5 * h * k2u, v + 0.5 * h * k2v
        k3u, k3v = am * uu + bm * vv, cm * uu + dm * vv
        uu, vv = u + h * k3u, v + h * k3v
        k4u, k4v = a1 * uu + b1 * vv, c1 * uu + d1 * vv
        u = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(abs(u)) and math.isfinite(abs(v))):
            raise BlowUpError("RK4 state became non-finite", float(ys[i + 1]))
        out.append((u, v))
    res = np.array(out, dtype=complex)
    return res[::-1] if backward else res


def central_diff(fn, x, h: float):
    """Second-order central first derivative of a (possibly vector-valued) callable."""
    return (fn(x + h) - fn(x - h)) / (2 * h)


def central_diff2(fn, x, h: float):
    return (fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h)


def grid_derivative(values: np.ndarray, h: float, order: int = 1) -> np.ndarray:
    """Fourth-order central differences on a uniform grid along axis 0.

    The two points at each end are left as NaN instead of using one-sided
    stencils.
    """
    v = np.asarray(values)
    out = np.full(v.shape, np.nan, dtype=np.result_type(v.dtype, float))
    if order == 1:
        out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    elif order == 2:
        out[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    else:
        raise ValueError("order must be 1 or 2")
    return out


def adaptive_quadrature(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Adaptive Gauss-Kronrod (QUADPACK) integral of a real function on [lo, hi]."""
    if lo == hi:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=1e-13, limit=400)
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"quadrature on [{lo!r}, {hi!r}] did not reach {tol!r}: {exc}") from None
    if not math.isfinite(val):
        raise AccuracyError("quadrature returned a non-finite value")
    return float(val)


# -- Dirac operator checks ---------------------------------------------------

def _geometry(profile, xs, branch):
    params = profile.params
    fx = profile.fields(xs, branch=branch)
    g0, g1 = ga.build_gamma(params, fx.a, fx.b)
    om = ga.build_omega(params, fx.da, profile.eta)
    met = ga.build_metric(params, fx.a, fx.b)
    _, _, up0, up1 = ga.connection_contractions(params, fx.a, fx.b, fx.da, fx.db)
    return g0, g1, om, met, up0, up1


def _check_stencil(profile, xs, reach):
    lo, hi = profile.domain
    if np.min(xs) - reach <= lo or np.max(xs) + reach >= hi:
        raise DomainError("finite-difference stencil leaves the configuration space")


def _apply_dirac(g0, g1, om, psi, dpsi, epsilon):
    # (gamma^mu d_mu + Omega) acting on exp(-i eps t) psi(x); d_t -> -i eps
    return (-1j * epsilon) * np.einsum("nij,nj->ni", g0, psi) \
        + np.einsum("nij,nj->ni", g1, dpsi) + np.einsum("nij,nj->ni", om, psi)


def dirac_residual(profile, psi_fn, epsilon: float, xs, h: float = 1e-5, *, branch=None,
                   coupling=None) -> float:
    """max |i(gamma^mu d_mu + Omega) Psi - m Psi| / max|Psi| on the points ``xs``.

    ``psi_fn`` maps an array of x to an ``(n, 2)`` array of spinor values
    (the time factor exp(-i eps t) is implied).  ``coupling`` optionally maps
    x to (S, W, A_0, A_1); the operator then becomes
    i(gamma^mu (d_mu + i A_mu) + Omega) - (m + S + i W gamma^5).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    _check_stencil(profile, xs, h)
    g0, g1, om, _, _, _ = _geometry(profile, xs, branch)
    psi = psi_fn(xs)
    dpsi = central_diff(psi_fn, xs, h)
    res = 1j * _apply_dirac(g0, g1, om, psi, dpsi, epsilon) - profile.params.mass * psi
    if coupling is not None:
        S, W, A0, A1 = (np.broadcast_to(np.asarray(v, dtype=float), xs.shape) for v in coupling(xs))
        g5 = 1j * g0 @ g1
        res = res - np.einsum("nij,nj->ni", g0, psi) * A0[:, None] \
            - np.einsum("nij,nj->ni", g1, psi) * A1[:, None] \
            - S[:, None] * psi - 1j * W[:, None] * np.einsum("nij,nj->ni", g5, psi)
    return float(np.max(np.abs(res)) / np.max(np.abs(psi)))


def dirac_square_vs_kg(profile, psi_fn, epsilon: float, xs, h: float = 1e-4, *, branch=None) -> float:
    """Cross-residual between the squared Dirac operator and the Klein-Gordon operator.

    The first-order operator L = gamma^mu d_mu + Omega is applied twice by
    nesting central differences; the Klein-Gordon side
    g^{mu nu} d_mu d_nu + G^sigma d_sigma uses the same nested stencil.
    Returns max(|D^2 Psi - m^2 Psi|, |KG Psi + m^2 Psi|) / max|Psi| with
    D = iL, so exact solutions give pure truncation error and anything else
    gives an O(1) value.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    _check_stencil(profile, xs, 2 * h)
    m = profile.params.mass
    br = branch
    if br is None:
        br = profile.branch_of(float(xs[0]))

    def first(x):
        g0, g1, om, _, _, _ = _geometry(profile, x, br)
        return _apply_dirac(g0, g1, om, psi_fn(x), central_diff(psi_fn, x, h), epsilon)

    g0, g1, om, met, up0, up1 = _geometry(profile, xs, br)
    l_psi = first(xs)
    l2_psi = _apply_dirac(g0, g1, om, l_psi, central_diff(first, xs, h), epsilon)
    psi = psi_fn(xs)

    d1 = central_diff(psi_fn, xs, h)
    d2 = central_diff(lambda x: central_diff(psi_fn, x, h), xs, h)
    gu = met.g_upper
    kg = (gu[:, 0, 0, None] * (-epsilon**2) * psi
          + 2 * gu[:, 0, 1, None] * (-1j * epsilon) * d1
          + gu[:, 1, 1, None] * d2
          + up0[:, None] * (-1j * epsilon) * psi
          + up1[:, None] * d1)
    r_dirac = np.max(np.abs(-l2_psi - m * m * psi))
    r_kg = np.max(np.abs(kg + m * m * psi))
    return float(max(r_dirac, r_kg) / np.max(np.abs(psi)))


def christoffel_contraction(profile, xs, h: float = 1e-5, *, branch=None) -> np.ndarray:
    """G^sigma = g^{ab} Gamma^sigma_{ab} from finite differences of the lower metric.

    Shape ``(n, 2)``.  Independent of the closed-form contractions; only
    x-derivatives are non-zero for a static background.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    params = profile.params

    def lower(x):
        fx = profile.fields(x, branch=branch)
        return ga.build_metric(params, fx.a, fx.b).g_lower

    fx = profile.fields(xs, branch=branch)
    gu = ga.build_metric(params, fx.a, fx.b).g_upper
    dgl = np.zeros(xs.shape + (2, 2, 2))  # [n, derivative index c, i, j]
    dgl[:, 1] = central_diff(lower, xs, h)
    # Gamma^s_ab = 1/2 g^{sn} (d_a g_nb + d_b g_na - d_n g_ab)
    bracket = (np.einsum("xanb->xnab", dgl) + np.einsum("xbna->xnab", dgl)
               - np.einsum("xnab->xnab", dgl))
    chris = 0.5 * np.einsum("xsn,xnab->xsab", gu, bracket)
    return np.einsum("xab,xsab->xs", gu, chris)
