"""Position-dependent gamma matrices, metric and connection contractions.

All constructors accept real profile values ``a``, ``b`` (and derivatives)
either as scalars or as numpy arrays; matrix results carry a trailing
``(2, 2)`` axis.  The imaginary unit that makes the profile functions real
(``a -> i a``, ``b -> i b``) is applied here, so callers only ever handle
real backgrounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError, SingularMetricError

I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    """Global constants of the model (hbar = c = 1, lengths in units of 1/m).

    ``beta`` and ``kappa`` are derived.  ``eta`` is optional: a background
    family fixes it, and a value given here is only checked for consistency.
    """

    alpha: float = 0.0
    tau: float = 1.0
    eta: float | None = None
    lam: float = 0.5
    mass: float = 1.0
    curvature_R: float = 0.0
    beta: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.tau == 0 or not math.isfinite(self.tau):
            raise ParameterError("tau must be finite and non-zero")
        if math.isclose(self.alpha**2 * self.tau**2, 1.0, rel_tol=1e-14, abs_tol=0.0):
            raise ParameterError("alpha^2 tau^2 must differ from 1")
        if self.curvature_R < 0:
            raise ParameterError("curvature_R must be non-negative")
        if self.mass < 0:
            raise ParameterError("mass must be non-negative")
        object.__setattr__(self, "beta", -self.alpha * self.tau**2)
        object.__setattr__(self, "kappa", math.sqrt(self.curvature_R))

    @property
    def k_ab(self) -> float:
        """The recurring factor 1 + alpha*beta = 1 - alpha^2 tau^2."""
        return 1.0 + self.alpha * self.beta

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "tau": self.tau,
            "eta": self.eta,
            "lam": self.lam,
            "mass": self.mass,
            "curvature_R": self.curvature_R,
        }


class MetricTensor(NamedTuple):
    g_upper: np.ndarray
    g_lower: np.ndarray
    det: np.ndarray  # det(g_upper) = -(1 + alpha beta) a^2


def projector(params: ModelParams) -> np.ndarray:
    """The constant matrix [[1, alpha], [beta, -1]]; it squares to (1 + alpha beta) I."""
    return np.array([[1.0, params.alpha], [params.beta, -1.0]], dtype=complex)


def offdiag(params: ModelParams) -> np.ndarray:
    """[[0, 1/tau], [tau, 0]], the constant part of gamma^0."""
    return np.array([[0.0, 1.0 / params.tau], [params.tau, 0.0]], dtype=complex)


def _col(v) -> np.ndarray:
    return np.asarray(v, dtype=float)[..., None, None]


def anticommutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y + y @ x


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def max_entry(m: np.ndarray) -> float:
    """Max-absolute-entry norm, taken over every matrix in a stack."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def build_gamma(params: ModelParams, a, b) -> tuple[np.ndarray, np.ndarray]:
    """Return (gamma^0, gamma^1) for real profile values a, b."""
    p = projector(params)
    g1 = 1j * _col(a) * p
    g0 = 1j * _col(b) * p + offdiag(params)
    if not (np.all(np.isfinite(g0)) and np.all(np.isfinite(g1))):
        raise DomainError("non-finite gamma matrix entries")
    return g0, g1


def gamma5(params: ModelParams, a, b) -> np.ndarray:
    g0, g1 = build_gamma(params, a, b)
    return 1j * g0 @ g1


def build_metric(params: ModelParams, a, b) -> MetricTensor:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = params.k_ab
    g00 = 1.0 - k * b**2
    g01 = -k * a * b
    g11 = -k * a**2
    det = g00 * g11 - g01**2
    if np.any(det == 0):
        raise SingularMetricError("metric is singular (a = 0)")
    upper = np.stack([np.stack([g00, g01], -1), np.stack([g01, g11], -1)], -2)
    lower = np.stack(
        [np.stack([g11 / det, -g01 / det], -1), np.stack([-g01 / det, g00 / det], -1)], -2
    )
    return MetricTensor(upper, lower, det)


def connection_contractions(params: ModelParams, a, b, da, db):
    """Contracted Christoffel symbols (G_0, G_1, G^0, G^1) for a static background."""
    a, b, da, db = (np.asarray(v, dtype=float) for v in (a, b, da, db))
    if np.any(a == 0):
        raise SingularMetricError("connection contractions need a != 0")
    k = params.k_ab
    low0 = k * (a * db - da * b)
    low1 = -(da + b * low0) / a
    up0 = k * a * db
    up1 = k * a * da
    return low0, low1, up0, up1


def sigma_connections(params: ModelParams, a, b, da, db, lam: float | None = None):
    """Spin-connection projections (Sigma^0, Sigma^1, Sigma_0, Sigma_1) at coupling ``lam``."""
    lam = params.lam if lam is None else lam
    a, b, da, db = (np.asarray(v, dtype=float) for v in (a, b, da, db))
    if np.any(a == 0):
        raise SingularMetricError("spin connections need a != 0")
    k = params.k_ab
    up0 = k * (a * db + lam * da * b)
    up1 = (1.0 + lam) * k * a * da
    low0 = k * (a * db - da * b)
    low1 = -(1.0 + lam) * da / a - (b / a) * low0
    return up0, up1, low0, low1


def build_omega(params: ModelParams, da, eta: float) -> np.ndarray:
    """Omega = -i a' P + eta C, valid once Sigma_0 has been fixed to the constant eta."""
    return -1j * _col(da) * projector(params) + eta * offdiag(params)


def assemble_omega(params: ModelParams, a, b, da, db, lam: float) -> np.ndarray:
    """Omega from its definition i lam a' P + Sigma_mu gamma^mu, for any coupling lam.

    Unlike :func:`build_omega` this does not assume Sigma_0 = eta; it is the
    independent route used to show that lam drops out.
    """
    g0, g1 = build_gamma(params, a, b)
    _, _, s0, s1 = sigma_connections(params, a, b, da, db, lam)
    return 1j * lam * _col(da) * projector(params) + _col(s0) * g0 + _col(s1) * g1


def algebra_residual(params: ModelParams, profile, x: float, h: float | None = None,
                     *, relative: bool = False) -> tuple[float, float]:
    """Residuals of the operator algebra at ``x``.

    res5a = max_mu |gamma^1 d_x gamma^mu + {Omega, gamma^mu} - G^mu I|,
    res5b = |gamma^1 d_x Omega + Omega^2|, with central differences in x
    (time derivatives vanish for a static metric).  The stencil stays on the
    smooth branch that owns ``x``, so glued profiles can be probed at the
    origin.  With ``relative=True`` each residual is divided by the size of
    the products entering its identity (Omega^2 can cancel to zero exactly,
    so the product of norms is used rather than the norm of the product).
    """
    lo, hi = profile.domain
    if h is None:
        width = hi - lo
        h = 1e-5 * width if math.isfinite(width) else 1e-5
    if not (lo < x - h and x + h < hi):
        raise DomainError(f"x={x!r} with step {h!r} leaves the domain ({lo!r}, {hi!r})")
    branch = profile.branch_of(x)
    xs = np.array([x - h, x, x + h])
    fx = profile.fields(xs, branch=branch)
    eta = profile.eta
    g0, g1 = build_gamma(params, fx.a, fx.b)
    om = build_omega(params, fx.da, eta)
    _, _, up0, up1 = connection_contractions(params, fx.a[1], fx.b[1], fx.da[1], fx.db[1])

    res_a, scale_a = 0.0, 0.0
    for gm, gup in ((g0, up0), (g1, up1)):
        dg = (gm[2] - gm[0]) / (2 * h)
        t1 = g1[1] @ dg
        t2 = anticommutator(om[1], gm[1])
        t3 = gup * I2
        res_a = max(res_a, max_entry(t1 + t2 - t3))
        scale_a = max(scale_a, max_entry(t1), max_entry(om[1]) * max_entry(gm[1]), max_entry(t3))
    dom = (om[2] - om[0]) / (2 * h)
    t1 = g1[1] @ dom
    t2 = om[1] @ om[1]
    res_b = max_entry(t1 + t2)
    scale_b = max(max_entry(t1), max_entry(om[1]) ** 2)
    if relative:
        return res_a / max(scale_a, 1e-300), res_b / max(scale_b, 1e-300)
    return res_a, res_b
