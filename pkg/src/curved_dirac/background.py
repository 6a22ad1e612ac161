"""Static backgrounds: the profile functions a(x), b(x) and what follows from them.

Every profile solves y'' = f y for both a and b and is normalised so that

    (1 + alpha beta) (a b' - a' b) = eta          (constant spin projection)
    a'^2 - a a''                  = eta^2 / (1 + alpha beta)

The constant-f families are glued at the origin from two smooth branches
(one per sign of x) so that a vanishes at both edges of configuration
space; ``branch`` is +1 for x >= 0 and -1 for x < 0.  With a0 < 0 the
association between the sign of x and the sign in front of the sinh/sin
term is reversed.

Trigonometric family.  For f = -zeta R the same procedure that gives the
hyperbolic family (b(0) = 0 for the flat limit, then the two constraints)
yields, with k = kappa sqrt(zeta) and rho_t = sqrt((vartheta/a0)^2 - 1),

    sqrt(1 + alpha beta) a = a0 [cos(kx) -/+ rho_t sin(kx)]
    sqrt(1 + alpha beta) b = (vartheta / a0) sin(kx),     eta = vartheta k,

which needs vartheta >= |a0|; the edges sit at sin(kX) = |a0| / vartheta,
where a vanishes as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import (BoundaryNotFoundError, ConstraintError, DomainError,
                     TurningPointError, UnsupportedFamilyError)
from .gamma_algebra import ModelParams
from .verify import adaptive_quadrature


class Fields(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    da: np.ndarray
    db: np.ndarray
    d2a: np.ndarray
    d2b: np.ndarray


# -- families ------------------------------------------------------------------

@dataclass(frozen=True)
class LinearFlat:
    """f = 0.  a = (theta/xi)(1 -/+ xi kappa x), b = xi kappa x, eta = theta kappa."""

    theta: float
    xi: float
    sign_a1: int = 1
    tag = "LinearFlat"


@dataclass(frozen=True)
class HyperbolicConst:
    """f = zeta R > 0."""

    zeta: float
    vartheta: float
    a0: float
    tag = "HyperbolicConst"


@dataclass(frozen=True)
class TrigConst:
    """f = -zeta R < 0; needs vartheta >= |a0|."""

    zeta: float
    vartheta: float
    a0: float
    tag = "TrigConst"


@dataclass(frozen=True)
class InverseSquareCritical:
    """f = -1/(4 x^2) on x > 0: a = sqrt(kx)[a0 + a1 ln(kx)], likewise b.

    f is not constant, so a'^2 - a a'' drifts and the family only exists
    with ``strict=False``.
    """

    a0: float
    a1: float
    b0: float
    b1: float
    window: float = 100.0
    tag = "InverseSquareCritical"


@dataclass(frozen=True)
class Numeric:
    """f(x) = sum_i f_coeffs[i] x^i, integrated numerically from x0.

    ``a_init``/``b_init`` are (value, slope) at x0; the solutions are then
    rescaled so both constraints hold (possible only for constant f).
    """

    f_coeffs: tuple[float, ...]
    a_init: tuple[float, float] = (1.0, 0.0)
    b_init: tuple[float, float] = (0.0, 1.0)
    x0: float = 0.0
    window: tuple[float, float] = (-10.0, 10.0)
    steps: int = 100_000
    tag = "Numeric"


@dataclass(frozen=True)
class Flat:
    """Degenerate background: a = h, b = b0 constants, eta = 0."""

    h: float = 1.0
    b0: float = 0.0
    tag = "Flat"


FAMILIES = {cls.tag: cls for cls in (LinearFlat, HyperbolicConst, TrigConst,
                                     InverseSquareCritical, Numeric, Flat)}


def hyperbolic_from_linear(lin: LinearFlat, zeta: float) -> HyperbolicConst:
    """HyperbolicConst that reduces to ``lin`` as zeta -> 0 (same eta, same a(0), same b'(0))."""
    return HyperbolicConst(zeta=zeta, vartheta=lin.theta / math.sqrt(zeta), a0=lin.theta / lin.xi)


# -- profile -------------------------------------------------------------------

class BackgroundProfile:
    """Immutable background; evaluators are vectorised over x."""

    glued = True

    def __init__(self, family, params: ModelParams, eta: float, domain: tuple[float, float],
                 strict: bool = True):
        self.family = family
        self.params = params
        self.eta = float(eta)
        self.domain = (float(domain[0]), float(domain[1]))
        self.strict = strict
        self._sk = math.sqrt(params.k_ab)

    def __repr__(self):
        return f"{type(self).__name__}({self.family!r}, eta={self.eta!r}, domain={self.domain!r})"

    # subclasses provide _fields(x, branch) on arrays with branch in {+1, -1, 0}
    def _fields(self, x, branch):
        raise NotImplementedError

    def branch_of(self, x) -> int:
        if not self.glued:
            return 0
        return 1 if x >= 0 else -1

    def fields(self, x, branch: int | None = None) -> Fields:
        """a, b and derivatives at x.  ``branch`` forces one smooth piece everywhere."""
        x = np.asarray(x, dtype=float)
        if branch is not None or not self.glued:
            return self._fields(x, branch if self.glued else 0)
        plus = self._fields(x, 1)
        minus = self._fields(x, -1)
        return Fields(*(np.where(x >= 0, p, q) for p, q in zip(plus, minus)))

    def a(self, x):
        return self.fields(x).a

    def b(self, x):
        return self.fields(x).b

    def f(self, x):
        fx = self.fields(x)
        return fx.d2a / fx.a

    def g00(self, x):
        return 1.0 - self.params.k_ab * self.fields(x).b ** 2

    def contains(self, x) -> np.ndarray:
        lo, hi = self.domain
        x = np.asarray(x, dtype=float)
        return (x > lo) & (x < hi)

    def _require_inside(self, x):
        if not np.all(self.contains(x)):
            raise DomainError(f"x outside the open domain {self.domain}")

    # characteristic functions: closed form in subclasses when available
    def y(self, x):
        return self.y_quad(x)

    def q(self, x):
        return self.q_quad(x)

    def _origin(self) -> float:
        return 0.0

    def _quad(self, integrand, x):
        self._require_inside(x)
        x0 = self._origin()
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([adaptive_quadrature(integrand, x0, float(v)) for v in xa])
        return out if np.ndim(x) else float(out[0])

    def y_quad(self, x):
        """Quadrature of dy/dx = 1 / (a sqrt(1 + alpha beta)) from the origin."""
        return self._quad(lambda s: 1.0 / (self._sk * float(self.fields(s).a)), x)

    def q_quad(self, x):
        """Quadrature of dq/dx = b / a from the origin."""
        def integrand(s):
            fx = self.fields(s)
            return float(fx.b / fx.a)
        return self._quad(integrand, x)

    def x_of_y(self, y):
        """Invert y(x) by root finding inside the domain."""
        lo, hi = self.domain
        ya = np.atleast_1d(np.asarray(y, dtype=float))
        out = []
        for v in ya:
            if v == 0:
                out.append(self._origin())
                continue
            # y(origin) = 0 brackets exactly; only the open edge is pulled inwards
            lo_s, hi_s = (self._origin(), hi) if v > 0 else (lo, self._origin())
            span = hi_s - lo_s
            a_, b_ = (lo_s, hi_s - 1e-15 * span) if v > 0 else (lo_s + 1e-15 * span, hi_s)
            out.append(brentq(lambda s: self.y(s) - v, a_, b_, xtol=1e-15, rtol=1e-15))
        out = np.array(out)
        return out if np.ndim(y) else float(out[0])

    # constraints
    def constraint_residuals(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(Sigma_0 - eta, a'^2 - a a'' - eta^2/(1 + alpha beta)) at x."""
        k = self.params.k_ab
        fx = self.fields(x)
        sig = k * (fx.a * fx.db - fx.da * fx.b) - self.eta
        flat = fx.da**2 - fx.a * fx.d2a - self.eta**2 / k
        return sig, flat

    def sample_points(self, n: int = 100) -> np.ndarray:
        """Chebyshev points on the interior of the domain (clipped to +-50/kappa if unbounded)."""
        lo, hi = self.domain
        lim = 50.0 / max(self.params.kappa, 1.0)
        lo = lo if math.isfinite(lo) else -lim
        hi = hi if math.isfinite(hi) else lim
        j = np.arange(n)
        t = np.cos(np.pi * (2 * j + 1) / (2 * n))
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t[::-1]

    def check_constraints(self, tol: float = 1e-10):
        sig, flat = self.constraint_residuals(self.sample_points(64))
        scale = max(1.0, abs(self.eta), self.eta**2)
        if np.max(np.abs(sig)) > tol * scale:
            raise ConstraintError(f"Sigma_0 deviates from eta by {np.max(np.abs(sig)):.3e}")
        if np.max(np.abs(flat)) > tol * scale:
            raise ConstraintError(
                f"a'^2 - a a'' deviates from eta^2/(1+alpha beta) by {np.max(np.abs(flat)):.3e}")

    # serialisation
    def to_json(self) -> dict:
        fam = asdict(self.family)
        return {
            "family": self.family.tag,
            "parameters": fam,
            "eta": self.eta,
            "domain": list(self.domain),
            "model_params": self.params.to_dict(),
            "strict": self.strict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def profile_from_json(doc) -> BackgroundProfile:
    """Rebuild a profile and verify the stored reals reproduce bit for bit."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    tag = doc["family"]
    if tag not in FAMILIES:
        raise UnsupportedFamilyError(f"unknown family {tag!r}")
    cls = FAMILIES[tag]
    pars = dict(doc["parameters"])
    for key in ("a_init", "b_init", "window", "f_coeffs"):
        if key in pars and isinstance(pars[key], list):
            pars[key] = tuple(pars[key])
    family = cls(**pars)
    params = ModelParams(**doc["model_params"])
    prof = solve_profile(family, params, strict=doc.get("strict", True))
    if prof.eta != doc["eta"] or list(prof.domain) != list(doc["domain"]):
        raise ConstraintError("stored eta/domain do not match the rebuilt profile")
    return prof


# -- concrete families ---------------------------------------------------------

class _LinearFlatProfile(BackgroundProfile):
    def __init__(self, family: LinearFlat, params: ModelParams, strict=True):
        if family.theta <= 0 or family.xi <= 0:
            raise ConstraintError("LinearFlat needs theta > 0 and xi > 0")
        if family.sign_a1 not in (1, -1):
            raise ConstraintError("sign_a1 must be +1 or -1")
        if params.kappa <= 0:
            raise ConstraintError("LinearFlat needs curvature_R > 0")
        self.c = family.xi * params.kappa
        eta = family.theta * params.kappa
        super().__init__(family, params, eta, (-1.0 / self.c, 1.0 / self.c), strict)

    def _s(self, branch):
        # sign multiplying xi kappa x in a(x); by convention -1 on x > 0
        return -self.family.sign_a1 * branch

    def _fields(self, x, branch):
        s = self._s(branch)
        th, xi = self.family.theta, self.family.xi
        sk = self._sk
        a = th / xi * (1 + s * self.c * x) / sk
        b = self.c * x / sk
        one = np.ones_like(x)
        zero = np.zeros_like(x)
        return Fields(a, b, s * th * self.params.kappa / sk * one, self.c / sk * one, zero, zero)

    def _y_branch(self, x, s):
        return np.log1p(s * self.c * x) / (s * self.eta)

    def y(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self._y_branch(x, self._s(1)), self._y_branch(x, self._s(-1)))
        return out if out.ndim else float(out)

    def q(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        s = np.where(x >= 0, self._s(1), self._s(-1))
        yv = np.where(x >= 0, self._y_branch(x, self._s(1)), self._y_branch(x, self._s(-1)))
        out = s * (self.family.xi / self.family.theta * x - yv)
        return out if out.ndim else float(out)

    def x_of_y(self, y):
        y = np.asarray(y, dtype=float)
        s = np.where(y >= 0, self._s(1), self._s(-1))
        out = np.expm1(s * self.eta * y) / (s * self.c)
        return out if out.ndim else float(out)


class _ExpRatioMixin:
    @staticmethod
    def _exp_ratio_integral(t, alpha, beta):
        """Antiderivative of (e^t + alpha e^-t)/(e^t + beta e^-t)."""
        return alpha / beta * t + (beta - alpha) / (2 * beta) * np.log(np.abs(np.exp(2 * t) + beta))


class _HyperbolicProfile(BackgroundProfile, _ExpRatioMixin):
    def __init__(self, family: HyperbolicConst, params: ModelParams, strict=True):
        if family.zeta <= 0 or family.vartheta <= 0 or family.a0 == 0:
            raise ConstraintError("HyperbolicConst needs zeta > 0, vartheta > 0, a0 != 0")
        if params.kappa <= 0:
            raise ConstraintError("HyperbolicConst needs curvature_R > 0")
        self.k = params.kappa * math.sqrt(family.zeta)
        self.rho = math.sqrt(1.0 + (family.vartheta / family.a0) ** 2)
        self.sigma = math.sqrt((self.rho + 1) / (self.rho - 1))
        eta = family.vartheta * self.k
        x_edge = abs(math.asinh(family.a0 / family.vartheta)) / self.k
        super().__init__(family, params, eta, (-x_edge, x_edge), strict)

    def _s(self, branch):
        return -math.copysign(1.0, self.family.a0) * branch

    def _fields(self, x, branch):
        s = self._s(branch)
        a0, th, k, sk = self.family.a0, self.family.vartheta, self.k, self._sk
        ch, sh = np.cosh(k * x), np.sinh(k * x)
        a = a0 * (ch + s * self.rho * sh) / sk
        da = a0 * k * (sh + s * self.rho * ch) / sk
        b = th / a0 * sh / sk
        db = th / a0 * k * ch / sk
        return Fields(a, b, da, db, k * k * a, k * k * b)

    def _branch_consts(self, s):
        c = (1 - s * self.rho) / (1 + s * self.rho)  # always negative
        return c, math.sqrt(-c)

    def _y_branch(self, x, s):
        c, beta = self._branch_consts(s)
        u = np.exp(self.k * x)
        pref = 1.0 / (self.k * self.family.a0 * (1 + s * self.rho) * 2 * beta)
        return 2 * pref * (np.log(np.abs((u - beta) / (u + beta))) - math.log(abs((1 - beta) / (1 + beta))))

    def _q_branch(self, x, s):
        c, _ = self._branch_consts(s)
        a0 = self.family.a0
        pref = self.family.vartheta / (a0 * a0 * self.k * (1 + s * self.rho))
        t = self.k * x
        return pref * (self._exp_ratio_integral(t, -1.0, c) - self._exp_ratio_integral(0.0, -1.0, c))

    def y(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self._y_branch(x, self._s(1)), self._y_branch(x, self._s(-1)))
        return out if out.ndim else float(out)

    def q(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self._q_branch(x, self._s(1)), self._q_branch(x, self._s(-1)))
        return out if out.ndim else float(out)


class _TrigProfile(BackgroundProfile):
    def __init__(self, family: TrigConst, params: ModelParams, strict=True):
        if family.zeta <= 0 or family.vartheta <= 0 or family.a0 == 0:
            raise ConstraintError("TrigConst needs zeta > 0, vartheta > 0, a0 != 0")
        if family.vartheta < abs(family.a0):
            raise ConstraintError("TrigConst needs vartheta >= |a0| (else a'^2 + k^2 a^2 < eta^2)")
        if params.kappa <= 0:
            raise ConstraintError("TrigConst needs curvature_R > 0")
        self.k = params.kappa * math.sqrt(family.zeta)
        self.rho = math.sqrt((family.vartheta / family.a0) ** 2 - 1.0)
        self.phi = math.atan(self.rho)
        eta = family.vartheta * self.k
        x_edge = math.asin(abs(family.a0) / family.vartheta) / self.k
        super().__init__(family, params, eta, (-x_edge, x_edge), strict)

    def _s(self, branch):
        return -math.copysign(1.0, self.family.a0) * branch

    def _fields(self, x, branch):
        s = self._s(branch)
        a0, th, k, sk = self.family.a0, self.family.vartheta, self.k, self._sk
        c, sn = np.cos(k * x), np.sin(k * x)
        a = a0 * (c + s * self.rho * sn) / sk
        da = a0 * k * (-sn + s * self.rho * c) / sk
        b = th / a0 * sn / sk
        db = th / a0 * k * c / sk
        return Fields(a, b, da, db, -k * k * a, -k * k * b)

    @staticmethod
    def _lnsec(w):
        return np.log(np.abs((1 + np.sin(w)) / np.cos(w)))

    def _y_branch(self, x, s):
        amp = self.family.vartheta / abs(self.family.a0)  # sqrt(1 + rho^2)
        w = self.k * x - s * self.phi
        return (self._lnsec(w) - self._lnsec(-s * self.phi)) / (self.k * self.family.a0 * amp)

    def _q_branch(self, x, s):
        a0 = self.family.a0
        t = self.k * x
        inner = s * self.rho * t - np.log(np.abs(np.cos(t) + s * self.rho * np.sin(t)))
        return self.family.vartheta / (a0 * a0 * self.k * (1 + self.rho**2)) * inner

    def y(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self._y_branch(x, self._s(1)), self._y_branch(x, self._s(-1)))
        return out if out.ndim else float(out)

    def q(self, x):
        self._require_inside(x)
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self._q_branch(x, self._s(1)), self._q_branch(x, self._s(-1)))
        return out if out.ndim else float(out)


class _FlatProfile(BackgroundProfile):
    def __init__(self, family: Flat, params: ModelParams, strict=True):
        if family.h == 0:
            raise ConstraintError("Flat needs h != 0")
        if params.k_ab * family.b0**2 >= 1:
            raise ConstraintError("Flat with |b0| this large has g00 <= 0 everywhere")
        super().__init__(family, params, 0.0, (-math.inf, math.inf), strict)
        self.glued = False

    def _fields(self, x, branch):
        one = np.ones_like(x)
        zero = np.zeros_like(x)
        sk = self._sk
        return Fields(self.family.h / sk * one, self.family.b0 / sk * one, zero, zero, zero, zero)

    def y(self, x):
        x = np.asarray(x, dtype=float)
        out = x / self.family.h
        return out if out.ndim else float(out)

    def q(self, x):
        x = np.asarray(x, dtype=float)
        out = self.family.b0 / self.family.h * x
        return out if out.ndim else float(out)

    def x_of_y(self, y):
        return np.asarray(y, dtype=float) * self.family.h if np.ndim(y) else float(y) * self.family.h


def _bisect_edge(g00, start: float, stop: float, nscan: int = 2000) -> float:
    xs = np.linspace(start, stop, nscan + 1)
    vals = g00(xs)
    bad = np.nonzero(vals <= 0)[0]
    if bad.size == 0:
        raise BoundaryNotFoundError(f"g00 keeps its sign on [{start!r}, {stop!r}]")
    j = int(bad[0])
    if vals[j] == 0:
        return float(xs[j])
    lo_, hi_ = sorted((float(xs[j - 1]), float(xs[j])))
    scale = max(abs(lo_), abs(hi_))
    return float(brentq(lambda s: float(g00(s)), lo_, hi_, xtol=1e-13 * scale, rtol=1e-15))


class _InverseSquareProfile(BackgroundProfile):
    def __init__(self, family: InverseSquareCritical, params: ModelParams, strict=True):
        if params.kappa <= 0:
            raise ConstraintError("InverseSquareCritical needs curvature_R > 0")
        self.glued = False
        kap = params.kappa
        eta = params.k_ab * kap * (family.a0 * family.b1 - family.a1 * family.b0)
        self.family, self.params, self._sk, self.eta = family, params, math.sqrt(params.k_ab), eta
        x_hi = _bisect_edge(lambda s: 1.0 - params.k_ab * self._fields(np.asarray(s), 0).b ** 2,
                            1e-12 / kap, family.window / kap)
        super().__init__(family, params, eta, (0.0, x_hi), strict)
        self.glued = False

    def _fields(self, x, branch):
        kap = self.params.kappa
        u = kap * np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            su = np.sqrt(u)
            lu = np.log(u)

            def parts(c0, c1):
                v = su * (c0 + c1 * lu)
                dv = kap * (c0 + c1 * lu + 2 * c1) / (2 * su)
                return v, dv
            a, da = parts(self.family.a0, self.family.a1)
            b, db = parts(self.family.b0, self.family.b1)
            f = -0.25 / np.asarray(x, dtype=float) ** 2
        return Fields(a, b, da, db, f * a, f * b)

    def _origin(self):
        return 0.0

    def _require_inside(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if not np.all((x >= lo) & (x < hi)):
            raise DomainError(f"x outside the domain [{lo}, {hi})")

    def y(self, x):
        if np.ndim(x) == 0 and float(x) == 0.0:
            return 0.0
        return self.y_quad(x)


class _NumericProfile(BackgroundProfile):
    def __init__(self, family: Numeric, params: ModelParams, strict=True):
        if params.eta is None:
            raise ConstraintError("Numeric family needs params.eta")
        lo, hi = family.window
        if not lo < family.x0 < hi:
            raise ConstraintError("x0 must lie inside the integration window")
        self.glued = False
        coeffs = np.asarray(family.f_coeffs, dtype=float)
        fpoly = np.polynomial.Polynomial(coeffs)
        h = (hi - lo) / family.steps
        n_left = int(math.ceil((family.x0 - lo) / h))
        n_right = int(math.ceil((hi - family.x0) / h))
        xs = family.x0 + h * np.arange(-n_left, n_right + 1)
        yl = _rk4_linear2(fpoly, family.x0, -h, n_left, family.a_init, family.b_init)
        yr = _rk4_linear2(fpoly, family.x0, h, n_right, family.a_init, family.b_init)
        sol = np.concatenate([yl[::-1][:-1], yr])  # columns: a, a', b, b'

        k = params.k_ab
        eta = float(params.eta)
        a_, da_, b_, db_ = sol[n_left]
        wr = a_ * db_ - da_ * b_
        if wr == 0:
            raise ConstraintError("initial data are not independent")
        flat0 = da_**2 - fpoly(family.x0) * a_**2
        scale_a = 1.0
        if flat0 > 0:
            scale_a = eta / (math.sqrt(k) * math.sqrt(flat0)) if eta != 0 else 1.0
        elif strict:
            raise ConstraintError("a'^2 - f a^2 <= 0: cannot match eta^2/(1 + alpha beta) > 0")
        scale_b = eta / (k * scale_a * wr)
        sol[:, :2] *= scale_a
        sol[:, 2:] *= scale_b

        self.fpoly = fpoly
        self.dfpoly = fpoly.deriv()
        fx = fpoly(xs)
        self._sa = CubicHermiteSpline(xs, sol[:, 0], sol[:, 1])
        self._sda = CubicHermiteSpline(xs, sol[:, 1], fx * sol[:, 0])
        self._sb = CubicHermiteSpline(xs, sol[:, 2], sol[:, 3])
        self._sdb = CubicHermiteSpline(xs, sol[:, 3], fx * sol[:, 2])
        self.family, self.params, self.eta, self._sk = family, params, eta, math.sqrt(k)

        g00 = lambda s: 1.0 - k * self._sb(s) ** 2
        if float(g00(family.x0)) <= 0:
            raise ConstraintError("g00 <= 0 at x0")
        if np.all(sol[:, 2] == 0):
            lo_e, hi_e = -math.inf, math.inf
        else:
            hi_e = _bisect_edge(g00, family.x0, hi)
            lo_e = _bisect_edge(g00, family.x0, lo)
        super().__init__(family, params, eta, (lo_e, hi_e), strict)
        self.glued = False

    def _fields(self, x, branch):
        x = np.asarray(x, dtype=float)
        a = self._sa(x)
        b = self._sb(x)
        f = self.fpoly(x)
        return Fields(a, b, self._sda(x), self._sdb(x), f * a, f * b)

    def _origin(self):
        return self.family.x0


def _rk4_linear2(fpoly, x0, h, n, a_init, b_init) -> np.ndarray:
    """RK4 for the pair (a, b) of solutions of y'' = f y, as rows (a, a', b, b')."""
    nodes = x0 + h * np.arange(n + 1)
    f_nodes = fpoly(nodes).tolist()
    f_mid = fpoly(nodes[:-1] + 0.5 * h).tolist()
    a, da = map(float, a_init)
    b, db = map(float, b_init)
    out = [(a, da, b, db)]
    for i in range(n):
        f0, fm, f1 = f_nodes[i], f_mid[i], f_nodes[i + 1]
        row = []
        for y, dy in ((a, da), (b, db)):
            k1y, k1d = dy, f0 * y
            k2y, k2d = dy + 0.5 * h * k1d, fm * (y + 0.5 * h * k1y)
            k3y, k3d = dy + 0.5 * h * k2d, fm * (y + 0.5 * h * k2y)
            k4y, k4d = dy + h * k3d, f1 * (y + h * k3y)
            row.append(y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y))
            row.append(dy + h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d))
        a, da, b, db = row
        out.append((a, da, b, db))
    return np.array(out)


_BUILDERS = {
    LinearFlat: _LinearFlatProfile,
    HyperbolicConst: _HyperbolicProfile,
    TrigConst: _TrigProfile,
    InverseSquareCritical: _InverseSquareProfile,
    Numeric: _NumericProfile,
    Flat: _FlatProfile,
}


def solve_profile(family, params: ModelParams, *, strict: bool = True) -> BackgroundProfile:
    """Build the background for ``family``.

    With ``strict`` (the default) both constraints are checked on sample
    points and a :class:`ConstraintError` is raised if either fails; pass
    ``strict=False`` to obtain families such as the inverse-square one for
    which only Sigma_0 = eta can be met.
    """
    try:
        builder = _BUILDERS[type(family)]
    except KeyError:
        raise UnsupportedFamilyError(f"unsupported family {family!r}") from None
    prof = builder(family, params, strict)
    if params.eta is not None and not math.isclose(prof.eta, params.eta, rel_tol=1e-12, abs_tol=1e-15):
        raise ConstraintError(f"requested eta={params.eta!r} but the family gives {prof.eta!r}")
    if strict:
        prof.check_constraints()
    return prof


def boundaries(profile: BackgroundProfile) -> tuple[float, float]:
    return profile.domain


def bisect_boundaries(profile: BackgroundProfile, window: float | None = None) -> tuple[float, float]:
    """Edges of configuration space from g00 = 0 by scanning and bracketing.

    Independent of the closed forms stored in ``profile.domain``.  A profile
    whose b vanishes identically has no edge and gives (-inf, inf).
    """
    fx0 = profile.fields(np.linspace(-1.0, 1.0, 5))
    if np.all(fx0.b == 0) and np.all(fx0.db == 0):
        return -math.inf, math.inf
    x0 = profile._origin()
    if window is None:
        lo, hi = profile.domain
        window = 4.0 * max(abs(lo), abs(hi)) if math.isfinite(lo) and math.isfinite(hi) else 1e3
    g00 = lambda s: 1.0 - profile.params.k_ab * profile.fields(np.asarray(s)).b ** 2
    start = x0 if profile.glued or not isinstance(profile, _InverseSquareProfile) else 1e-12
    hi_e = _bisect_edge(g00, start, x0 + window, nscan=20000)
    if isinstance(profile, _InverseSquareProfile):
        return 0.0, hi_e
    lo_e = _bisect_edge(g00, start, x0 - window, nscan=20000)
    return lo_e, hi_e


def characteristic_y(profile: BackgroundProfile, x):
    return profile.y(x)


def characteristic_q(profile: BackgroundProfile, x):
    return profile.q(x)


# -- double integration ------------------------------------------------------------

@dataclass(frozen=True)
class DoubleIntegration:
    a: np.ndarray
    x: np.ndarray
    slope: np.ndarray  # a'(x) along the samples

    def a_of_x(self, x):
        order = np.argsort(self.x)
        return np.interp(x, self.x[order], self.a[order])


def profile_by_double_integration(f_of_a, a_range: tuple[float, float], x0: float = 0.0, *,
                                  slope_sq_ref: float, sign: int = 1,
                                  n: int = 201) -> DoubleIntegration:
    """Solve a'' = f(a) a by two quadratures.

    a'^2 = slope_sq_ref + 2 int_{a_lo}^{a} s f(s) ds  (written R g(a)^2), then
    x(a) = x0 + sign int_{a_lo}^{a} ds / |a'(s)|, sampled on ``n`` values of a.
    """
    a_lo, a_hi = a_range
    grid = np.linspace(a_lo, a_hi, n)
    slope_sq = np.array([slope_sq_ref + 2 * adaptive_quadrature(lambda s: s * f_of_a(s), a_lo, v)
                         for v in grid])
    if np.any(slope_sq <= 0):
        where = float(grid[np.argmax(slope_sq <= 0)])
        raise TurningPointError(f"a'^2 vanishes near a={where!r}; split the integration there")

    def inv_slope(s):
        return 1.0 / math.sqrt(slope_sq_ref + 2 * adaptive_quadrature(lambda t: t * f_of_a(t), a_lo, s))

    xs = [x0]
    for lo_, hi_ in zip(grid[:-1], grid[1:]):
        xs.append(xs[-1] + sign * adaptive_quadrature(inv_slope, float(lo_), float(hi_), tol=1e-11))
    return DoubleIntegration(grid, np.array(xs), sign * np.sqrt(slope_sq))
