"""Kummer's confluent hypergeometric function 1F1(a; b; z) by its power series.

Only the series regime |z| <= 1.5 is supported, which covers every use in
the interacting solver (there 0 < z <= 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

Z_LIMIT = 1.5
MAX_TERMS = 10_000
POLE_TOL = 1e-12


@dataclass(frozen=True)
class KummerParams:
    a: complex
    b: complex
    z: complex

    def __post_init__(self):
        check_lower(self.b)
        if abs(complex(self.z)) > Z_LIMIT:
            raise DomainError(f"|z| = {abs(complex(self.z))!r} exceeds the series limit {Z_LIMIT}")


def check_lower(b) -> None:
    b = complex(b)
    n = round(b.real)
    if n <= 0 and abs(b - n) <= POLE_TOL:
        raise PoleError(f"lower parameter b={b!r} is at a non-positive integer")


def _series(a: complex, b: complex, z: complex) -> complex:
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    small = 0
    for n in range(MAX_TERMS):
        term *= (a + n) / ((b + n) * (n + 1)) * z
        total += term
        if abs(term) < 1e-16 * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise ConvergenceError(f"1F1({a}; {b}; {z}) did not converge in {MAX_TERMS} terms")


def hyp1f1(a, b, z):
    """1F1(a; b; z) for complex a, b and scalar or array z with |z| <= 1.5."""
    a, b = complex(a), complex(b)
    check_lower(b)
    za = np.asarray(z)
    if np.any(np.abs(za) > Z_LIMIT):
        raise DomainError(f"|z| exceeds the series limit {Z_LIMIT}")
    if za.ndim == 0:
        return _series(a, b, complex(za))
    flat = [_series(a, b, complex(v)) for v in za.ravel()]
    return np.array(flat, dtype=complex).reshape(za.shape)


def kummer_1f1(p: KummerParams) -> complex:
    return _series(complex(p.a), complex(p.b), complex(p.z))


def hyp1f1_deriv(a, b, z, order: int = 1):
    """d^k/dz^k 1F1(a; b; z) = (a)_k / (b)_k 1F1(a + k; b + k; z)."""
    a, b = complex(a), complex(b)
    coef = 1.0 + 0.0j
    for j in range(order):
        coef *= (a + j) / (b + j)
    if coef == 0:
        return np.zeros(np.shape(z), dtype=complex) if np.ndim(z) else 0j
    return coef * hyp1f1(a + order, b + order, z)


def kummer_derivative(p: KummerParams) -> complex:
    return hyp1f1_deriv(p.a, p.b, p.z)


def kummer_ode_residual(a, b, z) -> float:
    """|z F'' + (b - z) F' - a F| divided by the largest of the three terms."""
    f = hyp1f1(a, b, z)
    f1 = hyp1f1_deriv(a, b, z, 1)
    f2 = hyp1f1_deriv(a, b, z, 2)
    t1, t2, t3 = z * f2, (b - z) * f1, a * f
    scale = np.maximum.reduce([np.abs(t1), np.abs(t2), np.abs(t3), np.ones_like(np.abs(f))])
    return float(np.max(np.abs(t1 + t2 - t3) / scale))


def kummer_recurrence_residual(p: KummerParams) -> tuple[float, float]:
    """Residuals of the two contiguous relations used by the interacting solver.

    z M(a;b) = (b - 2a) M(a;b) + (a - b) M(a-1;b) + a M(a+1;b)
    z M(a;b) = (1 - a) M(a;b) + (a - b) M(a-1;b) + (b - 1) M(a;b-1)

    Each residual is relative to max(1, largest term).  The second relation
    needs b - 1 off the poles; if it is not, the second residual is NaN.
    """
    a, b, z = complex(p.a), complex(p.b), complex(p.z)
    m = _series(a, b, z)
    m_am = _series(a - 1, b, z)
    m_ap = _series(a + 1, b, z)
    first = [(b - 2 * a) * m, (a - b) * m_am, a * m_ap]
    r1 = abs(z * m - sum(first)) / max(1.0, abs(z * m), *map(abs, first))
    try:
        check_lower(b - 1)
    except PoleError:
        return r1, float("nan")
    second = [(1 - a) * m, (a - b) * m_am, (b - 1) * _series(a, b - 1, z)]
    r2 = abs(z * m - sum(second)) / max(1.0, abs(z * m), *map(abs, second))
    return float(r1), float(r2)


def terminating_degree(a) -> int | None:
    """Degree n if a = -n (within 1e-12), i.e. the series is a polynomial; else None."""
    a = complex(a)
    n = round(a.real)
    if n <= 0 and abs(a - n) <= POLE_TOL:
        return -n
    return None


def zpow(z, nu: complex):
    """z**nu for real z > 0 via exp(nu ln z), avoiding branch questions."""
    z = np.asarray(z, dtype=float)
    out = np.exp(nu * np.log(z))
    return out if out.ndim else complex(out)


__all__ = [
    "KummerParams", "hyp1f1", "hyp1f1_deriv", "kummer_1f1", "kummer_derivative",
    "kummer_ode_residual", "kummer_recurrence_residual", "terminating_degree", "zpow",
    "check_lower",
]
