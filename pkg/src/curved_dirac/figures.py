"""Data behind the three figures, as header + rows ready for CSV."""

from __future__ import annotations

import csv
import io

import numpy as np

from .background import HyperbolicConst, LinearFlat, solve_profile
from .free_solver import FreeSpinor, decay_parameter, density_on_grid
from .gamma_algebra import ModelParams

FIG1_ETAS = (0.001, 0.15, 0.4, 0.8, 1.5)
FIG_ENERGIES = (0.5, 0.8, 1.0, 1.2)
FIG2_DEFAULTS = {"R": 0.2, "theta": 0.3, "xi": 0.5, "tau": 1.0, "A": 1.2, "B": 0.8}
FIG3_DEFAULTS = {"R": 0.2, "zeta": 0.7, "vartheta": 0.3, "a0": 0.5, "tau": 1.0, "A": 1.2, "B": 0.8}


def fig1_rows(etas, eps_grid, m: float = 1.0, quantity: str = "omega"):
    """Long-format rows (eta, epsilon, value) with value omega or |eta eps / omega|."""
    if quantity not in ("omega", "abs_wavenumber"):
        raise ValueError("quantity must be 'omega' or 'abs_wavenumber'")
    rows = []
    for eta in etas:
        for eps in eps_grid:
            dd = decay_parameter(float(eps), m, float(eta))
            rows.append((float(eta), float(eps), dd.omega if quantity == "omega" else abs(dd.wavenumber)))
    return ("eta", "epsilon", quantity), rows


def density_rows(profile, energies, A: complex, B: complex, n: int = 512, *,
                 normalize_peak: bool = False):
    """Long-format rows (epsilon, x_over_X, density) for the figure-form positive-energy solution."""
    rows = []
    for eps in energies:
        sp = FreeSpinor.for_profile(profile, float(eps), A, B)
        u, rho = density_on_grid(profile, sp, n)
        if normalize_peak:
            peak = float(np.max(rho))
            if peak > 0:
                rho = rho / peak
        rows.extend((float(eps), float(ui), float(ri)) for ui, ri in zip(u, rho))
    return ("epsilon", "x_over_X", "density"), rows


def fig2_profile(R=0.2, theta=0.3, xi=0.5, tau=1.0, m=1.0):
    return solve_profile(LinearFlat(theta, xi), ModelParams(tau=tau, mass=m, curvature_R=R))


def fig3_profile(R=0.2, zeta=0.7, vartheta=0.3, a0=0.5, tau=1.0, m=1.0):
    return solve_profile(HyperbolicConst(zeta, vartheta, a0), ModelParams(tau=tau, mass=m, curvature_R=R))


def _fmt(v) -> str:
    return format(v, ".17g") if isinstance(v, float) else str(v)


def write_csv(stream, header, rows) -> None:
    w = csv.writer(stream, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()
