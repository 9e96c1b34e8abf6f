"""Mesh extrapolation: OLS in the regressor eta^{alpha/2}.

The lattice constant behaves like H^eta = H - c * eta^{alpha/2} for small
eta, so an intercept-and-slope fit over several meshes extrapolates the
mesh bias away.  The default consumer is a same-trace (CRN) sweep, whose
errors are dependent; no standard errors are reported for it.  Fits of
independent runs can request normal-theory standard errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .exceptions import ParameterError

__all__ = ["EtaScalingFit", "fit_eta_scaling", "predict"]


@dataclass(frozen=True)
class EtaScalingFit:
    """OLS fit of estimate = h_T_hat - c_hat * eta^{alpha/2}.

    h_T_stderr/c_stderr are only populated for independent-runs fits
    (classical OLS inference is invalid under same-trace dependence).
    """

    alpha: float
    h_T_hat: float
    c_hat: float
    residuals: tuple[float, ...]
    r_squared: float
    n_points: int
    h_T_stderr: float | None = None
    c_stderr: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def fit_eta_scaling(points, alpha: float, independent: bool = False) -> EtaScalingFit:
    """Fit (eta, estimate) pairs; closed-form normal equations via fsum.

    Requires at least two distinct eta values.  The model is affine in
    x = eta^{alpha/2}: intercept h_T_hat estimates the mesh-free constant,
    c_hat = -slope its mesh-bias coefficient.
    """
    pts = [(float(e), float(v)) for e, v in points]
    if len({e for e, _ in pts}) < 2:
        raise ParameterError("need at least two distinct eta values")
    n = len(pts)
    xs = [e ** (alpha / 2.0) for e, _ in pts]
    ys = [v for _, v in pts]
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    residuals = tuple(y - (intercept + slope * x) for x, y in zip(xs, ys))
    ss_res = math.fsum(r * r for r in residuals)
    ss_tot = math.fsum((y - ybar) ** 2 for y in ys)
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    h_se = c_se = None
    if independent and n > 2:
        s2 = ss_res / (n - 2)
        c_se = math.sqrt(s2 / sxx)
        h_se = math.sqrt(s2 * (1.0 / n + xbar * xbar / sxx))
    return EtaScalingFit(
        alpha, intercept, -slope, residuals, r_squared, n, h_se, c_se
    )


def predict(fit: EtaScalingFit, eta: float) -> float:
    """Fitted value h_T_hat - c_hat * eta^{alpha/2}; eta=0 extrapolates."""
    return fit.h_T_hat - fit.c_hat * eta ** (fit.alpha / 2.0)
