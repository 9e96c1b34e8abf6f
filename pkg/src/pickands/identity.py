"""Quadrature check of the alpha=2 lattice-sum identity.

For every eta > 0 the integral over y of 1 / sum_k exp(k*y*eta^2 -
k^2*eta^2) equals 2 (no direct proof is known; the check is numerical).
The integrand is even in y (k -> -k maps the sum to itself), so we
integrate 2 * int_0^inf by adaptive Simpson over unit oscillation cells
(the denominator is 2-periodic in y up to the Gaussian envelope).
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ParameterError

__all__ = ["identity_integrand", "identity_integral"]

_TAIL_LOG = 45.0  # exp(-45) ~ 3e-20: dropped lattice tail is negligible


def identity_integrand(y: float, eta: float) -> float:
    """1 / sum_k exp(k*y*eta^2 - k^2*eta^2), evaluated overflow-free.

    The summand peaks at k ~ y/2; writing the sum as exp(eta^2 y^2/4) *
    sum_k exp(-eta^2 (k - y/2)^2) lets us truncate at |k - y/2| <= K with
    eta^2 K^2 ~ 45 (relative tail below 1e-19) and keep every factor in
    range.
    """
    center = y / 2.0
    half_width = int(math.ceil(math.sqrt(_TAIL_LOG) / eta)) + 1
    k0 = int(math.floor(center))
    ks = np.arange(k0 - half_width, k0 + half_width + 1)
    shifted = math.fsum(np.exp(-(eta * eta) * (ks - center) ** 2))
    return math.exp(-(eta * eta) * y * y / 4.0) / shifted


def _simpson(f, a: float, fa: float, m: float, fm: float, b: float, fb: float) -> float:
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, m, fm, b, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, lm, flm, m, fm)
    right = _simpson(f, m, fm, rm, frm, b, fb)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _adaptive(f, a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1) + _adaptive(
        f, m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1
    )


def _adaptive_simpson(f, a: float, b: float, tol: float) -> float:
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(f, a, fa, m, fm, b, fb)
    return _adaptive(f, a, fa, m, fm, b, fb, whole, tol, 40)

def identity_integral(eta: float, cutoff: float = 1e-12) -> float:
    """int_R dy / sum_k exp(k*y*eta^2 - k^2*eta^2); should equal 2.

    Deterministic: integrates 2 * int_0^inf cell by cell (cells of length
    2, one oscillation of the denominator each) until the integrand has
    fallen below ``cutoff``.
    """
    if eta <= 0:
        raise ParameterError(f"eta must be positive, got {eta}")
    f = lambda y: identity_integrand(y, eta)
    total = 0.0
    lo = 0.0
    while True:
        hi = lo + 2.0
        total += _adaptive_simpson(f, lo, hi, 1e-13)
        if f(hi) < cutoff:
            break
        lo = hi
    return 2.0 * total
