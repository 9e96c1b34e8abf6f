"""Deterministic path functionals on the simulation lattice.

The drifted field Z_t = sqrt(2)*B_t - |t|^alpha and, per path, the
discrete supremum M = exp(max Z), the Riemann sum S = eta * sum exp(Z),
their ratio (the Monte Carlo integrand), and the sup-at-zero indicator
(the probability-representation event).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fgn import FbmPath, GridSpec

__all__ = ["ZPath", "PathFunctionals", "z_from_fbm", "functionals"]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ZPath:
    """Z evaluated on the lattice; z_values[zero_index] == 0 exactly."""

    grid: GridSpec
    z_values: np.ndarray


@dataclass(frozen=True)
class PathFunctionals:
    """One-pass lattice functionals of a ZPath.

    m_eta = exp(max Z), s_eta = eta * sum exp(Z), ratio = m_eta/s_eta.
    ratio is always finite (computed shift-invariantly); m_eta and s_eta
    can overflow to inf together for extreme paths.
    """

    m_eta: float
    s_eta: float
    ratio: float
    argmax_index: int
    sup_at_zero: bool


def z_from_fbm(path: FbmPath) -> ZPath:
    """Pointwise Z_t = sqrt(2)*B_t - |t|^alpha on the path's lattice."""
    t = path.grid.times()
    z = _SQRT2 * path.values - np.abs(t) ** path.grid.alpha
    return ZPath(path.grid, z)


def functionals(z: ZPath) -> PathFunctionals:
    """Supremum, Riemann sum, ratio, argmax and sup-at-zero of a ZPath.

    The sum of exp(Z) is taken after subtracting max Z (the ratio is
    shift-invariant, so this guards against exp overflow) and accumulated
    exactly with math.fsum.  Argmax ties are broken toward the smallest
    |t_k|, then toward negative t, so that sup_at_zero always resolves to
    the origin when the supremum is 0.
    """
    zv = z.z_values
    eta = z.grid.eta
    zero = z.grid.zero_index
    zmax = float(zv.max())
    shifted_sum = math.fsum(np.exp(zv - zmax))
    ratio = 1.0 / (eta * shifted_sum)
    with np.errstate(over="ignore"):
        m_eta = float(np.exp(zmax))
    s_eta = m_eta * (eta * shifted_sum)

    ties = np.flatnonzero(zv == zmax)
    argmax_index = int(min(ties, key=lambda k: (abs(int(k) - zero), int(k) > zero)))
    # Z_0 = 0 by construction, so max Z >= 0 always; "<= 0" means "== 0".
    sup_at_zero = zmax <= 0.0
    return PathFunctionals(m_eta, s_eta, ratio, argmax_index, sup_at_zero)
