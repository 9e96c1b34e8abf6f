"""Monte Carlo estimation of the discretized Pickands constant.

estimate_ratio implements the sup/sum ratio representation on the
truncated lattice; estimate_albin the probability representation
(sup attained at the origin, scaled by 1/eta); estimate_eta_sweep
evaluates one fine-mesh trace on nested coarser meshes for the
regression extrapolator.

Replications are embarrassingly parallel.  Every replication's result is
stored by index and reduced in ascending index order with exact (fsum)
accumulation, so output is bit-identical for any worker count.  Common
random numbers: replication r consumes the same SeedVector for every
alpha (the seed length depends only on the lattice size, not alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from .exceptions import ParameterError
from .fgn import (
    GridSpec,
    build_two_sided_fbm,
    mix_seed,
    _oracle_factor,
    sample_unit_fgn,
    seed_vector,
    spectrum_for,
)
from .pathfun import ZPath, functionals, z_from_fbm

__all__ = [
    "EstimatorConfig",
    "EstimateRow",
    "estimate_ratio",
    "estimate_albin",
    "estimate_eta_sweep",
    "change_of_measure_check",
]


@dataclass(frozen=True)
class EstimatorConfig:
    alphas: tuple[float, ...]
    T: float
    eta: float
    reps: int
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if not self.alphas:
            raise ParameterError("alphas must be nonempty")
        if self.reps < 1:
            raise ParameterError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        for alpha in self.alphas:
            GridSpec(alpha, self.T, self.eta)  # validates alpha/T/eta/power-of-two

    @property
    def n_steps(self) -> int:
        return int(round(2.0 * self.T / self.eta))


@dataclass(frozen=True)
class EstimateRow:
    """Point estimate of H_alpha^eta(T) with dispersion statistics.

    sample_stddev/stderr/ci are NaN when reps == 1 (undefined).
    """

    alpha: float
    mean: float
    sample_stddev: float
    stderr: float
    ci95_lo: float
    ci95_hi: float
    reps: int


def _reduce_rows(alphas, values, reps) -> list[EstimateRow]:
    """Per-alpha mean/stddev over replication values (reps x n_alpha).

    Two-pass variance over exact fsum accumulations: reproducible to the
    bit for any scheduling of the replications.
    """
    rows = []
    for i, alpha in enumerate(alphas):
        col = values[:, i]
        mean = math.fsum(col) / reps
        if reps > 1:
            var = math.fsum((v - mean) ** 2 for v in col) / (reps - 1)
            sd = math.sqrt(var)
            se = sd / math.sqrt(reps)
        else:
            sd = math.nan
            se = math.nan
        rows.append(
            EstimateRow(alpha, mean, sd, se, mean - 1.96 * se, mean + 1.96 * se, reps)
        )
    return rows


def _replicate(args) -> np.ndarray:
    """One replication: (n_alpha, n_meshes, 2) array of (ratio, sup_at_zero).

    Module-level for multiprocessing; pure given its arguments plus the
    idempotent read-only spectrum cache.
    """
    master_seed, rep, alphas, T, eta, steps = args
    grid0 = GridSpec(alphas[0], T, eta)
    n = grid0.n_steps
    seeds = seed_vector(master_seed, rep, n)
    out = np.empty((len(alphas), len(steps), 2))
    for i, alpha in enumerate(alphas):
        grid = GridSpec(alpha, T, eta)
        fgn = sample_unit_fgn(spectrum_for(alpha, n), seeds)
        z = z_from_fbm(build_two_sided_fbm(fgn, grid))
        for j, step in enumerate(steps):
            if step == 1:
                sub = z
            else:
                coarse = GridSpec(alpha, T, eta * step)
                sub = ZPath(coarse, z.z_values[::step])
            f = functionals(sub)
            out[i, j, 0] = f.ratio
            out[i, j, 1] = 1.0 if f.sup_at_zero else 0.0
    return out


def _run(config: EstimatorConfig, steps: tuple[int, ...]) -> np.ndarray:
    """All replications, stacked (reps, n_alpha, n_meshes, 2) in rep order."""
    n = config.n_steps
    for alpha in config.alphas:
        spectrum_for(alpha, n)  # warm the cache before forking workers
    tasks = [
        (config.master_seed, r, config.alphas, config.T, config.eta, steps)
        for r in range(config.reps)
    ]
    if config.workers == 1:
        results = [_replicate(t) for t in tasks]
    else:
        chunksize = max(1, config.reps // (config.workers * 4))
        with Pool(config.workers) as pool:
            results = pool.map(_replicate, tasks, chunksize=chunksize)
    return np.stack(results)


def estimate_ratio(config: EstimatorConfig) -> list[EstimateRow]:
    """Mean sup/sum ratio per alpha over CRN replications.

    Rows are ordered as config.alphas; output is independent of
    config.workers.
    """
    values = _run(config, (1,))
    return _reduce_rows(config.alphas, values[:, :, 0, 0], config.reps)


def estimate_albin(config: EstimatorConfig) -> list[EstimateRow]:
    """Probability-representation estimator: eta^-1 * P(sup_k Z = 0).

    Estimates the fraction of replications whose lattice supremum is
    attained at the origin, scaled by 1/eta; the stderr is the binomial
    one under the same scaling.  Intended for coarse eta - the event is
    too rare to estimate cheaply when eta is small.
    """
    values = _run(config, (1,))
    indicators = values[:, :, 0, 1] / config.eta
    return _reduce_rows(config.alphas, indicators, config.reps)


def estimate_eta_sweep(
    config: EstimatorConfig, etas, independent: bool = False
) -> list[list[EstimateRow]]:
    """Estimates on nested meshes: rows per alpha, columns per eta.

    Default mode simulates once at config.eta (the finest mesh) and
    evaluates each coarser eta on the subsampled lattice, so all columns
    share identical draws.  ``independent=True`` instead runs a fresh
    simulation per eta (column master seed = mix_seed(master, 2^32 + j)),
    which restores classical regression inference at extra cost.
    """
    etas = [float(e) for e in etas]
    steps = []
    for e in etas:
        ratio = e / config.eta
        step = int(round(ratio))
        if step < 1 or abs(ratio - step) > 1e-9 or step & (step - 1):
            raise ParameterError(
                f"eta={e} is not a power-of-two multiple of the finest mesh "
                f"{config.eta}"
            )
        GridSpec(config.alphas[0], config.T, e)  # coarse lattice must be valid
        steps.append(step)

    if independent:
        columns = []
        for j, e in enumerate(etas):
            col_config = EstimatorConfig(
                config.alphas,
                config.T,
                e,
                config.reps,
                master_seed=mix_seed(config.master_seed, (1 << 32) + j),
                workers=config.workers,
            )
            columns.append(estimate_ratio(col_config))
        return [[columns[j][i] for j in range(len(etas))] for i in range(len(config.alphas))]

    values = _run(config, tuple(steps))
    return [
        _reduce_rows([alpha] * len(etas), values[:, i, :, 0], config.reps)
        for i, alpha in enumerate(config.alphas)
    ]


def _ms_functional(z_matrix: np.ndarray, spacing: float) -> np.ndarray:
    """Rowwise sup/sum functional max exp(z) / (spacing * sum exp(z)).

    Translation-invariant and bounded by 1/spacing; evaluated through the
    max-shifted sum so it never overflows.
    """
    zmax = z_matrix.max(axis=1)
    sums = np.exp(z_matrix - zmax[:, None]).sum(axis=1)
    return 1.0 / (spacing * sums)


def change_of_measure_check(
    alpha: float, t: float, lattice, reps: int, seed: int
) -> tuple[float, float, float]:
    """Empirical check of the exponential change of measure.

    lhs estimates E[e^{Z_t} F(Z)] and rhs estimates E[F(Z shifted by t)]
    on a small lattice containing 0 and t, both via the dense oracle with
    shared normals per replication (so t=0 gives lhs == rhs identically).
    F is the bounded, translation-invariant sup/sum functional with the
    lattice's minimal spacing as Riemann weight.  Returns
    (lhs, rhs, combined_stderr).
    """
    pts = np.asarray(sorted(float(s) for s in lattice))
    if pts.size > 64:
        raise ParameterError("lattice must have at most 64 points")
    if pts.size < 2 or np.unique(pts).size != pts.size:
        raise ParameterError("lattice points must be distinct (at least two)")
    if not np.any(pts == t) or not np.any(pts == 0.0):
        raise ParameterError(f"lattice must contain both t={t} and 0")
    if reps < 2:
        raise ParameterError("reps must be >= 2")
    spacing = float(np.diff(pts).min())
    shifted = pts - t

    nz_a, factor_a = _oracle_factor(alpha, pts)
    nz_b, factor_b = _oracle_factor(alpha, shifted)
    t_col = int(np.flatnonzero(pts == t)[0])

    rng = np.random.Generator(np.random.Philox(key=mix_seed(seed, 0)))
    k = pts.size
    lhs_vals = np.empty(reps)
    rhs_vals = np.empty(reps)
    done = 0
    while done < reps:
        chunk = min(reps - done, 200_000)
        normals = rng.standard_normal((chunk, k))
        b_a = np.zeros((chunk, k))
        b_a[:, nz_a] = normals[:, nz_a] @ factor_a.T
        z_a = math.sqrt(2.0) * b_a - np.abs(pts) ** alpha
        b_b = np.zeros((chunk, k))
        b_b[:, nz_b] = normals[:, nz_b] @ factor_b.T
        z_b = math.sqrt(2.0) * b_b - np.abs(shifted) ** alpha
        f_a = _ms_functional(z_a, spacing)
        lhs_vals[done : done + chunk] = np.exp(z_a[:, t_col]) * f_a
        rhs_vals[done : done + chunk] = _ms_functional(z_b, spacing)
        done += chunk

    lhs = math.fsum(lhs_vals) / reps
    rhs = math.fsum(rhs_vals) / reps
    var_l = math.fsum((v - lhs) ** 2 for v in lhs_vals) / (reps - 1)
    var_r = math.fsum((v - rhs) ** 2 for v in rhs_vals) / (reps - 1)
    combined_stderr = math.sqrt((var_l + var_r) / reps)
    return lhs, rhs, combined_stderr
