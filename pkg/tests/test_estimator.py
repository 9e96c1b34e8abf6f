"""Estimator tests: reproducibility across worker counts, CRN structure,
the mesh sweep, and the change-of-measure identity."""

import math

import numpy as np
import pytest

from pickands.estimator import (
    EstimatorConfig,
    _run,
    change_of_measure_check,
    estimate_albin,
    estimate_eta_sweep,
    estimate_ratio,
)
from pickands.exceptions import ParameterError

SMALL = dict(T=4.0, eta=0.25, reps=8, master_seed=77)


class TestConfig:
    def test_validates_grid(self):
        with pytest.raises(ParameterError):
            EstimatorConfig((1.0,), 4.0, 0.3, 10)
        with pytest.raises(ParameterError):
            EstimatorConfig((2.5,), 4.0, 0.25, 10)
        with pytest.raises(ParameterError):
            EstimatorConfig((1.0,), 4.0, 0.25, 0)

    def test_row_shape(self):
        rows = estimate_ratio(EstimatorConfig((1.0, 1.5), **SMALL))
        assert [r.alpha for r in rows] == [1.0, 1.5]
        for r in rows:
            assert r.reps == 8
            assert math.isclose(r.ci95_lo, r.mean - 1.96 * r.stderr, rel_tol=1e-12)
            assert math.isclose(r.ci95_hi, r.mean + 1.96 * r.stderr, rel_tol=1e-12)
            assert 0.0 < r.mean <= 1.0 / 0.25

    def test_single_rep_has_nan_spread(self):
        row = estimate_ratio(EstimatorConfig((1.0,), 4.0, 0.25, 1))[0]
        assert math.isnan(row.sample_stddev) and math.isnan(row.stderr)


class TestSchedulingIndependence:
    def test_bit_identical_across_worker_counts(self):
        rows = {
            w: estimate_ratio(EstimatorConfig((0.9, 1.5), workers=w, **SMALL))
            for w in (1, 2, 8)
        }
        assert rows[1] == rows[2] == rows[8]

    def test_albin_bit_identical_across_worker_counts(self):
        rows = {
            w: estimate_albin(EstimatorConfig((1.0,), workers=w, **SMALL))
            for w in (1, 2, 8)
        }
        assert rows[1] == rows[2] == rows[8]

    def test_repeat_call_identical(self):
        cfg = EstimatorConfig((1.2,), **SMALL)
        assert estimate_ratio(cfg) == estimate_ratio(cfg)


class TestPerReplicationValues:
    def test_ratios_in_range(self):
        cfg = EstimatorConfig((0.8, 1.4, 2.0), 4.0, 0.25, 20, master_seed=3)
        values = _run(cfg, (1,))
        ratios = values[:, :, 0, 0]
        assert np.all(ratios > 0.0) and np.all(ratios <= 1.0 / 0.25)

    def test_albin_scaled_indicator_is_probability(self):
        cfg = EstimatorConfig((1.0,), 4.0, 0.25, 50, master_seed=5)
        row = estimate_albin(cfg)[0]
        assert 0.0 <= row.mean * cfg.eta <= 1.0

    def test_albin_zero_successes(self):
        # seed chosen so no replication attains its supremum at the origin
        cfg = EstimatorConfig((1.0,), 4.0, 0.25, 6, master_seed=2)
        row = estimate_albin(cfg)[0]
        assert row.mean == 0.0


class TestAccuracy:
    def test_estimate_near_known_constant(self):
        # H_1 = 1; modest lattice keeps runtime low, tolerance covers the
        # mesh and truncation bias at these parameters
        cfg = EstimatorConfig((1.0,), 16.0, 2.0**-8, 200, master_seed=42, workers=2)
        row = estimate_ratio(cfg)[0]
        assert abs(row.mean - 1.0) < 0.1

    def test_ratio_and_albin_agree_coarse_mesh(self):
        cfg = EstimatorConfig((1.0,), 32.0, 0.125, 4000, master_seed=5, workers=2)
        ratio = estimate_ratio(cfg)[0]
        albin = estimate_albin(cfg)[0]
        combined = math.hypot(ratio.stderr, albin.stderr)
        assert abs(ratio.mean - albin.mean) <= 3 * combined

    def test_ratio_and_albin_agree_alpha_two(self):
        cfg = EstimatorConfig((2.0,), 16.0, 0.25, 20000, master_seed=8, workers=2)
        ratio = estimate_ratio(cfg)[0]
        albin = estimate_albin(cfg)[0]
        combined = math.hypot(ratio.stderr, albin.stderr)
        assert abs(ratio.mean - albin.mean) <= 3 * combined


class TestEtaSweep:
    def test_finest_column_matches_estimate_ratio(self):
        cfg = EstimatorConfig((1.0, 1.5), **SMALL)
        matrix = estimate_eta_sweep(cfg, [0.25, 0.5, 1.0])
        direct = estimate_ratio(cfg)
        assert [row[0] for row in matrix] == direct

    def test_coarse_supremum_not_larger_per_replication(self):
        from pickands.fgn import (
            GridSpec,
            build_two_sided_fbm,
            sample_unit_fgn,
            seed_vector,
            spectrum_for,
        )
        from pickands.pathfun import ZPath, functionals, z_from_fbm

        grid = GridSpec(1.0, 4.0, 0.25)
        coarse_grid = GridSpec(1.0, 4.0, 1.0)
        spec = spectrum_for(1.0, grid.n_steps)
        for r in range(30):
            fgn = sample_unit_fgn(spec, seed_vector(9, r, grid.n_steps))
            z = z_from_fbm(build_two_sided_fbm(fgn, grid))
            f_fine = functionals(z)
            f_coarse = functionals(ZPath(coarse_grid, z.z_values[::4]))
            assert f_coarse.m_eta <= f_fine.m_eta

    def test_estimates_increase_as_mesh_refines(self):
        cfg = EstimatorConfig((1.0,), 16.0, 2.0**-8, 200, master_seed=21, workers=2)
        matrix = estimate_eta_sweep(cfg, [2.0**-8, 2.0**-7, 2.0**-6, 2.0**-5])
        rows = matrix[0]
        for finer, coarser in zip(rows, rows[1:]):
            slack = 2.0 * max(finer.stderr, coarser.stderr)
            assert coarser.mean <= finer.mean + slack

    def test_non_nested_eta_rejected(self):
        cfg = EstimatorConfig((1.0,), **SMALL)
        with pytest.raises(ParameterError):
            estimate_eta_sweep(cfg, [0.75])
        with pytest.raises(ParameterError):
            estimate_eta_sweep(cfg, [0.125])

    def test_independent_mode_differs_but_same_shape(self):
        cfg = EstimatorConfig((1.0,), **SMALL)
        shared = estimate_eta_sweep(cfg, [0.25, 0.5])
        indep = estimate_eta_sweep(cfg, [0.25, 0.5], independent=True)
        assert len(indep) == 1 and len(indep[0]) == 2
        assert indep[0][0].mean != shared[0][0].mean  # fresh draws per column


class TestCrn:
    def test_same_draws_across_alpha(self):
        # nearby alphas share the same normals, so per-replication ratios
        # must be strongly coupled
        cfg = EstimatorConfig((1.7, 1.8), 4.0, 0.25, 40, master_seed=13)
        values = _run(cfg, (1,))[:, :, 0, 0]
        corr = np.corrcoef(values[:, 0], values[:, 1])[0, 1]
        assert corr > 0.9


class TestChangeOfMeasure:
    def test_t_zero_identical(self):
        lhs, rhs, se = change_of_measure_check(1.0, 0.0, [-2, -1, 0, 1, 2], 500, seed=3)
        assert lhs == rhs

    def test_equality_alpha_one(self):
        lhs, rhs, se = change_of_measure_check(
            1.0, 1.0, [-2, -1, 0, 1, 2], 20000, seed=3
        )
        assert abs(lhs - rhs) <= 3 * se

    def test_equality_alpha_15_negative_shift(self):
        lattice = [round(-2 + 0.25 * k, 10) for k in range(17)]
        lhs, rhs, se = change_of_measure_check(1.5, -0.5, lattice, 20000, seed=9)
        assert abs(lhs - rhs) <= 3 * se

    def test_lattice_validation(self):
        with pytest.raises(ParameterError):
            change_of_measure_check(1.0, 0.5, [-1, 0, 1], 100, seed=0)
        with pytest.raises(ParameterError):
            change_of_measure_check(1.0, 1.0, [-1, 1], 100, seed=0)
        with pytest.raises(ParameterError):
            change_of_measure_check(1.0, 0.0, list(np.linspace(-2, 2, 65)), 100, seed=0)
