"""Tests for bounds, diagnostics and bound-vs-trace comparison."""

from dataclasses import replace
import math

import numpy as np
import pytest

from distillkit.analysis import (
    compare_bounds,
    early_stopping_comparison,
    effective_basis_count,
    equivalent_spectrum,
    generalization_proxies,
    guaranteed_rounds,
    log_sparsity_index,
    ratio_lower_bound,
    shrinkage_profile,
    sparsity_index,
    sparsity_limit,
    sparsity_sweep,
    spread,
    theory_report,
    z_norm_lower_bound,
)
from distillkit.const import QUANTITY_B_CONSISTENCY, QUANTITY_CONSTRAINT
from distillkit.distillation import DistillationTrace, model_at, run_chain
from distillkit.errors import CollapseCondition, DegenerateSpectrum, PreconditionViolation
from distillkit.kernels import Dataset
from distillkit.regression import FitConfig
from distillkit.spectral import SymMatrix, solve_shifted


@pytest.fixture
def sine_trace(spline, sine_data, sine_config):
    """Return the chain on the recorded dataset."""
    return run_chain(sine_data, spline, sine_config)


class TestZNormLowerBound:
    """Tests for the norm-decay bound."""

    def test_round_zero_is_initial_norm(self):
        """Test t = 0 returns ||z_0|| = r0 sqrt(K eps)."""
        assert z_norm_lower_bound(3.0, 2.0, 4, 1.0, 0) == pytest.approx(6.0, rel=1e-15)

    @pytest.mark.parametrize("t", [1, 2, 5])
    def test_flat_spectrum_limit(self, t):
        """Test kappa = 1 reduces to ||z_0|| - t sqrt(K eps)."""
        assert z_norm_lower_bound(3.0, 1.0, 4, 1.0, t) == pytest.approx(6.0 - 2.0 * t, abs=1e-12)

    def test_continuous_near_flat(self):
        """Test kappa slightly above 1 approaches the flat limit."""
        near = z_norm_lower_bound(3.0, 1.0 + 1e-9, 4, 1.0, 3)
        assert near == pytest.approx(0.0, abs=1e-6)

    def test_decreasing_in_t(self):
        """Test the bound decreases with t."""
        values = [z_norm_lower_bound(5.0, 7.0, 10, 0.1, t) for t in range(6)]
        assert all(b < a for a, b in zip(values, values[1:], strict=False))

    @pytest.mark.parametrize(("r0", "kappa", "t"), [(1.0, 2.0, 1), (3.0, 0.5, 1), (3.0, 2.0, -1)])
    def test_preconditions(self, r0, kappa, t):
        """Test r0 <= 1, kappa < 1 and negative t are rejected."""
        with pytest.raises(PreconditionViolation):
            z_norm_lower_bound(r0, kappa, 4, 1.0, t)


class TestGuaranteedRounds:
    """Tests for t_under."""

    def test_direct_substitution(self):
        """Test ||y0|| = 10, K = 4, eps = 1, kappa = 2 gives 2."""
        assert guaranteed_rounds(10.0, 4, 1.0, 2.0) == pytest.approx(2.0)

    def test_small_eps_flat_limit(self):
        """Test kappa = 1 and small eps give roughly ||y0|| / sqrt(K eps)."""
        value = guaranteed_rounds(1.0, 1, 1e-10, 1.0)
        assert value == pytest.approx(1e5, rel=1e-4)

    def test_collapsed(self):
        """Test ||y0|| <= sqrt(K eps) raises CollapseCondition."""
        with pytest.raises(CollapseCondition):
            guaranteed_rounds(2.0, 4, 1.0, 1.0)


class TestRatioLowerBound:
    """Tests for the basis-ratio bound."""

    def test_zeroth_power(self):
        """Test t = 0 gives 1."""
        assert ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 4.0, 0) == 1.0

    def test_direct_substitution(self):
        """Test r0 = 3, d_j = d_min, t = 1 gives (3 - 1 + 1) / (3 - 1 + d_min / d_k)."""
        bound = ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 4.0, 1)
        assert bound == pytest.approx(3.0 / 2.25, rel=1e-12)

    def test_increasing_in_t(self):
        """Test the bound exceeds 1 and grows with t."""
        values = [ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 4.0, t) for t in range(1, 5)]
        assert values[0] > 1.0
        assert all(b > a for a, b in zip(values, values[1:], strict=False))

    def test_order_required(self):
        """Test d_k <= d_j is rejected."""
        with pytest.raises(PreconditionViolation):
            ratio_lower_bound(6.0, 4, 1.0, 1.0, 2.0, 2.0, 1)

    def test_horizon(self):
        """Test t beyond t_under + 1 is rejected when kappa is given."""
        assert ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 4.0, 1, kappa=4.0) > 1.0
        with pytest.raises(PreconditionViolation):
            ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 4.0, 2, kappa=4.0)

    def test_two_point_simulation(self, spline):
        """Test the bound holds for the first round of a two-point chain."""
        data = Dataset(np.array([0.3, 0.7]), np.array([1.0, 0.4]))
        trace = run_chain(data, spline, FitConfig(epsilon=0.05))
        d = trace.spectrum.eigvals
        b = trace.states[0].b_diag
        bound = ratio_lower_bound(trace.states[0].norm_z, 2, 0.05, d[0], d[0], d[1], 1)
        assert b[1] / b[0] >= bound * (1 - 1e-12)


class TestSparsity:
    """Tests for the sparsity index and its limit."""

    def test_zeroth_power(self):
        """Test t = 0 gives S = 1."""
        assert sparsity_index(6.0, 4, 1.0, 1.0, [1.0, 2.0, 5.0], 0) == 1.0

    def test_two_eigenvalues(self):
        """Test K = 2 equals the single pair bound."""
        index = sparsity_index(6.0, 4, 1.0, 1.0, [1.0, 3.0], 2)
        assert index == pytest.approx(ratio_lower_bound(6.0, 4, 1.0, 1.0, 1.0, 3.0, 2), rel=1e-12)

    def test_log_form(self):
        """Test exp(log S) == S."""
        log_s = log_sparsity_index(6.0, 4, 1.0, 1.0, [1.0, 2.0, 5.0], 3)
        assert math.exp(log_s) == pytest.approx(sparsity_index(6.0, 4, 1.0, 1.0, [1.0, 2.0, 5.0], 3))

    def test_ties_are_degenerate(self):
        """Test equal adjacent eigenvalues raise DegenerateSpectrum."""
        with pytest.raises(DegenerateSpectrum):
            sparsity_index(6.0, 4, 1.0, 1.0, [1.0, 2.0, 2.0], 1)

    def test_single_eigenvalue(self):
        """Test one eigenvalue has no adjacent pair."""
        with pytest.raises(DegenerateSpectrum):
            sparsity_index(6.0, 4, 1.0, 1.0, [1.0], 1)

    def test_unsorted(self):
        """Test descending eigenvalues are rejected."""
        with pytest.raises(PreconditionViolation):
            sparsity_index(6.0, 4, 1.0, 1.0, [2.0, 1.0], 1)

    def test_limit_two_eigenvalues(self):
        """Test d = (1, 2) gives exp(0.25)."""
        assert sparsity_limit(1.0, 2.0, [1.0, 2.0]) == pytest.approx(math.exp(0.25), rel=1e-15)

    def test_limit_with_ties(self, caplog):
        """Test equal adjacent eigenvalues give a limit of 1 with a warning."""
        assert sparsity_limit(1.0, 2.0, [1.0, 2.0, 2.0]) == 1.0
        assert "coincide" in caplog.text

    def test_sweep_monotone_and_converges(self, sine_trace):
        """Test S(t_under) grows as eps shrinks and reaches the limit within 5%."""
        origin = sine_trace.states[sine_trace.theory_origin]
        d = sine_trace.spectrum.eigvals
        base = origin.norm_z**2 / sine_trace.n_samples
        grid = [base * f for f in (0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)]
        rows = sparsity_sweep(origin.norm_z, sine_trace.n_samples, d, grid)
        assert len(rows) == len(grid)
        values = [row.sparsity_index for row in rows]
        assert all(b > a for a, b in zip(values, values[1:], strict=False))
        limit = sparsity_limit(float(d[0]), sine_trace.spectrum.cond, d)
        assert values[-1] <= limit * (1 + 1e-12)
        assert values[-1] >= 0.95 * limit

    def test_sweep_skips_collapsed(self, caplog):
        """Test tolerances that collapse the labels are left out."""
        rows = sparsity_sweep(2.0, 1, [1.0, 2.0], [10.0, 0.5])
        assert [row.epsilon for row in rows] == [0.5]
        assert "Skipping" in caplog.text


class TestEquivalentSpectrum:
    """Tests for d_dagger."""

    def test_single_round_is_identity(self):
        """Test c_history = [c0] returns d."""
        d = np.array([0.01, 0.5, 3.0])
        np.testing.assert_allclose(equivalent_spectrum(d, [0.2]), d, rtol=1e-12)

    def test_hand_arithmetic(self):
        """Test d = 1, c = (1, 1) gives 1/3."""
        assert equivalent_spectrum([1.0], [1.0, 1.0])[0] == pytest.approx(1 / 3, rel=1e-15)

    def test_decreasing_as_history_grows(self):
        """Test appending a multiplier lowers every entry."""
        d = np.array([0.1, 1.0, 2.0])
        shorter = equivalent_spectrum(d, [0.3, 0.4])
        longer = equivalent_spectrum(d, [0.3, 0.4, 0.5])
        assert np.all(longer < shorter)
        assert np.all(longer > 0.0)

    def test_rejects_empty_history(self):
        """Test an empty history is rejected."""
        with pytest.raises(PreconditionViolation):
            equivalent_spectrum([1.0], [])

    def test_recorded_round_zero(self, sine_trace):
        """Test t = 0 on the recorded chain returns the Gram eigenvalues."""
        d = sine_trace.spectrum.eigvals
        np.testing.assert_allclose(equivalent_spectrum(d, sine_trace.c_history[:1]), d, rtol=1e-12)

    @pytest.mark.parametrize("t", [0, 1, 2, 3])
    def test_ridge_equivalence(self, sine_trace, t):
        """Test ridge regression on V^T D_dagger V with c_0 reproduces round t."""
        system = sine_trace.system
        spectrum = sine_trace.spectrum
        d_dagger = equivalent_spectrum(spectrum.eigvals, sine_trace.c_history[: t + 1])
        g_dagger = SymMatrix(spectrum.eigvecs.T @ (d_dagger[:, None] * spectrum.eigvecs))
        y_free = sine_trace.y0[system.free_index]
        fitted = g_dagger.entries @ solve_shifted(g_dagger, sine_trace.states[0].c, y_free)
        expected = model_at(sine_trace, t).train_predictions[system.free_index]
        np.testing.assert_allclose(fitted, expected, atol=1e-8)


class TestGeneralizationProxies:
    """Tests for the trace and tail proxies."""

    def test_flat_four(self):
        """Test d_dagger = (1, 1, 1, 1), K = 4."""
        trace_proxy, tail_proxy = generalization_proxies([1.0, 1.0, 1.0, 1.0], 4)
        assert trace_proxy == pytest.approx(2.0)
        brute = min(k / 4 + math.sqrt((4 - k) / 4) for k in range(5))
        assert tail_proxy == pytest.approx(brute)

    def test_single(self):
        """Test d_dagger = (4), K = 1."""
        assert generalization_proxies([4.0], 1) == pytest.approx((2.0, 1.0))

    def test_order_does_not_matter(self):
        """Test the tail is taken over the nonincreasing order."""
        a = generalization_proxies([0.1, 3.0, 0.5], 3)
        b = generalization_proxies([3.0, 0.5, 0.1], 3)
        assert a == pytest.approx(b)

    def test_too_many_eigenvalues(self):
        """Test more eigenvalues than K is rejected."""
        with pytest.raises(PreconditionViolation):
            generalization_proxies([1.0, 1.0], 1)

    def test_sine_trace_proxy_decreases(self, sine_trace):
        """Test the trace proxy strictly decreases over t = 0..3."""
        report = theory_report(sine_trace, with_early_stopping=False)
        proxies = report.trace_proxies
        assert len(proxies) == 4
        assert all(b < a for a, b in zip(proxies, proxies[1:], strict=False))


class TestDiagnostics:
    """Tests for shrinkage and spread helpers."""

    def test_shrinkage_limits(self):
        """Test c -> 0 gives ones and c -> inf gives spread kappa."""
        d = np.array([1.0, 4.0])
        np.testing.assert_allclose(shrinkage_profile(d, 1e-12), [1.0, 1.0], atol=1e-11)
        assert spread(shrinkage_profile(d, 1e12)) == pytest.approx(4.0, rel=1e-9)

    def test_effective_basis_count(self):
        """Test entries below the relative threshold are not counted."""
        assert effective_basis_count([1.0, 0.5, 1e-9]) == 2


class TestEarlyStopping:
    """Tests for the early-stopping contrast."""

    def test_recorded_distillation_is_sparser(self, spline, sine_data, sine_trace):
        """Test B_t is more spread out than the matched single fit at every round."""
        report = early_stopping_comparison(sine_data, spline, sine_trace)
        assert [row.t for row in report.rows] == [1, 2, 3]
        assert report.all_sparser
        for row in report.rows:
            assert row.c_prime > sine_trace.states[0].c
            assert row.target_error > 0.045

    def test_flat_spectrum_has_no_spread(self, flat_data, narrow_gaussian):
        """Test kappa = 1 leaves both diagonals flat."""
        trace = run_chain(flat_data, narrow_gaussian, FitConfig(epsilon=0.5))
        report = early_stopping_comparison(flat_data, narrow_gaussian, trace)
        for row in report.rows:
            assert row.distill_spread == pytest.approx(1.0, rel=1e-12)
            assert row.early_stop_spread == pytest.approx(1.0, rel=1e-12)

    def test_needs_two_rounds(self, spline, sine_data, sine_config):
        """Test a single-round trace is rejected."""
        trace = run_chain(sine_data, spline, sine_config, max_rounds=1)
        with pytest.raises(PreconditionViolation):
            early_stopping_comparison(sine_data, spline, trace)

    def test_report_dict(self, spline, sine_data, sine_trace):
        """Test the JSON form carries the per-row verdict."""
        data = early_stopping_comparison(sine_data, spline, sine_trace).as_dict()
        assert data["all_sparser"] is True
        assert {"t", "c_prime", "distill_sparser"} <= set(data["rows"][0])


class TestTheoryReport:
    """Tests for theory_report."""

    def test_recorded_report(self, sine_trace):
        """Test the recorded chain report is internally consistent."""
        report = theory_report(sine_trace)
        assert report.origin == 1
        assert report.r0 > 1.0
        assert report.guaranteed_rounds == pytest.approx((report.r0 - 1.0) / report.kappa)
        assert math.floor(report.guaranteed_rounds) <= report.observed_rounds
        assert report.observed_rounds == 3
        assert report.collapsed_at == 4
        assert len(report.z_lower_bounds) == 3
        assert report.z_lower_bounds[0] == pytest.approx(sine_trace.states[1].norm_z, rel=1e-12)
        assert all(row.bound <= row.observed * (1 + 1e-9) for row in report.ratio_bounds)
        assert 1.0 <= report.sparsity_limit
        assert report.early_stopping is not None
        assert len(report.equivalent_spectrum) == sine_trace.spectrum.dim

    def test_report_dict_is_plain(self, sine_trace):
        """Test as_dict nests plain containers."""
        data = theory_report(sine_trace).as_dict()
        assert isinstance(data["ratio_bounds"][0], dict)
        assert isinstance(data["early_stopping"], dict)

    def test_origin_not_reached(self, spline, sine_data, sine_config):
        """Test a chain still carrying anchored targets is rejected."""
        trace = run_chain(sine_data, spline, sine_config, max_rounds=1)
        with pytest.raises(PreconditionViolation):
            theory_report(trace)

    def test_anchor_free_origin(self, flat_data, narrow_gaussian):
        """Test anchor-free data starts the bounds at round 0."""
        trace = run_chain(flat_data, narrow_gaussian, FitConfig(epsilon=0.5))
        report = theory_report(trace)
        assert report.origin == 0
        assert report.kappa == pytest.approx(1.0)
        assert report.sparsity_limit == 1.0
        assert all(value == 1.0 for value in report.sparsity_index_per_t)
        root = math.sqrt(1.5)
        for t, bound in enumerate(report.z_lower_bounds):
            assert bound == pytest.approx(math.sqrt(14.0) - t * root, abs=1e-12)


class TestCompareBounds:
    """Tests for compare_bounds."""

    def test_recorded_all_satisfied(self, sine_trace):
        """Test every bound holds on the recorded chain."""
        checks = compare_bounds(sine_trace)
        assert checks
        assert all(check.satisfied for check in checks)

    def test_random_instances_all_satisfied(self, random_instances):
        """Test every bound holds on 100 random instances."""
        for instance in random_instances(100, seed=17):
            trace = run_chain(instance.data, instance.kernel, instance.config)
            failed = [check for check in compare_bounds(trace) if not check.satisfied]
            assert not failed, failed

    def test_flat_spectrum(self, flat_data, narrow_gaussian):
        """Test kappa = 1 produces no violations."""
        trace = run_chain(flat_data, narrow_gaussian, FitConfig(epsilon=0.5))
        assert all(check.satisfied for check in compare_bounds(trace))

    def test_detects_tampered_multiplier(self, sine_trace, caplog):
        """Test a wrong c_t is reported as violated."""
        states = list(sine_trace.states)
        states[2] = replace(states[2], c=states[2].c * 2.0, train_error_vs_eps=0.06)
        tampered = DistillationTrace(
            system=sine_trace.system,
            config=sine_trace.config,
            states=tuple(states),
            collapsed_at=sine_trace.collapsed_at,
        )
        failed = {check.quantity for check in compare_bounds(tampered) if not check.satisfied}
        assert QUANTITY_CONSTRAINT in failed
        assert QUANTITY_B_CONSISTENCY in failed
        assert "violated" in caplog.text

    def test_without_origin(self, spline, sine_data, sine_config, caplog):
        """Test origin-relative bounds are skipped while anchored targets remain."""
        trace = run_chain(sine_data, spline, sine_config, max_rounds=1)
        checks = compare_bounds(trace)
        assert all(check.satisfied for check in checks)
        assert "skipped" in caplog.text
