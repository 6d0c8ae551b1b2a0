"""Tests for the development scripts."""

import csv

from distillkit.analysis import BoundCheck
from scripts import audit_bounds, sweep_sparsity


class TestAuditBounds:
    """Tests for the random-problem audit."""

    def test_small_audit_passes(self, capsys):
        """Test a few seeded problems pass every check."""
        assert audit_bounds.main(["--count", "6", "--seed", "1", "--max-rounds", "6"]) == 0
        assert "6 problems, 0 failures" in capsys.readouterr().out

    def test_violation_fails(self, mocker, capsys):
        """Test a failing bound is printed and exits with 1."""
        check = BoundCheck(quantity="z_norm", t=0, bound=1.0, observed=0.5, satisfied=False)
        mocker.patch("scripts.audit_bounds.compare_bounds", return_value=[check])
        assert audit_bounds.main(["--count", "2"]) == 1
        out = capsys.readouterr().out
        assert "FAIL #0" in out
        assert "z_norm at t=0" in out

    def test_refit_mismatch_is_reported(self, mocker):
        """Test a disagreeing refit chain is a failure."""
        mocker.patch("scripts.audit_bounds.refit_disagreement", return_value="c_0 1.0 vs 2.0")
        failures = audit_bounds.audit(count=1, seed=0, max_rounds=3)
        assert len(failures) == 1
        assert "refit c_0" in failures[0]

    def test_bad_count(self):
        """Test a non-positive count is rejected."""
        assert audit_bounds.main(["--count", "0"]) == 1


class TestSweepSparsity:
    """Tests for the sparsity sweep."""

    def test_preset_sweep(self, tmp_path, capsys):
        """Test the default preset sweep prints and writes every tolerance."""
        target = tmp_path / "sweep.csv"
        assert sweep_sparsity.main(["--points", "8", "--csv", str(target)]) == 0
        assert "origin=t1" in capsys.readouterr().out
        with target.open(newline="", encoding="utf-8") as file:
            rows = list(csv.reader(file))
        assert tuple(rows[0]) == sweep_sparsity.SWEEP_COLUMNS
        assert len(rows) == 1 + 8
        sparsities = [float(row[2]) for row in rows[1:]]
        assert all(s >= 1.0 for s in sparsities)

    def test_grid_stays_below_collapse(self):
        """Test every grid tolerance keeps ||y||^2 > K eps."""
        grid = sweep_sparsity.tolerance_grid(2.0, 4, 5, 1e-6)
        assert len(grid) == 5
        assert max(grid) < 2.0 * 2.0 / 4

    def test_flat_spectrum_is_an_error(self, fixtures_dir, capsys):
        """Test coinciding eigenvalues make the sweep fail cleanly."""
        config = fixtures_dir / "configs" / "flat_spectrum.json"
        assert sweep_sparsity.main(["--config", str(config)]) == 1
        assert "Error" in capsys.readouterr().out
