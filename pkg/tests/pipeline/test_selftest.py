"""
Tests for the built-in verification suite and the method comparison.
"""

from pathlib import Path

import pytest

from src.pipeline.ablation import (
    METHOD_DC_ADJOINT,
    METHOD_UNROLLED_DC,
    METHOD_UNROLLED_NO_DC,
    run_ablation,
)
from src.pipeline.config import load_config
from src.pipeline.selftest import (
    CHECKS,
    check_adjointness,
    check_density_compensation,
    check_metrics,
    check_nufft_oracle,
    run_selftest,
)

REPO_ROOT = Path(__file__).resolve().parents[2]


class TestChecks:

    @pytest.mark.parametrize(
        "check", [check_nufft_oracle, check_adjointness, check_density_compensation, check_metrics]
    )
    def test_passes(self, check):
        passed, detail = check()

        assert passed, detail

    def test_check_names_unique(self):
        names = [name for name, _ in CHECKS]

        assert len(names) == len(set(names))

    def test_failure_is_reported(self, monkeypatch):
        def broken():
            raise RuntimeError("boom")

        monkeypatch.setattr("src.pipeline.selftest.CHECKS", [("broken", broken)])
        results = run_selftest()

        assert len(results) == 1
        assert not results[0].passed
        assert "boom" in results[0].detail


@pytest.mark.slow
class TestRunSelftest:

    def test_all_pass(self):
        results = run_selftest()

        assert [r.name for r in results] == [name for name, _ in CHECKS]
        assert all(r.passed for r in results), [r for r in results if not r.passed]


@pytest.mark.slow
class TestAblation:

    def test_data_consistency_ordering(self):
        config = load_config(REPO_ROOT / "config" / "recon.yaml")
        rows = {row.method: row for row in run_ablation(config)}

        assert set(rows) == {METHOD_DC_ADJOINT, METHOD_UNROLLED_NO_DC, METHOD_UNROLLED_DC}
        assert rows[METHOD_DC_ADJOINT].n_parameters == 0
        assert rows[METHOD_UNROLLED_DC].psnr >= rows[METHOD_UNROLLED_NO_DC].psnr + 1.0
        assert rows[METHOD_UNROLLED_DC].psnr >= rows[METHOD_DC_ADJOINT].psnr + 0.5
