import numpy as np
import pytest

from symscatter.reporter import ROW_COLUMNS, ExperimentReporter, ExperimentRow


class TestExperimentRow:
    def setup_method(self):
        self.row = ExperimentRow(rep=0, d=1, scheme="balanced")

    def test_defaults(self):
        assert np.isnan(self.row.approx_error)
        assert self.row.runtime_ms == 0.0
        assert not self.row.failed

    def test_set_attributes(self):
        self.row.set_attributes(approx_error=0.3, error="balanced: failed")
        assert self.row.approx_error == 0.3
        assert self.row.failed


class TestExperimentReporter:
    def setup_method(self):
        self.reporter = ExperimentReporter(n=10, q=2, reps=2, seed=4)
        self.good_rows = [
            ExperimentRow(rep=0, d=1, scheme="balanced", approx_error=0.5, est_error=1.2, full_error=1.0),
            ExperimentRow(rep=1, d=1, scheme="balanced", approx_error=0.3, est_error=0.9, full_error=0.6),
        ]
        self.failed_row = ExperimentRow(rep=1, d=1, scheme="randomized", full_error=0.6, error="randomized: boom")

    def test_add_row(self):
        self.reporter.add_row(self.good_rows[0])
        assert self.reporter.rows == [self.good_rows[0]]

    def test_add_rows_keeps_order(self):
        self.reporter.add_rows(self.good_rows + [self.failed_row])
        assert self.reporter.rows[-1] is self.failed_row
        assert self.reporter.excluded_rows == [self.failed_row]

    def test_to_frame(self):
        self.reporter.add_rows(self.good_rows + [self.failed_row])
        frame = self.reporter.to_frame()
        assert list(frame.columns) == ROW_COLUMNS
        assert len(frame) == 3
        assert np.isnan(frame["approx_error"].iloc[2])
        assert "error" not in frame.columns

    def test_summary(self):
        self.reporter.add_rows(self.good_rows + [self.failed_row])
        summary = self.reporter.summary()
        assert summary["n"] == 10 and summary["q"] == 2 and summary["reps"] == 2 and summary["seed"] == 4
        assert summary["median_full_error"] == pytest.approx(0.8)
        assert {group["scheme"] for group in summary["groups"]} == {"balanced"}
        assert summary["excluded_rows"] == [
            {"rep": 1, "d": 1, "scheme": "randomized", "error": "randomized: boom"}
        ]

    def test_summary_without_rows(self):
        self.reporter.add_row(self.failed_row)
        with pytest.raises(ValueError):
            self.reporter.summary()
