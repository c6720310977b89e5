from dataclasses import asdict, dataclass, field
from typing import List, Optional

import pandas as pd

from symscatter.sim.utils import median_full_error, summarize

ROW_COLUMNS = [
    "rep",
    "d",
    "scheme",
    "approx_error",
    "est_error",
    "full_error",
    "runtime_ms",
]


@dataclass
class ExperimentRow:
    """
    Holds all of the data needed to write one line of the experiment rows CSV.

    Attributes:
        rep: Index of the replication, starting at 0.
        d: Number of balanced offsets or random cycles.
        scheme: Tag of the incomplete scheme, "balanced" or "randomized".
        approx_error: Geodesic distance between the incomplete and the complete shape estimate.
        est_error: Geodesic distance between the incomplete shape estimate and the true shape.
        full_error: Geodesic distance between the complete shape estimate and the true shape.
        runtime_ms: Milliseconds spent on the incomplete estimate, 0 when timing is not recorded.
        error: Message of the failure that left the distances empty. Not written to the CSV.
    """

    rep: int
    d: int
    scheme: str
    approx_error: float = field(default=float("nan"))
    est_error: float = field(default=float("nan"))
    full_error: float = field(default=float("nan"))
    runtime_ms: float = field(default=0.0)
    error: Optional[str] = field(default=None)

    @property
    def failed(self) -> bool:
        return self.error is not None

    def set_attributes(self, **kwargs) -> None:
        """Set attributes for the ExperimentRow object.

        Args:
            **kwargs: Keyword arguments for the ExperimentRow object.
        """
        for key, value in kwargs.items():
            setattr(self, key, value)


@dataclass
class ExperimentReporter:
    """
    Collects the ExperimentRow objects of a run in replication order and summarizes them.

    Attributes:
        n: Number of observations per replication.
        q: Dimension of the observations.
        reps: Number of replications.
        seed: Seed of the run.
        rows: List of ExperimentRow objects in the order they were added.
    """

    n: int
    q: int
    reps: int
    seed: int
    rows: Optional[List[ExperimentRow]] = field(default_factory=list)

    def add_row(self, row: ExperimentRow) -> None:
        """Adds an ExperimentRow object to the list of rows.

        Args:
            row (ExperimentRow): ExperimentRow object to be added to the list.
        """
        self.rows.append(row)

    def add_rows(self, rows: List[ExperimentRow]) -> None:
        for row in rows:
            self.add_row(row)

    @property
    def excluded_rows(self) -> List[ExperimentRow]:
        return [row for row in self.rows if row.failed]

    def to_frame(self) -> pd.DataFrame:
        """Rows as a DataFrame with exactly the CSV columns, failed rows included with empty distances."""
        return pd.DataFrame(
            [{key: asdict(row)[key] for key in ROW_COLUMNS} for row in self.rows],
            columns=ROW_COLUMNS,
        )

    def summary(self) -> dict:
        """Summary of the run: relative error distributions per (d, scheme), the median of
        full_error and the rows that were excluded because a solve failed.

        Raises:
            ValueError: if no row has distances
        """
        frame = self.to_frame()
        return {
            "n": self.n,
            "q": self.q,
            "reps": self.reps,
            "seed": self.seed,
            "median_full_error": median_full_error(frame),
            "groups": summarize(frame).to_dict(orient="records"),
            "excluded_rows": [
                {"rep": row.rep, "d": row.d, "scheme": row.scheme, "error": row.error}
                for row in self.excluded_rows
            ],
        }
