"""Monte-Carlo comparison of complete and incomplete symmetrized shape estimators.

Each replication draws a dataset, computes the complete estimate H_n = shape(Sigma(Q_n)) and, for
every d and scheme, the incomplete estimate H_n,d. Rows report geodesic distances between
H_n,d, H_n and the true shape H.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import List, Tuple

import numpy as np

from symscatter.constants import DEFAULT_MAX_ITER, DEFAULT_TOL, FunctionalKind, SchemeKind
from symscatter.errors import ConfigError, ExperimentError, SymScatterError
from symscatter.linalg import geodesic_distance, shape_normalize
from symscatter.logs import log_time, time_function
from symscatter.pairs import PairScheme, max_balanced_d
from symscatter.reporter import ExperimentReporter, ExperimentRow
from symscatter.scatter.rho import ScatterFunctional, rho_nu
from symscatter.scatter.symmetrized import averaged_randomized_estimator, symmetrized_scatter
from symscatter.sim.generate import DistributionSpec, generate_data, true_shape

logger = logging.getLogger(__name__)

INCOMPLETE_SCHEMES = (SchemeKind.BALANCED, SchemeKind.RANDOMIZED)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one simulation run. See ``from_dict`` for the accepted keys."""

    n: int
    q: int
    d_values: Tuple[int, ...]
    distribution: DistributionSpec = field(
        default_factory=lambda: DistributionSpec.from_dict({"kind": "iid-exponential"})
    )
    functional: FunctionalKind = FunctionalKind.M
    rho_nu: float = 1.0
    schemes: Tuple[SchemeKind, ...] = (SchemeKind.BALANCED,)
    reps: int = 200
    seed: int = 0
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    workers: int = 1
    record_timing: bool = False

    @classmethod
    def from_dict(cls, config: dict) -> "ExperimentConfig":
        """Builds a validated configuration from a parsed YAML or JSON mapping.

        Args:
            config (dict): keys n, q, d_values (required) and distribution, functional, rho_nu,
                schemes, reps, seed, tol, max_iter, workers, record_timing (optional)

        Raises:
            ConfigError: on unknown keys, missing required keys or invalid values

        Returns:
            ExperimentConfig: validated configuration
        """
        if not isinstance(config, dict):
            raise ConfigError("The experiment configuration must be a mapping.")
        known = {f.name for f in fields(cls)}
        unknown = set(config) - known
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}.")
        missing = {"n", "q", "d_values"} - set(config)
        if missing:
            raise ConfigError(f"Missing configuration keys: {sorted(missing)}.")

        values = dict(config)
        try:
            values["n"] = int(values["n"])
            values["q"] = int(values["q"])
            d_values = values["d_values"]
            if isinstance(d_values, int):
                d_values = [d_values]
            values["d_values"] = tuple(int(d) for d in d_values)
            if "distribution" in values:
                values["distribution"] = DistributionSpec.from_dict(values["distribution"])
            if "functional" in values:
                values["functional"] = FunctionalKind(values["functional"])
            if "schemes" in values:
                schemes = values["schemes"]
                if isinstance(schemes, str):
                    schemes = [schemes]
                values["schemes"] = tuple(SchemeKind(s) for s in schemes)
            for key in ("reps", "seed", "max_iter", "workers"):
                if key in values:
                    values[key] = int(values[key])
            for key in ("rho_nu", "tol"):
                if key in values:
                    values[key] = float(values[key])
            if "record_timing" in values:
                values["record_timing"] = bool(values["record_timing"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration value: {e}")

        experiment_config = cls(**values)
        experiment_config.validate()
        return experiment_config

    def validate(self) -> None:
        """Checks the invariants of the configuration.

        Raises:
            ConfigError: if any invariant fails
        """
        if self.n < 3:
            raise ConfigError(f"n must be at least 3, got {self.n}.")
        if self.q < 1:
            raise ConfigError(f"q must be at least 1, got {self.q}.")
        if not self.d_values:
            raise ConfigError("d_values must not be empty.")
        largest = max_balanced_d(self.n)
        bad = [d for d in self.d_values if not 1 <= d <= largest]
        if bad:
            raise ConfigError(f"d_values must lie in 1..{largest} for n={self.n}, got {bad}.")
        if not self.schemes or any(s not in INCOMPLETE_SCHEMES for s in self.schemes):
            raise ConfigError("schemes must be a non-empty subset of {balanced, randomized}.")
        if self.reps < 1:
            raise ConfigError(f"reps must be at least 1, got {self.reps}.")
        if self.seed < 0:
            raise ConfigError(f"seed must be nonnegative, got {self.seed}.")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}.")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}.")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}.")
        if self.functional == FunctionalKind.M and self.rho_nu <= 0:
            raise ConfigError(f"rho_nu must be positive, got {self.rho_nu}.")
        self.distribution.validate(self.q)

    def scatter_functional(self) -> ScatterFunctional:
        if self.functional == FunctionalKind.TYLER:
            return ScatterFunctional.tyler()
        return ScatterFunctional.m_type(rho_nu(self.rho_nu, self.q))

    def to_dict(self) -> dict:
        config = asdict(self)
        config["distribution"] = self.distribution.to_dict()
        config["functional"] = self.functional.value
        config["schemes"] = [s.value for s in self.schemes]
        config["d_values"] = list(self.d_values)
        return config


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent stream of replication rep, fixed by (seed, rep) alone."""
    return np.random.default_rng(np.random.SeedSequence([seed, rep]))


def cycle_seed(seed: int, rep: int, d: int) -> int:
    """Seed of the permutation stream behind the randomized estimator with d cycles."""
    return int(np.random.SeedSequence([seed, rep, d]).generate_state(1, dtype=np.uint64)[0])


def _incomplete_estimate(
    config: ExperimentConfig,
    data: np.ndarray,
    functional: ScatterFunctional,
    scheme: SchemeKind,
    d: int,
    rep: int,
) -> np.ndarray:
    if scheme == SchemeKind.BALANCED:
        return symmetrized_scatter(
            data,
            PairScheme.balanced(d),
            functional,
            tol=config.tol,
            max_iter=config.max_iter,
        ).estimate
    return averaged_randomized_estimator(
        data,
        d,
        functional,
        tol=config.tol,
        seed=cycle_seed(config.seed, rep, d),
        max_iter=config.max_iter,
    )


@log_time(func_name="run_replication", logger=logger)
def run_replication(config: ExperimentConfig, rep: int) -> List[ExperimentRow]:
    """Computes the rows of one replication, d-major then scheme in configuration order.

    A failed complete solve leaves every row of the replication without distances; a failed
    incomplete solve only its own row. The failure message is kept in ``ExperimentRow.error``.

    Args:
        config (ExperimentConfig): run parameters
        rep (int): replication index, used with config.seed to seed the data stream

    Returns:
        List[ExperimentRow]: one row per (d, scheme)
    """
    rng = replication_rng(config.seed, rep)
    data = generate_data(config.distribution, config.n, config.q, rng)
    truth = true_shape(config.distribution, config.q)
    functional = config.scatter_functional()
    cells = [(d, scheme) for d in config.d_values for scheme in config.schemes]

    try:
        complete = symmetrized_scatter(
            data,
            PairScheme.complete(),
            functional,
            tol=config.tol,
            max_iter=config.max_iter,
        )
        full_shape = shape_normalize(complete.estimate)
        full_error = geodesic_distance(full_shape, truth)
    except SymScatterError as e:
        logger.warning("Replication %s: complete estimate failed: %s", rep, e.message)
        return [
            ExperimentRow(rep=rep, d=d, scheme=scheme.value, error=f"complete: {e.message}")
            for d, scheme in cells
        ]

    rows = []
    for d, scheme in cells:
        row = ExperimentRow(rep=rep, d=d, scheme=scheme.value, full_error=full_error)
        try:
            elapsed, estimate = time_function(
                _incomplete_estimate, config, data, functional, scheme, d, rep
            )
            incomplete_shape = shape_normalize(estimate)
            row.set_attributes(
                approx_error=geodesic_distance(incomplete_shape, full_shape),
                est_error=geodesic_distance(incomplete_shape, truth),
                runtime_ms=1000.0 * elapsed if config.record_timing else 0.0,
            )
        except SymScatterError as e:
            logger.warning(
                "Replication %s: %s estimate with d=%s failed: %s", rep, scheme.value, d, e.message
            )
            row.set_attributes(error=f"{scheme.value}: {e.message}")
        rows.append(row)
    return rows


def _replication_task(task: Tuple[ExperimentConfig, int]) -> List[ExperimentRow]:
    config, rep = task
    return run_replication(config=config, rep=rep)


@log_time(func_name="run_experiment", logger=logger)
def run_experiment(config: ExperimentConfig) -> ExperimentReporter:
    """Runs every replication and collects the rows in replication order.

    Replications are seeded by (seed, rep) only, so the rows do not depend on the number of
    workers.

    Args:
        config (ExperimentConfig): run parameters

    Raises:
        ExperimentError: if no replication produced a complete estimate

    Returns:
        ExperimentReporter: rows and summary of the run
    """
    reporter = ExperimentReporter(n=config.n, q=config.q, reps=config.reps, seed=config.seed)
    tasks = [(config, rep) for rep in range(config.reps)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(_replication_task, tasks))
    else:
        results = [_replication_task(task) for task in tasks]
    for rows in results:
        reporter.add_rows(rows)

    excluded = reporter.excluded_rows
    if excluded:
        logger.warning("%s of %s rows were excluded after failed solves", len(excluded), len(reporter.rows))
    if len(excluded) == len(reporter.rows):
        raise ExperimentError(
            "\nEvery replication has failed. Refer to the list of errors below to address issues:\n"
            + "\n".join(sorted({f"rep {row.rep}: {row.error}" for row in excluded}))
        )
    return reporter
