"""Data generation for the Monte-Carlo experiments."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from symscatter.constants import DistributionKind
from symscatter.errors import ConfigError, NotPositiveDefiniteError, DimensionMismatchError
from symscatter.linalg import as_spd_matrix, shape_normalize, spd_power
from symscatter.ustats import Sampler


@dataclass(frozen=True)
class DistributionSpec:
    """Distribution of the observations.

    Attributes:
        kind: iid-exponential, iid-gaussian or elliptical-t
        df: degrees of freedom of the elliptical t distribution
        scatter: scatter matrix of the elliptical t distribution, identity when omitted
    """

    kind: DistributionKind
    df: Optional[float] = None
    scatter: Optional[np.ndarray] = None

    @classmethod
    def from_dict(cls, spec: dict) -> "DistributionSpec":
        """Parses a spec like {"kind": "elliptical-t", "df": 3, "scatter": [[2, 0], [0, 1]]}.

        A bare string is read as the kind.

        Raises:
            ConfigError: on unknown kinds or keys
        """
        if isinstance(spec, str):
            spec = {"kind": spec}
        if not isinstance(spec, dict):
            raise ConfigError(f"distribution must be a mapping or a kind name, got {spec!r}.")
        unknown = set(spec) - {"kind", "df", "scatter"}
        if unknown:
            raise ConfigError(f"Unknown distribution keys: {sorted(unknown)}.")
        try:
            kind = DistributionKind(spec.get("kind"))
        except ValueError:
            raise ConfigError(
                f"Unknown distribution {spec.get('kind')!r}; choose one of "
                f"{[k.value for k in DistributionKind]}."
            )
        scatter = spec.get("scatter")
        if scatter is not None:
            scatter = np.asarray(scatter, dtype=float)
        df = spec.get("df")
        return cls(kind=kind, df=None if df is None else float(df), scatter=scatter)

    def validate(self, q: int) -> None:
        """Checks the parameters against the dimension q.

        Raises:
            ConfigError: if df or scatter are missing or invalid
        """
        if self.kind != DistributionKind.ELLIPTICAL_T:
            return
        if self.df is None or self.df <= 0:
            raise ConfigError(f"elliptical-t needs df > 0, got {self.df}.")
        if self.scatter is not None:
            try:
                scatter = as_spd_matrix(self.scatter)
            except (NotPositiveDefiniteError, DimensionMismatchError, ValueError) as e:
                raise ConfigError(f"Invalid scatter matrix: {e}")
            if scatter.shape != (q, q):
                raise ConfigError(f"scatter must be {q} x {q}, got {scatter.shape}.")

    def scatter_matrix(self, q: int) -> np.ndarray:
        if self.scatter is None:
            return np.eye(q)
        return as_spd_matrix(self.scatter)

    def to_dict(self) -> dict:
        spec = {"kind": self.kind.value}
        if self.df is not None:
            spec["df"] = self.df
        if self.scatter is not None:
            spec["scatter"] = np.asarray(self.scatter).tolist()
        return spec


def generate_data(spec: DistributionSpec, n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """Draws n iid observations in R^q.

    Exponential components use the inverse CDF -log(1 - U). Elliptical t rows are
    scatter^(1/2) Z / sqrt(W / df) with Z standard Gaussian and W ~ chi^2_df.

    Args:
        spec (DistributionSpec): distribution to draw from
        n (int): number of observations, >= 1
        q (int): dimension, >= 1
        rng (np.random.Generator): random stream

    Raises:
        ValueError: if n or q < 1
        ConfigError: if the distribution parameters are invalid

    Returns:
        np.ndarray: (n, q) array
    """
    if n < 1 or q < 1:
        raise ValueError(f"n and q must be positive, got n={n}, q={q}.")
    spec.validate(q)
    if spec.kind == DistributionKind.EXPONENTIAL:
        return -np.log1p(-rng.random((n, q)))
    if spec.kind == DistributionKind.GAUSSIAN:
        return rng.standard_normal((n, q))
    z = rng.standard_normal((n, q))
    w = rng.chisquare(spec.df, size=n)
    root = spd_power(spec.scatter_matrix(q), 0.5)
    return (z @ root.T) / np.sqrt(w / spec.df)[:, None]


def true_shape(spec: DistributionSpec, q: int) -> np.ndarray:
    """Shape matrix H the symmetrized estimators target.

    Differences of iid exponential or Gaussian components are exchangeable and sign-symmetric,
    so H is the identity; for an elliptical t it is shape(scatter).
    """
    if spec.kind == DistributionKind.ELLIPTICAL_T:
        return shape_normalize(spec.scatter_matrix(q))
    return np.eye(q)


def sampler(spec: DistributionSpec, q: int) -> Sampler:
    """Sampler (rng, n) -> (n, q) data for the U-statistic oracles."""
    spec.validate(q)

    def draw(rng: np.random.Generator, n: int) -> np.ndarray:
        return generate_data(spec, n, q, rng)

    return draw
