"""Pairwise-difference designs: complete, balanced (circulant) and randomized-cycle schemes.

Indices are 0-based throughout the Python API. Pair streams are produced in a frozen order,
i-major then j, so that every consumer sees the same sequence for a given scheme and seed.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from symscatter.constants import SchemeKind
from symscatter.errors import DimensionMismatchError, SchemeError

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Returns a PCG64 generator; integers and seed sequences are seeded, generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_dataset(rows: np.ndarray) -> np.ndarray:
    """Validates observations X_1..X_n as an (n, q) float array with n >= 2 and finite entries.

    Args:
        rows (np.ndarray): observations, one per row. A 1d array is read as q = 1.

    Raises:
        DimensionMismatchError: if rows is not one- or two-dimensional
        ValueError: if there are fewer than 2 rows or non-finite values

    Returns:
        np.ndarray: (n, q) float array
    """
    data = np.array(rows, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2 or data.shape[1] == 0:
        raise DimensionMismatchError(f"Expected an (n, q) array, got shape {data.shape}.")
    if data.shape[0] < 2:
        raise ValueError(f"A dataset needs at least 2 observations, got {data.shape[0]}.")
    if not np.all(np.isfinite(data)):
        raise ValueError("Dataset has non-finite values.")
    return data


def max_balanced_d(n: int) -> int:
    """Largest admissible d for the balanced scheme, floor((n - 1) / 2)."""
    return (n - 1) // 2


def complete_pairs(n: int) -> Iterator[Tuple[int, int]]:
    """Yields all n(n-1)/2 pairs (i, j) with i < j.

    Raises:
        SchemeError: if n < 2
    """
    if n < 2:
        raise SchemeError(f"The complete scheme needs n >= 2, got n={n}.")
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def balanced_pairs(n: int, d: int) -> Iterator[Tuple[int, int]]:
    """Yields the nd circulant pairs (i, (i + j) mod n) for i = 0..n-1, j = 1..d.

    Raises:
        SchemeError: if d is outside 1..floor((n-1)/2)
    """
    if d < 1 or d > max_balanced_d(n):
        raise SchemeError(
            f"The balanced scheme needs 1 <= d <= {max_balanced_d(n)} for n={n}, got d={d}."
        )
    for i in range(n):
        for j in range(1, d + 1):
            yield i, (i + j) % n


def as_permutation(images: np.ndarray) -> np.ndarray:
    """Validates a permutation of {0..n-1} given by its images.

    Raises:
        ValueError: if images is not a bijection on {0..n-1}
    """
    images = np.asarray(images)
    if images.ndim != 1 or not np.array_equal(np.sort(images), np.arange(images.size)):
        raise ValueError("Images do not form a permutation of 0..n-1.")
    return images.astype(np.int64)


def sample_permutation(n: int, rng: SeedLike = None) -> np.ndarray:
    """Draws a uniform permutation of {0..n-1} with the generator's Fisher-Yates shuffle."""
    return make_rng(rng).permutation(n)


def cycle_pairs(p: np.ndarray) -> Iterator[Tuple[int, int]]:
    """Yields the n pairs (p(i), p(i+1)) along the cycle of p, with p(n) := p(0).

    Raises:
        SchemeError: if n < 3, where the pairs would repeat
    """
    p = as_permutation(p)
    n = p.size
    if n < 3:
        raise SchemeError(f"Cycle pairs need n >= 3, got n={n}.")
    for i in range(n):
        yield int(p[i]), int(p[(i + 1) % n])


def cut_points(p: np.ndarray) -> List[int]:
    """Positions i where p(i) is the smallest value not used by p(0..i-1).

    The last position is always a cut point.
    """
    p = as_permutation(p)
    seen = np.zeros(p.size, dtype=bool)
    smallest = 0
    cuts = []
    for i, value in enumerate(p):
        if value == smallest:
            cuts.append(i)
        seen[value] = True
        while smallest < p.size and seen[smallest]:
            smallest += 1
    return cuts


def harmonic_cut_expectation(n: int) -> float:
    """Expected number of cut points of a uniform permutation, sum_i 1 / (n + 1 - i)."""
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def _cycle_to_images(cycle: np.ndarray, images: np.ndarray) -> None:
    images[cycle] = np.roll(cycle, -1)


def couple_permutation(p: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Couples p with a permutation sigma and a single cycle sigma_star.

    sigma is the product of the cycles (p(0)..p(t_1)), (p(t_1 + 1)..p(t_2)), ... cut at the
    record minima of p; sigma_star is the single cycle (p(0), ..., p(n-1)). The map p -> sigma
    is a bijection, and the two permutations disagree exactly at the values p(t) of the cut
    points t when there are at least two of them.

    Args:
        p (np.ndarray): permutation images

    Returns:
        tuple: (sigma, sigma_star) as image arrays
    """
    p = as_permutation(p)
    sigma = np.empty_like(p)
    start = 0
    for cut in cut_points(p):
        _cycle_to_images(p[start : cut + 1], sigma)
        start = cut + 1
    sigma_star = np.empty_like(p)
    _cycle_to_images(p, sigma_star)
    return sigma, sigma_star


def complete_pair_index(n: int, i, j):
    """Position of the pair (i, j), i < j, in the complete-pair order.

    Accepts integers or equally shaped index arrays; arrays give an array of positions.
    """
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    if np.any((i < 0) | (i >= j) | (j >= n)):
        raise ValueError(f"Expected 0 <= i < j < n, got i={i}, j={j}, n={n}.")
    index = i * (2 * n - i - 1) // 2 + (j - i - 1)
    return int(index) if index.ndim == 0 else index


@dataclass(frozen=True)
class PairScheme:
    """A pairing design: Complete, Balanced(d) or RandomizedCycles(d, seed).

    Attributes:
        kind: which family the design belongs to
        d: number of circulant offsets (balanced) or of random cycles (randomized)
        seed: seed of the permutation stream for randomized cycles
    """

    kind: SchemeKind
    d: Optional[int] = None
    seed: Optional[int] = None

    @classmethod
    def complete(cls) -> "PairScheme":
        return cls(kind=SchemeKind.COMPLETE)

    @classmethod
    def balanced(cls, d: int) -> "PairScheme":
        return cls(kind=SchemeKind.BALANCED, d=int(d))

    @classmethod
    def randomized(cls, d: int, seed: int) -> "PairScheme":
        return cls(kind=SchemeKind.RANDOMIZED, d=int(d), seed=int(seed))

    @property
    def label(self) -> str:
        return self.kind.value

    def validate(self, n: int) -> None:
        """Checks that the scheme can be used with n observations.

        Raises:
            SchemeError: if the scheme is not admissible for n
        """
        if self.kind == SchemeKind.COMPLETE:
            if n < 2:
                raise SchemeError(f"The complete scheme needs n >= 2, got n={n}.")
            return
        if self.d is None or self.d < 1:
            raise SchemeError(f"The {self.label} scheme needs d >= 1, got d={self.d}.")
        if self.kind == SchemeKind.BALANCED and self.d > max_balanced_d(n):
            raise SchemeError(
                f"The balanced scheme needs 1 <= d <= {max_balanced_d(n)} for n={n}, got d={self.d}."
            )
        if self.kind == SchemeKind.RANDOMIZED:
            if n < 3:
                raise SchemeError(f"The randomized scheme needs n >= 3, got n={n}.")
            if self.seed is None:
                raise SchemeError("The randomized scheme needs a seed.")

    def cycles(self, n: int) -> List[np.ndarray]:
        """The d permutations behind a randomized scheme, drawn from one seeded stream."""
        if self.kind != SchemeKind.RANDOMIZED:
            raise SchemeError(f"The {self.label} scheme has no permutation cycles.")
        self.validate(n)
        rng = make_rng(self.seed)
        return [sample_permutation(n, rng) for _ in range(self.d)]

    def pairs(self, n: int) -> np.ndarray:
        """Materializes the scheme's pair stream as an (m, 2) integer array in stream order."""
        self.validate(n)
        if self.kind == SchemeKind.COMPLETE:
            rows, cols = np.triu_indices(n, k=1)
            return np.column_stack([rows, cols])
        if self.kind == SchemeKind.BALANCED:
            first = np.repeat(np.arange(n), self.d)
            offsets = np.tile(np.arange(1, self.d + 1), n)
            return np.column_stack([first, (first + offsets) % n])
        blocks = [np.column_stack([p, np.roll(p, -1)]) for p in self.cycles(n)]
        return np.concatenate(blocks)

    def pair_count(self, n: int) -> int:
        self.validate(n)
        if self.kind == SchemeKind.COMPLETE:
            return n * (n - 1) // 2
        return n * self.d


def pair_differences(data: np.ndarray, scheme: PairScheme) -> np.ndarray:
    """Differences X_j - X_i for every pair (i, j) the scheme emits, one per row.

    Args:
        data (np.ndarray): (n, q) observations
        scheme (PairScheme): pairing design valid for n

    Raises:
        SchemeError: if the scheme is not admissible for n

    Returns:
        np.ndarray: (m, q) array of differences
    """
    data = as_dataset(data)
    pairs = scheme.pairs(data.shape[0])
    logger.debug(
        "Built %s pair differences for the %s scheme", pairs.shape[0], scheme.label
    )
    return data[pairs[:, 1]] - data[pairs[:, 0]]


def randomized_cycle_pairs(n: int, d: int, seed: SeedLike) -> np.ndarray:
    """Pairs of d independent random cycles; block l holds the n pairs of the l-th permutation."""
    return PairScheme.randomized(d, seed).pairs(n)
