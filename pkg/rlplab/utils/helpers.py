"""
Utility functions and helpers
Common numeric helpers used across the application
"""

import logging
import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def is_power_of_two(n: int) -> bool:
    """
    Check whether n is a positive power of two

    Args:
        n: Integer to check

    Returns:
        bool: True if n = 2^k for some k >= 0
    """
    return isinstance(n, (int, np.integer)) and n > 0 and (int(n) & (int(n) - 1)) == 0


def log2_exact(n: int) -> int:
    """Exponent of a power of two"""
    return int(n).bit_length() - 1


def grid_shift(grid_id: int, scale: int) -> int:
    """Lattice offset of shifted grid j at scale k: round(j * 2^k / 3)"""
    return int(round(grid_id * (1 << scale) / 3.0))


def periodic_distance(x, start: int, length: int, n: int):
    """
    Periodic distance in samples from x to the block [start, start + length)

    Args:
        x: Sample index or array of indices
        start: First sample of the block
        length: Number of samples in the block
        n: Period

    Returns:
        Distance, zero inside the block
    """
    x = np.asarray(x)
    if length >= n:
        return np.zeros_like(x)
    offset = (x - start) % n
    inside = offset < length
    right = offset - (length - 1)
    left = n - offset
    return np.where(inside, 0, np.minimum(left, right))


def point_distance(x, base: int, n: int):
    """Periodic distance between sample indices"""
    d = np.abs((np.asarray(x) - base) % n)
    return np.minimum(d, n - d)


def coverage_counts(pairs: Iterable[Tuple[int, int]], n: int) -> np.ndarray:
    """
    Covering multiplicity of half-open bin intervals

    Args:
        pairs: (a, b) bin intervals inside [0, n)
        n: Number of bins

    Returns:
        Integer array of length n
    """
    diff = np.zeros(n + 1, dtype=np.int64)
    for a, b in pairs:
        diff[a] += 1
        diff[b] -= 1
    return np.cumsum(diff[:-1])


def conjugate_exponent(p: float) -> float:
    """Hoelder conjugate p' with 1' = inf and inf' = 1"""
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1.0)


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator"""
    return np.random.default_rng(seed)


def trial_seeds(seed: int, count: int) -> List[int]:
    """Per-trial seeds seed + trial_index"""
    return [seed + i for i in range(count)]


def sweep_sizes(n: int, count: int = 4, minimum: int = 16) -> List[int]:
    """
    Grid sizes for a doubling sweep ending at n

    Args:
        n: Largest grid size
        count: Number of sizes requested
        minimum: Smallest admissible size

    Returns:
        Increasing list of powers of two
    """
    sizes = [n >> i for i in range(count)]
    return sorted(s for s in sizes if s >= minimum)


def dyadic_blocks(length: int) -> List[int]:
    """Split a length into decreasing powers of two (3 -> [2, 1])"""
    blocks = []
    remaining = int(length)
    while remaining > 0:
        size = 1 << (remaining.bit_length() - 1)
        blocks.append(size)
        remaining -= size
    return blocks


def parse_number_list(text: str) -> List[float]:
    """Parse '1,2.5,3' into floats"""
    return [float(item) for item in text.split(",") if item.strip()]


def loglog_points(xs: Sequence[float], ys: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Logarithms of strictly positive pairs"""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (x > 0) & (y > 0)
    return np.log(x[keep]), np.log(y[keep])
