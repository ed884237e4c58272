"""
Shifted grid verification
Checks on startup that the three lattice grids enclose every tripled interval
"""

import logging
from typing import Set

import numpy as np

from ..utils.helpers import grid_shift, is_power_of_two
from .exceptions import ComputationException, ValidationException

logger = logging.getLogger(__name__)

# Grid sizes already verified in this process
_verified: Set[int] = set()


def check_shifted_grids(n: int) -> int:
    """
    Exhaustively check containment and the 6x size bound for grid size n

    For every interval I with |3I| <= n, some interval of the three grids
    contains 3I and has length at most 6|3I|.

    Returns:
        int: Number of intervals checked

    Raises:
        ComputationException: If an interval has no admissible container
    """
    if not is_power_of_two(n):
        raise ValidationException(f"Grid size must be a power of two, got {n}")

    n_log2 = n.bit_length() - 1
    starts = np.arange(n)
    checked = 0
    for length in range(1, n // 3 + 1):
        tripled = 3 * length
        left = (starts - length) % n
        found = np.zeros(n, dtype=bool)
        k = max(0, int(np.ceil(np.log2(tripled))))
        while k <= n_log2 and not found.all():
            size = 1 << k
            if size > 6 * tripled and k < n_log2:
                break
            for grid_id in range(3):
                shift = grid_shift(grid_id, k)
                cell_start = ((left - shift) // size) * size + shift
                inside = (left - cell_start) % n + tripled <= size
                found |= inside & (size <= 6 * tripled)
            k += 1
        if not found.all():
            bad = int(np.flatnonzero(~found)[0])
            logger.error(f"No shifted container for start={bad} length={length} at n={n}")
            raise ComputationException(
                f"Shifted grids fail to enclose 3I for start={bad}, length={length}, n={n}"
            )
        checked += n
    return checked


def init_grids(n: int) -> bool:
    """
    Verify the shifted grids for n once per process

    Returns:
        bool: True when a verification ran, False when cached
    """
    if n in _verified:
        return False
    checked = check_shifted_grids(n)
    _verified.add(n)
    logger.debug(f"Shifted grids verified for n={n} ({checked} intervals)")
    return True


def verified_sizes() -> Set[int]:
    """Grid sizes verified so far"""
    return set(_verified)
