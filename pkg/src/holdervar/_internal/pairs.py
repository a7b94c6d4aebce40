"""Blocked supremum scans over ordered node pairs.

Every sup-type quantity in holdervar (Hölder seminorms, log-Hölder modulus,
measured constants) is a maximum of a quotient over ordered pairs (i, j). The
blocked scan evaluates row blocks in a thread pool and merges them with a
(value, lexicographic index) max-reduction, so the result and its witness do
not depend on the number of workers.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple, Optional

import numpy as np

# Entries per block matrix; keeps temporaries around 16 MB.
BLOCK_ENTRIES = 2_000_000


class PairMax(NamedTuple):
    value: float
    i: int
    j: int

    @property
    def found(self) -> bool:
        return self.i >= 0


EMPTY = PairMax(0.0, -1, -1)


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def _block_max(block: Callable[[int, int], np.ndarray], start: int, stop: int) -> PairMax:
    values = np.asarray(block(start, stop), dtype=float)
    if values.size == 0:
        return EMPTY
    values = np.where(np.isnan(values), -np.inf, values)
    flat = int(np.argmax(values))
    best = values.flat[flat]
    if not np.isfinite(best):
        return EMPTY
    i, j = np.unravel_index(flat, values.shape)
    return PairMax(float(best), start + int(i), int(j))


def merge(results: list[PairMax]) -> PairMax:
    """Merge block maxima given in increasing row order; ties keep the earliest pair."""
    best = EMPTY
    for result in results:
        if not result.found:
            continue
        if not best.found or result.value > best.value:
            best = result
    return best


def pair_max(
    n_rows: int,
    n_cols: int,
    block: Callable[[int, int], np.ndarray],
    workers: Optional[int] = None,
    block_rows: Optional[int] = None,
) -> PairMax:
    """
    Maximum of a pair quotient over rows [0, n_rows) and columns [0, n_cols).

    Args:
        n_rows: Number of first-argument nodes
        n_cols: Number of second-argument nodes
        block: Callable (start, stop) -> array of shape (stop - start, n_cols);
               NaN entries are skipped (e.g. identical nodes)
        workers: Thread count (defaults to min(4, cpu_count))
        block_rows: Rows per block (defaults to BLOCK_ENTRIES / n_cols)

    Returns:
        PairMax with the largest finite entry and the lexicographically smallest
        (i, j) attaining it; EMPTY when no finite entry exists
    """
    if n_rows == 0 or n_cols == 0:
        return EMPTY
    rows = block_rows or max(1, BLOCK_ENTRIES // max(n_cols, 1))
    starts = list(range(0, n_rows, rows))
    workers = workers or default_workers()

    if workers == 1 or len(starts) == 1:
        results = [_block_max(block, s, min(s + rows, n_rows)) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _block_max(block, s, min(s + rows, n_rows)), starts))
    return merge(results)


def pair_max_naive(n_rows: int, n_cols: int, entry: Callable[[int, int], float]) -> PairMax:
    """Exhaustive double loop over all ordered pairs; the reference oracle for pair_max."""
    best = EMPTY
    for i in range(n_rows):
        for j in range(n_cols):
            value = entry(i, j)
            if value is None or np.isnan(value):
                continue
            if not best.found or value > best.value:
                best = PairMax(float(value), i, j)
    return best
