"""Exact stopping-set counting and a BEC peeling decoder.

A column set I is a stopping set of H when no row of H restricted to I has
weight one. The counter walks column subsets in ascending index order and
keeps, as row bitmasks, which rows meet the current subset exactly once
(``R1``) and at least twice (``R2``). Adding column c with row mask ``col``:

    R1' = (R1 ^ col) & ~R2
    R2' = R2 | (R1 & col)

A branch is cut when a row in R1 has no support among the columns still
available, or when R1 has more rows than the remaining picks can cover.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

import numba
import numpy as np


@dataclass(frozen=True)
class StoppingSetReport:
    matrix_id: str
    counts: tuple[int, ...]  # counts[s - 1] = |S_s|
    sigma_max: int
    elapsed: float
    valid: bool = True

    def __getitem__(self, sigma: int) -> int:
        if not 1 <= sigma <= self.sigma_max:
            raise KeyError(sigma)
        return self.counts[sigma - 1]

    def as_csv(self) -> str:
        lines = ["sigma,count"] + [f"{s},{c}" for s, c in enumerate(self.counts, 1)]
        return "\n".join(lines) + "\n"


def column_masks(H) -> np.ndarray:
    """Row-support bitmask of every column: shape (n, W) uint64."""
    H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
    m, n = H.shape
    W = max(1, (m + 63) // 64)
    masks = np.zeros((n, W), dtype=np.uint64)
    for r, c in zip(*np.nonzero(H)):
        masks[c, r // 64] |= np.uint64(1) << np.uint64(r % 64)
    return masks


def _reach_masks(masks: np.ndarray) -> np.ndarray:
    """reach[j] = union of row masks of columns j..n-1 (reach[n] = 0)."""
    n, W = masks.shape
    reach = np.zeros((n + 1, W), dtype=np.uint64)
    for j in range(n - 1, -1, -1):
        reach[j] = reach[j + 1] | masks[j]
    return reach


@numba.njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True)
def _count_root(masks, reach, wmax, sigma_max, root, counts):
    """Count stopping sets whose smallest column is ``root``.

    counts[s - 1] is incremented for each stopping set of size s.
    Returns the number of DFS nodes visited.
    """
    n, W = masks.shape
    R1 = np.zeros((sigma_max + 1, W), dtype=np.uint64)
    R2 = np.zeros((sigma_max + 1, W), dtype=np.uint64)
    cols = np.zeros(sigma_max + 1, dtype=np.int64)
    nodes = 0

    # depth 1: the root column alone
    zero_r1 = True
    for w in range(W):
        R1[1, w] = masks[root, w]
        R2[1, w] = np.uint64(0)
        if R1[1, w] != 0:
            zero_r1 = False
    if zero_r1:
        counts[0] += 1
    cols[1] = root
    nodes += 1
    if sigma_max == 1:
        return nodes

    depth = 1
    cols[2] = root  # next candidate at depth 2 starts at cols[2] + 1
    while depth >= 1:
        c = cols[depth + 1] + 1
        if c >= n:
            depth -= 1
            continue
        cols[depth + 1] = c
        nd = depth + 1
        r1_pop = 0
        r1_zero = True
        unreachable = False
        for w in range(W):
            col = masks[c, w]
            a = (R1[depth, w] ^ col) & ~R2[depth, w]
            R1[nd, w] = a
            R2[nd, w] = R2[depth, w] | (R1[depth, w] & col)
            if a != 0:
                r1_zero = False
                r1_pop += _popcount(a)
                if a & ~reach[c + 1, w]:
                    unreachable = True
        nodes += 1
        if r1_zero:
            counts[nd - 1] += 1
        if nd == sigma_max:
            continue  # try the next sibling at this depth
        remaining = sigma_max - nd
        if (not r1_zero) and (unreachable or r1_pop > remaining * wmax):
            continue
        depth = nd
        cols[depth + 1] = c
    return nodes


def count_stopping_sets(H, sigma_max: int, matrix_id: str = "", timeout: float | None = None,
                        ) -> StoppingSetReport:
    """Exact |S_s(H)| for s = 1..sigma_max.

    If ``timeout`` (seconds) runs out, the partial counts are returned with
    ``valid=False``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
    m, n = H.shape
    if not 1 <= sigma_max <= n:
        raise ValueError(f"sigma_max must lie in 1..{n}")
    masks = column_masks(H)
    reach = _reach_masks(masks)
    wmax = int(H.sum(axis=0).max()) if H.size else 0
    counts = np.zeros(sigma_max, dtype=np.int64)
    t0 = time.perf_counter()
    valid = True
    for root in range(n):
        _count_root(masks, reach, wmax, sigma_max, root, counts)
        if timeout is not None and time.perf_counter() - t0 > timeout and root < n - 1:
            valid = False
            break
    return StoppingSetReport(matrix_id, tuple(int(c) for c in counts), sigma_max,
                             time.perf_counter() - t0, valid)


def is_stopping_set(H, cols) -> bool:
    cols = sorted(cols)
    if not cols:
        return True
    sub = np.asarray(H, dtype=np.int64)[:, cols]
    return not np.any(sub.sum(axis=1) == 1)


def brute_force_counts(H, sigma_max: int) -> list[int]:
    """All-subsets reference counter (small n only)."""
    H = np.atleast_2d(np.asarray(H, dtype=np.int64))
    n = H.shape[1]
    return [sum(1 for I in combinations(range(n), s) if not np.any(H[:, I].sum(axis=1) == 1))
            for s in range(1, sigma_max + 1)]


def iter_stopping_sets(H, sigma: int):
    """Yield every stopping set of size exactly ``sigma`` (ascending tuples)."""
    H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
    n = H.shape[1]
    colmask = [int("".join(map(str, H[:, c][::-1])), 2) if H.shape[0] else 0 for c in range(n)]
    reach = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        reach[j] = reach[j + 1] | colmask[j]

    def walk(start, chosen, r1, r2):
        if len(chosen) == sigma:
            if r1 == 0:
                yield tuple(chosen)
            return
        for c in range(start, n):
            col = colmask[c]
            a = (r1 ^ col) & ~r2
            if a & ~reach[c + 1] and len(chosen) + 1 < sigma:
                continue
            chosen.append(c)
            yield from walk(c + 1, chosen, a, r2 | (r1 & col))
            chosen.pop()

    yield from walk(0, [], 0, 0)


def bec_peel(H, erased) -> set[int]:
    """Iterative erasure decoding; returns the positions left unresolved.

    The residual is the largest stopping set contained in ``erased``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
    n = H.shape[1]
    unknown = set(int(e) for e in erased)
    if any(e < 0 or e >= n for e in unknown):
        raise IndexError("erased position out of range")
    supports = [set(np.nonzero(row)[0].tolist()) for row in H]
    progress = True
    while progress and unknown:
        progress = False
        for sup in supports:
            hit = sup & unknown
            if len(hit) == 1:
                unknown -= hit
                progress = True
    return unknown
