"""Dense binary linear algebra over GF(2).

Matrices and vectors are plain ``numpy.uint8`` arrays holding 0/1 entries.
Rank and row reduction pack each row into a Python integer and eliminate
with XOR, which is fast enough for the matrix sizes used here (n <= 127).

Text formats
------------
matrix : first line ``"m n"``, then m lines of n characters from ``{0,1}``
vector : a single line of n characters
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

BinaryVector = np.ndarray
BinaryMatrix = np.ndarray


def as_bits(x, ndim: int | None = None) -> np.ndarray:
    """Return a read-only uint8 copy of ``x`` reduced mod 2."""
    if isinstance(x, str):
        x = [int(ch) for ch in x.strip()]
    arr = np.array(x, dtype=np.int64) % 2
    arr = arr.astype(np.uint8)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def to_string(v: BinaryVector) -> str:
    return "".join("1" if b else "0" for b in np.asarray(v).ravel())


def weight(v: BinaryVector) -> int:
    return int(np.count_nonzero(v))


# -- packing ---------------------------------------------------------------


def pack_rows(M: BinaryMatrix) -> list[int]:
    """Pack each row into an int with column 0 as the most significant bit.

    With this convention integer order equals lexicographic order of the
    printed bit strings.
    """
    M = np.atleast_2d(np.asarray(M, dtype=np.uint8))
    n = M.shape[1]
    if n == 0:
        return [0] * M.shape[0]
    pad = (-n) % 8
    packed = np.packbits(M, axis=1)
    return [int.from_bytes(row.tobytes(), "big") >> pad for row in packed]


def unpack_rows(values: Sequence[int], n: int) -> np.ndarray:
    out = np.zeros((len(values), n), dtype=np.uint8)
    for r, v in enumerate(values):
        for i in range(n):
            if (v >> (n - 1 - i)) & 1:
                out[r, i] = 1
    return out


def pack_rows_u64(M: BinaryMatrix) -> np.ndarray:
    """Vectorised packing to uint64 (n <= 64), column 0 as the top bit of n."""
    M = np.atleast_2d(np.asarray(M, dtype=np.uint64))
    n = M.shape[1]
    if n > 64:
        raise ValueError("pack_rows_u64 needs n <= 64")
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return np.bitwise_or.reduce(M << shifts, axis=1) if n else np.zeros(M.shape[0], np.uint64)


def unpack_rows_u64(values: np.ndarray, n: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    return ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)


# -- elimination -----------------------------------------------------------


def rank(M: BinaryMatrix) -> int:
    """GF(2) row rank of ``M``; the input is not modified."""
    rows = pack_rows(M)
    r = 0
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        r += 1
        low = pivot & -pivot
        rows = [x ^ pivot if x & low else x for x in rows]
    return r


def row_reduce(M: BinaryMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    A = np.array(M, dtype=np.uint8) % 2
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        hits = np.nonzero(A[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def systematic_generator(G: BinaryMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Bring a full-rank generator matrix into the form ``[I_k | P]``.

    Returns ``(G_sys, perm)`` with ``G_sys = R[:, perm]`` where ``R`` is the
    reduced row echelon form of ``G``. ``perm[:k]`` are the codeword
    positions that carry the information bits.
    """
    G = np.atleast_2d(np.asarray(G, dtype=np.uint8))
    k, n = G.shape
    R, pivots = row_reduce(G)
    if len(pivots) != k:
        raise ValueError(f"generator is rank deficient: rank {len(pivots)} < {k}")
    rest = [c for c in range(n) if c not in set(pivots)]
    perm = np.array(pivots + rest, dtype=np.int64)
    G_sys = R[:, perm]
    G_sys.setflags(write=False)
    perm.setflags(write=False)
    return G_sys, perm


def encode_systematic(u: BinaryVector, G_sys: BinaryMatrix, perm: np.ndarray) -> np.ndarray:
    """Codeword (original coordinates) whose positions ``perm[:k]`` equal ``u``."""
    c_perm = (np.asarray(u, dtype=np.int64) @ np.asarray(G_sys, dtype=np.int64)) % 2
    c = np.empty_like(c_perm)
    c[perm] = c_perm
    return c.astype(np.uint8)


def nullspace(M: BinaryMatrix) -> np.ndarray:
    """Basis (as rows) of ``{x : M x^T = 0}``."""
    M = np.atleast_2d(np.asarray(M, dtype=np.uint8))
    n = M.shape[1]
    R, pivots = row_reduce(M)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = R[r, f]
    return basis


def restrict_columns(M: BinaryMatrix, cols: Iterable[int]) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=np.uint8))
    idx = sorted(set(int(c) for c in cols))
    n = M.shape[1]
    if any(c < 0 or c >= n for c in idx):
        raise IndexError(f"column index out of range for a matrix with {n} columns")
    return M[:, idx]


def syndrome(H: BinaryMatrix, c: BinaryVector) -> np.ndarray:
    H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
    c = np.asarray(c, dtype=np.uint8)
    if c.shape[-1] != H.shape[1]:
        raise ValueError(f"vector length {c.shape[-1]} != {H.shape[1]} columns")
    return ((H.astype(np.int64) @ c.astype(np.int64).T) % 2).astype(np.uint8).T


def same_row_space(A: BinaryMatrix, B: BinaryMatrix) -> bool:
    ra, rb = rank(A), rank(B)
    return ra == rb == rank(np.vstack([A, B]))


def span_u64(G: BinaryMatrix) -> np.ndarray:
    """All 2^k codewords spanned by the rows of G, packed as uint64 (n <= 64)."""
    rows = pack_rows_u64(G)
    words = np.zeros(1, dtype=np.uint64)
    for g in rows:
        words = np.concatenate([words, words ^ g])
    return words


# -- text I/O --------------------------------------------------------------


def format_matrix(M: BinaryMatrix) -> str:
    M = np.atleast_2d(M)
    lines = [f"{M.shape[0]} {M.shape[1]}"] + [to_string(r) for r in M]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix text")
    m, n = (int(t) for t in lines[0].split())
    body = lines[1:]
    if len(body) != m or any(len(ln) != n or set(ln) - {"0", "1"} for ln in body):
        raise ValueError(f"malformed matrix body: expected {m} lines of {n} bits")
    return as_bits([[int(ch) for ch in ln] for ln in body], ndim=2) if m else np.zeros((0, n), np.uint8)


def read_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def write_matrix(path: str | Path, M: BinaryMatrix) -> None:
    Path(path).write_text(format_matrix(M))


def parse_vector(text: str) -> np.ndarray:
    s = text.strip()
    if set(s) - {"0", "1"}:
        raise ValueError("vector text must contain only 0 and 1")
    return as_bits(s, ndim=1)
