"""Cyclic orbits of dual codewords, cog families, and cyclic-form matrices.

Permutations act on the cyclic part (positions ``0..n'-1``) only; for an
extended cyclic code the last coordinate is left where it is. A permutation
``pi`` of positions is applied to a vector by moving ``v[i]`` to ``pi(i)``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gf2
from .codebook import CodeSpec, dual, min_weight_codewords
from .stoppingsets import count_stopping_sets

# One representative per family of the extended Golay code, as printed in the
# original Golay study; indices follow that study's F1, F2, F3 numbering.
GOLAY_FAMILY_COGS = {
    1: "110101001100100000001000",
    2: "111000001001100000100001",
    3: "110100110000000101001000",
}

DEFAULT_SIGMA_MAX = {"golay24": 8, "bch31": 7, "qr47": 9, "bch127": 5}


@dataclass(frozen=True, eq=False)
class Cog:
    word: np.ndarray
    period: int

    @property
    def bits(self) -> str:
        return gf2.to_string(self.word)

    @property
    def weight(self) -> int:
        return gf2.weight(self.word)

    def __eq__(self, other):
        return isinstance(other, Cog) and self.bits == other.bits

    def __hash__(self):
        return hash(self.bits)

    def __repr__(self):
        return f"Cog({self.bits}, period={self.period})"


@dataclass(frozen=True)
class CogFamily:
    id: int
    members: tuple[Cog, ...]
    signature: tuple[int, ...]  # |S_1| .. |S_sigma_max|

    def __len__(self):
        return len(self.members)


# -- permutations ----------------------------------------------------------


def _split(v, cyclic_length):
    v = np.asarray(v, dtype=np.uint8)
    nc = v.shape[-1] if cyclic_length is None else cyclic_length
    return v, nc


def permute_positions(v, mapping) -> np.ndarray:
    """Move ``v[i]`` to ``mapping[i]`` for the first ``len(mapping)`` positions."""
    v = np.asarray(v, dtype=np.uint8)
    out = v.copy()
    nc = len(mapping)
    out[..., np.asarray(mapping)] = v[..., :nc]
    return out


def cyclic_shift(v, j: int = 1, cyclic_length: int | None = None) -> np.ndarray:
    """alpha^j: ``out[i] = v[(i - j) mod n']``; tail positions unchanged."""
    v, nc = _split(v, cyclic_length)
    out = v.copy()
    out[..., :nc] = np.roll(v[..., :nc], j, axis=-1)
    return out


def affine_map(q: int, w: int, n: int) -> np.ndarray:
    if math.gcd(q, n) != 1:
        raise ValueError(f"gcd({q}, {n}) != 1: i -> {q}i+{w} is not a permutation")
    return (q * np.arange(n) + w) % n


def affine_apply(v, q: int, w: int, cyclic_length: int | None = None) -> np.ndarray:
    """theta: position i -> q*i + w (mod n')."""
    v, nc = _split(v, cyclic_length)
    return permute_positions(v, affine_map(q, w, nc))


def doubling_map(v, cyclic_length: int | None = None) -> np.ndarray:
    """beta: position i -> 2i (mod n'); n' must be odd."""
    v, nc = _split(v, cyclic_length)
    if nc % 2 == 0:
        raise ValueError("i -> 2i is not a permutation for even length")
    return permute_positions(v, affine_map(2, 0, nc))


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError("a must be a unit mod n")
    k, x = 1, a % n
    while x != 1:
        x = (x * a) % n
        k += 1
    return k


def shift_for_commutation(q: int, j: int, n: int) -> int:
    """j' with theta(alpha^j v) = alpha^{j'}(theta v) for theta: i -> q i + w."""
    return (q * j) % n


# -- orbits ----------------------------------------------------------------


def _all_shifts(v, nc):
    return np.array([cyclic_shift(v, j, nc) for j in range(nc)])


def period(v, cyclic_length: int | None = None) -> int:
    v, nc = _split(v, cyclic_length)
    for j in range(1, nc + 1):
        if nc % j == 0 and np.array_equal(cyclic_shift(v, j, nc), v):
            return j
    return nc


def canonical(v, cyclic_length: int | None = None) -> np.ndarray:
    """Lexicographically smallest cyclic shift."""
    v, nc = _split(v, cyclic_length)
    shifts = _all_shifts(v, nc)
    packed = gf2.pack_rows(shifts)
    return shifts[int(np.argmin(np.array(packed, dtype=object)))]


def partition_orbits(words, cyclic_length: int | None = None) -> list[Cog]:
    """One cog (smallest shift) per full-period cyclic orbit, sorted."""
    words = np.atleast_2d(np.asarray(words, dtype=np.uint8))
    if words.shape[0] == 0:
        return []
    nc = words.shape[1] if cyclic_length is None else cyclic_length
    keys = gf2.pack_rows(words)
    remaining = set(keys)
    reps: list[Cog] = []
    short = 0
    for key, w in zip(keys, words):
        if key not in remaining:
            continue
        shifts = _all_shifts(w, nc)
        skeys = gf2.pack_rows(shifts)
        remaining.difference_update(skeys)
        p = len(set(skeys))
        if p < nc:
            short += 1
            continue
        best = int(np.argmin(np.array(skeys, dtype=object)))
        rep = shifts[best].copy()
        rep.setflags(write=False)
        reps.append(Cog(rep, p))
    if short:
        warnings.warn(f"{short} orbit(s) with period < {nc} excluded", stacklevel=2)
    reps.sort(key=lambda c: c.bits)
    return reps


def code_cogs(code: CodeSpec, weight: int | None = None) -> list[Cog]:
    """All minimum-weight cogs of ``code``'s dual (exhaustive enumeration)."""
    d = dual(code)
    w = d.d if weight is None else weight
    return partition_orbits(min_weight_codewords(d, w), code.cyclic_length)


def as_cog(word, code: CodeSpec) -> Cog:
    word = gf2.as_bits(word, ndim=1)
    if len(word) != code.n:
        raise ValueError(f"cog length {len(word)} != n = {code.n}")
    return Cog(word, period(word, code.cyclic_length))


# -- matrices --------------------------------------------------------------


class CogRejected(ValueError):
    pass


def build_parity_matrix(cog, code: CodeSpec, last_row=None) -> np.ndarray:
    """Square cyclic-form parity-check matrix generated by ``cog``.

    Cyclic codes: the n x n circulant of consecutive right shifts.
    Extended cyclic codes: the n-1 shifts of the cyclic part (extension bit
    copied) followed by ``last_row`` (default: the all-one word).
    """
    if not isinstance(cog, Cog):
        cog = as_cog(cog, code)
    nc = code.cyclic_length
    if cog.period != nc:
        raise CogRejected(f"cog period {cog.period} != {nc}")
    if gf2.syndrome(code.generator, cog.word).any():
        raise CogRejected("cog is not a codeword of the dual code")
    rows = [cyclic_shift(cog.word, j, nc) for j in range(nc)]
    if code.extended:
        extra = np.ones(code.n, np.uint8) if last_row is None else gf2.as_bits(last_row, ndim=1)
        if gf2.syndrome(code.generator, extra).any():
            raise CogRejected("last row is not a parity check of the code")
        rows.append(extra)
    H = np.array(rows, dtype=np.uint8)
    r = gf2.rank(H)
    if r != code.n - code.k:
        raise CogRejected(f"matrix rank {r} != n-k = {code.n - code.k}")
    H.setflags(write=False)
    return H


def signature(cog, code: CodeSpec, sigma_max: int) -> tuple[int, ...]:
    H = build_parity_matrix(cog, code)
    return count_stopping_sets(H, sigma_max).counts


def generate_family_members(seeds, code: CodeSpec, multipliers=None) -> list[Cog]:
    """Cogs reached from ``seeds`` by the doubling map (or given multipliers).

    Output keeps first-appearance order: seed, beta(seed), beta^2(seed), ...
    """
    single = isinstance(seeds, (Cog, str)) or (isinstance(seeds, np.ndarray) and seeds.ndim == 1)
    if single:
        seeds = [seeds]
    nc = code.cyclic_length
    if multipliers is None:
        multipliers = [pow(2, j, nc) for j in range(multiplicative_order(2, nc))]
    out: list[Cog] = []
    seen: set[str] = set()
    for s in seeds:
        s = s if isinstance(s, Cog) else as_cog(s, code)
        for q in multipliers:
            img = canonical(affine_apply(s.word, q, 0, nc), nc)
            img.setflags(write=False)
            c = Cog(img, s.period)
            if c.bits not in seen:
                seen.add(c.bits)
                out.append(c)
    return out


def classify_families(cogs, code: CodeSpec, sigma_max: int | None = None,
                      use_symmetry: bool = True) -> list[CogFamily]:
    """Group cogs by stopping-set signature; family 1 has the smallest signature.

    With ``use_symmetry`` the signature is computed once per doubling-map
    class (members of a class have equal counts) instead of once per cog.
    """
    if sigma_max is None:
        sigma_max = DEFAULT_SIGMA_MAX.get(code.name, code.d or 1)
    cogs = [c if isinstance(c, Cog) else as_cog(c, code) for c in cogs]
    sig_of: dict[str, tuple[int, ...]] = {}
    for c in cogs:
        if c.bits in sig_of:
            continue
        sig = signature(c, code, sigma_max)
        if use_symmetry:
            for m in generate_family_members(c, code):
                sig_of[m.bits] = sig
        sig_of[c.bits] = sig
    groups: dict[tuple[int, ...], list[Cog]] = {}
    for c in cogs:
        groups.setdefault(sig_of[c.bits], []).append(c)
    ordered = sorted(groups.items(), key=lambda kv: kv[0])
    return [CogFamily(i, tuple(sorted(members, key=lambda c: c.bits)), sig)
            for i, (sig, members) in enumerate(ordered, 1)]


def family_report(families: list[CogFamily]) -> str:
    if not families:
        return ""
    smax = len(families[0].signature)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family_id", "cog_bits"] + [f"S{s}" for s in range(1, smax + 1)])
    for fam in families:
        for c in fam.members:
            w.writerow([fam.id, c.bits, *fam.signature])
    return buf.getvalue()


def read_family_report(path: str | Path) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["family_id"]), []).append(row["cog_bits"])
    return out
