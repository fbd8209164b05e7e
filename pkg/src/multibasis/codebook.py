"""The four codes studied here, their duals, and exhaustive weight enumeration.

Polynomials over GF(2) are Python ints with the coefficient of x^i at bit i.
Codeword position i corresponds to x^i, so a cyclic right shift of a word is
multiplication by x modulo x^n - 1.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gf2

PRIMITIVE_POLYS = {5: 0b100101, 7: 0b10001001}  # x^5+x^2+1, x^7+x^3+1
MAX_ENUM_DIM = 24


class InfeasibleError(RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


@dataclass(frozen=True, eq=False)
class CodeSpec:
    name: str
    n: int
    k: int
    d: int | None
    generator: np.ndarray
    parity_check: np.ndarray
    poly: int | None = None  # generator polynomial of the cyclic part
    extended: bool = False
    notes: str = ""

    @property
    def cyclic_length(self) -> int:
        return self.n - 1 if self.extended else self.n

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __repr__(self) -> str:
        kind = "extended cyclic" if self.extended else "cyclic"
        return f"CodeSpec({self.name!r}, [{self.n},{self.k},{self.d}], {kind})"


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    counts: np.ndarray  # counts[i] = A_i

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    def __getitem__(self, i: int) -> int:
        return int(self.counts[i])

    def nonzero(self) -> dict[int, int]:
        return {i: int(a) for i, a in enumerate(self.counts) if a}

    @property
    def min_distance(self) -> int | None:
        nz = [i for i, a in enumerate(self.counts) if a and i > 0]
        return nz[0] if nz else None


# -- GF(2)[x] --------------------------------------------------------------


def pdeg(a: int) -> int:
    return a.bit_length() - 1


def pmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def pdivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = pdeg(b)
    while a and pdeg(a) >= db:
        s = pdeg(a) - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pdivmod(a, b)[1]
    return a


def reciprocal(p: int) -> int:
    d = pdeg(p)
    return int(format(p, f"0{d + 1}b")[::-1], 2)


def poly_to_bits(p: int, n: int) -> np.ndarray:
    return np.array([(p >> i) & 1 for i in range(n)], dtype=np.uint8)


def bits_to_poly(v) -> int:
    return sum(1 << i for i, b in enumerate(np.asarray(v)) if b)


# -- GF(2^m) ---------------------------------------------------------------


class _GF2m:
    """Exp/log tables for GF(2^m) with a fixed primitive polynomial."""

    def __init__(self, m: int):
        self.m = m
        self.order = (1 << m) - 1
        prim = PRIMITIVE_POLYS[m]
        self.exp = [0] * (2 * self.order)
        self.log = [0] * (self.order + 1)
        x = 1
        for i in range(self.order):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> m:
                x ^= prim
        for i in range(self.order, 2 * self.order):
            self.exp[i] = self.exp[i - self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def minimal_poly(self, i: int) -> int:
        """Minimal polynomial over GF(2) of alpha^i, as a GF(2)[x] int."""
        coset = cyclotomic_coset(i, self.order)
        poly = [1]  # coefficients in GF(2^m), lowest degree first
        for j in coset:
            root = self.exp[j % self.order]
            nxt = [0] * (len(poly) + 1)
            for t, c in enumerate(poly):
                nxt[t + 1] ^= c
                nxt[t] ^= self.mul(c, root)
            poly = nxt
        if any(c not in (0, 1) for c in poly):
            raise ArithmeticError("minimal polynomial has coefficients outside GF(2)")
        return sum(c << t for t, c in enumerate(poly))


def cyclotomic_coset(i: int, n: int) -> list[int]:
    out, j = [], i % n
    while j not in out:
        out.append(j)
        j = (2 * j) % n
    return out


def bch_generator(m: int, designed_distance: int) -> int:
    field_ = _GF2m(m)
    g, seen = 1, set()
    for i in range(1, designed_distance):
        rep = min(cyclotomic_coset(i, field_.order))
        if rep in seen:
            continue
        seen.add(rep)
        g = pmul(g, field_.minimal_poly(i))
    return g


def quadratic_residues(p: int) -> list[int]:
    return sorted({(x * x) % p for x in range(1, p)})


def qr_generator(p: int) -> int:
    """Generator polynomial of a binary QR code of prime length p = 8m +- 1.

    The idempotent sum_{r in QR} x^r generates one of the two QR codes;
    its gcd with x^p - 1 is the generator polynomial.
    """
    if p % 8 not in (1, 7):
        raise ValueError("binary QR codes need p = +-1 mod 8")
    idem = sum(1 << r for r in quadratic_residues(p))
    g = pgcd((1 << p) | 1, idem)
    if pdeg(g) != (p - 1) // 2:
        # the other idempotent (with constant term) for p = 8m + 1
        g = pgcd((1 << p) | 1, idem | 1)
    return g


# -- matrices --------------------------------------------------------------


def cyclic_generator_matrix(g: int, n: int) -> np.ndarray:
    k = n - pdeg(g)
    base = poly_to_bits(g, n)
    return np.array([np.roll(base, i) for i in range(k)], dtype=np.uint8)


def cyclic_parity_matrix(g: int, n: int) -> tuple[np.ndarray, int]:
    """Parity-check matrix (shifts of the reciprocal check polynomial)."""
    h, rem = pdivmod((1 << n) | 1, g)
    if rem:
        raise ValueError("generator polynomial does not divide x^n - 1")
    hstar = reciprocal(h)
    return cyclic_generator_matrix(hstar, n), hstar


def _extend(G: np.ndarray) -> np.ndarray:
    parity = G.sum(axis=1, dtype=np.int64) % 2
    return np.hstack([G, parity[:, None].astype(np.uint8)])


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def cyclic_code(name: str, g: int, n: int, d: int | None = None, extended: bool = False,
                notes: str = "") -> CodeSpec:
    G = cyclic_generator_matrix(g, n)
    Hc, _ = cyclic_parity_matrix(g, n)
    if extended:
        G = _extend(G)
        H = np.vstack([np.hstack([Hc, np.zeros((Hc.shape[0], 1), np.uint8)]),
                       np.ones((1, n + 1), np.uint8)])
        n_total = n + 1
    else:
        H = Hc
        n_total = n
    _freeze(G, H)
    return CodeSpec(name, n_total, G.shape[0], d, G, H, poly=g, extended=extended, notes=notes)


CODE_NAMES = ("golay24", "bch31", "qr47", "bch127")

# x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1
GOLAY_POLY = 0b110001110101


@functools.lru_cache(maxsize=None)
def build_code(name: str) -> CodeSpec:
    """Construct one of ``golay24``, ``bch31``, ``qr47``, ``bch127``."""
    if name == "golay24":
        code = cyclic_code("golay24", GOLAY_POLY, 23, d=8, extended=True)
    elif name == "bch31":
        code = cyclic_code("bch31", bch_generator(5, 7), 31, d=7)
    elif name == "qr47":
        code = cyclic_code("qr47", qr_generator(47), 47, d=11)
    elif name == "bch127":
        code = cyclic_code("bch127", bch_generator(7, 21), 127, d=21,
                           notes="d declared (BCH bound is tight); not enumerated")
    else:
        raise ValueError(f"unknown code {name!r}; choose from {CODE_NAMES}")
    if gf2.rank(code.generator) != code.k:
        raise ArithmeticError(f"{name}: generator rank != k")
    if gf2.syndrome(code.parity_check, code.generator).any():
        raise ArithmeticError(f"{name}: G H^T != 0")
    if code.n <= 47:
        found = weight_distribution(code).min_distance
        if found != code.d:
            raise ArithmeticError(f"{name}: enumerated d={found}, expected {code.d}")
    return code


@functools.lru_cache(maxsize=None)
def dual(code: CodeSpec) -> CodeSpec:
    """Dual code: generator and parity-check roles swapped.

    For cyclic codes the dual generator polynomial is the reciprocal check
    polynomial, and ``parity_check`` already consists of its shifts.
    """
    G = code.parity_check
    if code.extended:
        # row space only; drop dependent rows so the generator has full rank
        G, _ = gf2.row_reduce(G)
    G = np.array(G, dtype=np.uint8)
    H = np.array(code.generator, dtype=np.uint8)
    _freeze(G, H)
    poly = None
    if code.poly is not None:
        poly = cyclic_parity_matrix(code.poly, code.cyclic_length)[1]
    d = None
    if G.shape[0] <= MAX_ENUM_DIM and code.n <= 64:
        d = WeightDistribution(_weight_counts(G, code.n)).min_distance
    elif code.name == "bch127":
        d = 22  # upper bound from low-weight search, not verified exhaustively
    return CodeSpec(f"dual({code.name})", code.n, G.shape[0], d, G, H, poly=poly,
                    extended=code.extended)


# -- enumeration -----------------------------------------------------------


def _check_feasible(code: CodeSpec, max_dim: int) -> None:
    if code.k > max_dim or code.n > 64:
        raise InfeasibleError(
            f"{code.name}: 2^{code.k} codewords of length {code.n} exceed the enumeration budget")


def _weight_counts(G: np.ndarray, n: int) -> np.ndarray:
    words = gf2.span_u64(G)
    return np.bincount(np.bitwise_count(words), minlength=n + 1).astype(np.int64)


def all_codewords_u64(code: CodeSpec, max_dim: int = MAX_ENUM_DIM) -> np.ndarray:
    _check_feasible(code, max_dim)
    return gf2.span_u64(code.generator)


def weight_distribution(code: CodeSpec, max_dim: int = MAX_ENUM_DIM) -> WeightDistribution:
    _check_feasible(code, max_dim)
    counts = _weight_counts(code.generator, code.n)
    counts.setflags(write=False)
    return WeightDistribution(counts)


def min_weight_codewords(code: CodeSpec, w: int, max_dim: int = MAX_ENUM_DIM) -> np.ndarray:
    """All codewords of weight exactly ``w``, lexicographically sorted rows."""
    _check_feasible(code, max_dim)
    words = gf2.span_u64(code.generator)
    sel = np.sort(words[np.bitwise_count(words) == w])
    out = gf2.unpack_rows_u64(sel, code.n)
    out.setflags(write=False)
    return out


def search_low_weight(code: CodeSpec, w: int, trials: int, rng: np.random.Generator,
                      p: int = 2) -> np.ndarray:
    """Randomised information-set (Lee-Brickell) search for weight-w codewords.

    Non-exhaustive: returns whatever distinct words were found, sorted.
    """
    from itertools import combinations

    G = np.asarray(code.generator, dtype=np.uint8)
    k, n = G.shape
    found: set[int] = set()
    for _ in range(trials):
        perm = rng.permutation(n)
        R, pivots = gf2.row_reduce(G[:, perm])
        if len(pivots) < k:
            continue
        rows = gf2.pack_rows(R)
        for t in range(1, p + 1):
            for combo in combinations(range(k), t):
                x = 0
                for i in combo:
                    x ^= rows[i]
                if x.bit_count() == w:
                    v = gf2.unpack_rows([x], n)[0]
                    word = np.empty(n, dtype=np.uint8)
                    word[perm] = v
                    found.add(gf2.pack_rows(word[None, :])[0])
    return gf2.unpack_rows(sorted(found), n)


# -- cog/codeword list files -----------------------------------------------


def read_word_list(path: str | Path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no words")
    n = len(lines[0])
    if any(len(ln) != n or set(ln) - {"0", "1"} for ln in lines):
        raise ValueError(f"{path}: every line must be {n} characters of 0/1")
    return gf2.as_bits([[int(ch) for ch in ln] for ln in lines], ndim=2)


def write_word_list(path: str | Path, words, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [gf2.to_string(w) for w in words]
    Path(path).write_text("\n".join(lines) + "\n")


DATA_DIR = Path(__file__).parent / "data"


def bundled_cogs(name: str) -> np.ndarray:
    return read_word_list(DATA_DIR / f"{name}_cogs.txt")
