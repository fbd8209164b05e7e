"""Channels, reference decoders and the Monte Carlo campaign runner.

Reproducibility: frames are grouped into fixed-size blocks. Block ``b`` draws
all its randomness (unit Gaussian noise, tie-break uniforms, information
words) from a Philox stream keyed by ``(seed, b)``. The noise of a frame is
``sigma * Z`` with the same ``Z`` for every decoder and every SNR point, so
runs sharing a seed are paired. Blocks are merged in index order and the stop
rule is evaluated after each block, which makes results independent of the
number of workers.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from multiprocessing import get_context
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from . import gf2, orbits
from .bpcore import decode as bp_decode
from .codebook import (CODE_NAMES, DATA_DIR, CodeSpec, InfeasibleError, all_codewords_u64,
                       build_code, bundled_cogs)
from .mbbp import VARIANTS as MBBP_VARIANTS, MbbpConfig, MultiBasisDecoder

ERASED = -1
DECODERS = ("BP", "STACKED", "ML") + MBBP_VARIANTS
DEFAULT_L = {"golay24": 11, "bch31": 6, "qr47": 23, "bch127": 10}
CSV_HEADER = ("code,variant,l,snr_db,frames,frame_errors,bit_errors_info,bit_errors_code,"
              "ber_info,fer,ci_low,ci_high,avg_iter,max_iter,seed")


# -- channels --------------------------------------------------------------


@dataclass(frozen=True)
class ChannelModel:
    kind: str = "biawgn"  # biawgn | bec
    snr_db: float = 0.0
    rate: float = 0.5
    erasure_prob: float = 0.0

    def __post_init__(self):
        if self.kind not in ("biawgn", "bec"):
            raise ValueError("channel kind must be 'biawgn' or 'bec'")
        if not 0.0 <= self.erasure_prob <= 1.0:
            raise ValueError("erasure probability must lie in [0, 1]")
        if self.kind == "biawgn" and not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")

    @property
    def noise_variance(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0))


def bpsk(c) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def transmit(codeword, channel: ChannelModel, rng: np.random.Generator) -> np.ndarray:
    """BiAWGN: real samples. BEC: int8 symbols with ``ERASED`` marking erasures."""
    c = np.asarray(codeword, dtype=np.uint8)
    if channel.kind == "biawgn":
        return bpsk(c) + np.sqrt(channel.noise_variance) * rng.standard_normal(c.shape)
    out = c.astype(np.int8)
    out[rng.random(c.shape) < channel.erasure_prob] = ERASED
    return out


# -- reference decoders ----------------------------------------------------


@lru_cache(maxsize=None)
def _sorted_codebook(code: CodeSpec) -> tuple[np.ndarray, np.ndarray]:
    words = np.sort(all_codewords_u64(code))  # integer order == lexicographic order
    bits = gf2.unpack_rows_u64(words, code.n)
    return bits, bpsk(bits)


def ml_decode_batch(code: CodeSpec, Y) -> np.ndarray:
    """Exhaustive ML for each row of ``Y``; ties go to the lexicographically smallest word."""
    if code.k > 24:
        raise InfeasibleError(f"ML search over 2^{code.k} codewords")
    bits, signals = _sorted_codebook(code)
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    # min ||y - s||^2 <=> max <y, s>, since every ||s||^2 equals n
    out = np.empty((Y.shape[0], code.n), dtype=np.uint8)
    for start in range(0, Y.shape[0], 256):
        corr = Y[start:start + 256] @ signals.T
        out[start:start + 256] = bits[np.argmax(corr, axis=1)]
    return out


def ml_decode(code: CodeSpec, y) -> np.ndarray:
    return ml_decode_batch(code, np.asarray(y)[None, :])[0]


def stack_bases(bases) -> np.ndarray:
    """Vertical stack with duplicate rows removed (first occurrence kept)."""
    rows = np.vstack([gf2.as_bits(H, ndim=2) for H in bases])
    _, idx = np.unique(rows, axis=0, return_index=True)
    return rows[np.sort(idx)]


def stacked_matrix_decode(bases, y, noise_variance: float, max_iter: int = 100) -> np.ndarray:
    llr = 2.0 * np.asarray(y, dtype=np.float64) / noise_variance
    return bp_decode(stack_bases(bases), llr, max_iter=max_iter).hard_decision


# -- fixtures --------------------------------------------------------------


FAMILY_CACHE = {"qr47": "qr47_families.csv"}


@lru_cache(maxsize=None)
def family_cogs(code_name: str, family: int = 1) -> tuple[str, ...]:
    """Cog bit strings of a family (ascending-signature numbering)."""
    code = build_code(code_name)
    if code_name == "bch127":
        if family != 1:
            raise ValueError("only the bundled cog list (family 1) exists for bch127")
        return tuple(gf2.to_string(w) for w in bundled_cogs("bch127"))
    cache = FAMILY_CACHE.get(code_name)
    if cache is not None and (DATA_DIR / cache).exists():
        fams = orbits.read_family_report(DATA_DIR / cache)
    else:
        fams = {f.id: [c.bits for c in f.members]
                for f in orbits.classify_families(orbits.code_cogs(code), code)}
    if family not in fams:
        raise ValueError(f"{code_name} has no family {family}")
    return tuple(fams[family])


def family_bases(code_name: str, family: int = 1, l: int | None = None) -> list[np.ndarray]:
    code = build_code(code_name)
    cogs = family_cogs(code_name, family)
    l = DEFAULT_L.get(code_name, len(cogs)) if l is None else l
    if not 1 <= l <= len(cogs):
        raise ValueError(f"l={l} but family {family} of {code_name} has {len(cogs)} cogs")
    return [orbits.build_parity_matrix(c, code) for c in cogs[:l]]


# -- campaign --------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    code: str
    variant: tuple[str, ...] | str
    seed: int
    snr_grid_db: tuple[float, ...] = (4.0,)
    l: int | None = None
    family: int = 1
    max_frames: int = 1_000_000
    target_frame_errors: int = 200
    N: int = 100
    N_p: int = 10
    transmit_mode: str = "all_zero"  # all_zero | random_codewords
    reconcile: str = "clear"
    check_every_iteration: bool = False
    block_size: int = 500

    def __post_init__(self):
        v = (self.variant,) if isinstance(self.variant, str) else tuple(self.variant)
        object.__setattr__(self, "variant", v)
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.code not in CODE_NAMES:
            raise ValueError(f"unknown code {self.code!r}")
        bad = [x for x in v if x not in DECODERS]
        if bad or not v:
            raise ValueError(f"unknown decoder variant(s) {bad}; choose from {DECODERS}")
        if "ML" in v and build_code(self.code).k > 24:
            raise ValueError("ML decoding is infeasible for this code")
        if self.transmit_mode not in ("all_zero", "random_codewords"):
            raise ValueError("transmit_mode must be 'all_zero' or 'random_codewords'")
        if self.max_frames < 1 or self.target_frame_errors < 1 or self.block_size < 1:
            raise ValueError("frame limits and block size must be positive")
        if self.N < 1 or not 1 <= self.N_p <= self.N:
            raise ValueError("need 1 <= N_p <= N")
        if self.reconcile not in ("clear", "retain"):
            raise ValueError("reconcile must be 'clear' or 'retain'")
        if not self.snr_grid_db:
            raise ValueError("empty SNR grid")
        if self.l is not None and self.l < 1:
            raise ValueError("l must be >= 1")

    @classmethod
    def from_json(cls, text: str, **overrides) -> "CampaignConfig":
        data = json.loads(text)
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown campaign keys: {sorted(unknown)}")
        if "seed" not in data:
            raise ValueError("campaign needs a seed")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


@dataclass(frozen=True)
class SimRecord:
    code: str
    variant: str
    l: int
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors_info: int
    bit_errors_code: int
    avg_iter: float
    max_iter: int
    seed: int
    wall_time: float = 0.0
    info_length: int = 0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ber_info(self) -> float:
        return self.bit_errors_info / (self.frames * self.info_length) if self.info_length else 0.0

    @property
    def fer_ci(self) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames)

    def csv_row(self) -> str:
        lo, hi = self.fer_ci
        return (f"{self.code},{self.variant},{self.l},{self.snr_db:g},{self.frames},"
                f"{self.frame_errors},{self.bit_errors_info},{self.bit_errors_code},"
                f"{self.ber_info:.6e},{self.fer:.6e},{lo:.6e},{hi:.6e},{self.avg_iter:.4f},"
                f"{self.max_iter},{self.seed}")


def wilson_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(k), int(n)).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


@dataclass
class _Setup:
    code: CodeSpec
    l: int
    bases: list
    info_pos: np.ndarray
    G_sys: np.ndarray
    perm: np.ndarray


def _setup(cfg: CampaignConfig) -> _Setup:
    code = build_code(cfg.code)
    G_sys, perm = gf2.systematic_generator(code.generator)
    info_pos = np.sort(perm[: code.k])
    needs_bases = any(v != "ML" for v in cfg.variant)
    bases = family_bases(cfg.code, cfg.family, cfg.l) if needs_bases else []
    l = len(bases) if bases else (cfg.l or 1)
    return _Setup(code, l, bases, info_pos, G_sys, perm)


def _make_decoder(variant: str, cfg: CampaignConfig, st: _Setup):
    """Callable ``(Y, sigma2, U) -> (estimates, iterations)`` over a block."""
    if variant == "ML":
        return lambda Y, s2, U: (ml_decode_batch(st.code, Y), np.zeros(len(Y), np.int64))
    if variant in ("BP", "STACKED"):
        bases = (st.bases[0],) if variant == "BP" else (stack_bases(st.bases),)
        vname = "NX-S"
    else:
        bases, vname = tuple(st.bases), variant
    mcfg = MbbpConfig(bases, variant=vname, max_iter=cfg.N, exchange_period=cfg.N_p,
                      rng_seed=cfg.seed, check_every_iteration=cfg.check_every_iteration,
                      reconcile=cfg.reconcile, verify_bases=False)
    dec = MultiBasisDecoder(mcfg)

    def run(Y, s2, U):
        est = np.empty(Y.shape, dtype=np.uint8)
        its = np.empty(len(Y), dtype=np.int64)
        for f in range(len(Y)):
            out = dec.decode(Y[f], s2, tie_break=U[f])
            est[f] = out.codeword_estimate
            its[f] = out.iterations.max()
        return est, its

    return run


def _draw_block(cfg: CampaignConfig, st: _Setup, block: int, frames: int):
    rng = block_stream(cfg.seed, block)
    Z = rng.standard_normal((frames, st.code.n))
    U = rng.random(frames)
    info = rng.integers(0, 2, size=(frames, st.code.k), dtype=np.uint8)
    if cfg.transmit_mode == "all_zero":
        C = np.zeros((frames, st.code.n), dtype=np.uint8)
    else:
        C = np.array([gf2.encode_systematic(u, st.G_sys, st.perm) for u in info])
    return C, Z, U


_WORKER: dict = {}


def _worker_init(cfg: CampaignConfig):
    st = _setup(cfg)
    _WORKER.clear()
    _WORKER.update(cfg=cfg, st=st, decoders={})


def _run_block(variant: str, snr_db: float, block: int, frames: int) -> tuple[int, ...]:
    cfg, st = _WORKER["cfg"], _WORKER["st"]
    decs = _WORKER["decoders"]
    if variant not in decs:
        decs[variant] = _make_decoder(variant, cfg, st)
    s2 = ChannelModel("biawgn", snr_db, st.code.k / st.code.n).noise_variance
    C, Z, U = _draw_block(cfg, st, block, frames)
    Y = bpsk(C) + np.sqrt(s2) * Z
    est, its = decs[variant](Y, s2, U)
    err = est != C
    frame_err = err.any(axis=1)
    return (frames, int(frame_err.sum()), int(err[:, st.info_pos].sum()), int(err.sum()),
            int(its.sum()), int(its.max(initial=0)))


def _point(pool, cfg: CampaignConfig, st: _Setup, variant: str, snr: float, workers: int,
           ) -> SimRecord:
    t0 = time.perf_counter()
    tot = np.zeros(6, dtype=np.int64)
    block = 0
    done = False
    while not done:
        wave = []
        for b in range(block, block + max(workers, 1)):
            frames = min(cfg.block_size, cfg.max_frames - b * cfg.block_size)
            if frames <= 0:
                break
            wave.append((b, frames))
        if not wave:
            break
        if pool is None:
            results = [_run_block(variant, snr, b, f) for b, f in wave]
        else:
            futs = [pool.submit(_run_block, variant, snr, b, f) for b, f in wave]
            results = [f.result() for f in futs]
        for r in results:
            r = np.array(r, dtype=np.int64)
            tot[:4] += r[:4]
            tot[4] += r[4]
            tot[5] = max(tot[5], r[5])
            block += 1
            if tot[1] >= cfg.target_frame_errors or tot[0] >= cfg.max_frames:
                done = True
                break
    frames = int(tot[0])
    l = 1 if variant in ("BP", "ML") else st.l
    return SimRecord(cfg.code, variant, l, snr, frames, int(tot[1]), int(tot[2]), int(tot[3]),
                     tot[4] / frames, int(tot[5]), cfg.seed, time.perf_counter() - t0,
                     info_length=st.code.k)


def run_campaign(cfg: CampaignConfig, out_path: str | Path | None = None, workers: int = 1,
                 progress=None) -> list[SimRecord]:
    """Simulate every (variant, SNR) point; rows are appended to ``out_path`` as they finish."""
    st = _setup(cfg)
    records = []
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, mp_context=get_context("fork"),
                                   initializer=_worker_init, initargs=(cfg,))
    else:
        _worker_init(cfg)
    try:
        for variant in cfg.variant:
            for snr in cfg.snr_grid_db:
                rec = _point(pool, cfg, st, variant, snr, workers)
                records.append(rec)
                if out_path is not None:
                    append_records(out_path, [rec])
                if progress is not None:
                    progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def records_to_csv(records) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


def append_records(path: str | Path, records) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a") as fh:
        if new:
            fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(r.csv_row() + "\n")


def read_records(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
