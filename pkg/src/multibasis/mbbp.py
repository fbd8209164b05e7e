"""Multiple-bases BP: l decoders on different parity-check matrices of one code.

Variants
--------
NX-S   every decoder runs to convergence or N iterations, least-metric pick
NX-FS  all decoders stop once any has converged, random pick among those
X-PA   every N_p iterations decoders agree on extrinsic probabilities by
       averaging over the decoders that side with the soft majority vote
X-HR   as X-PA, but the agreed value is the most reliable one
X-IC   as X-PA, but the agreed value combines the active decoders as if
       they were independent observations

Extrinsic estimates are passed around as ``P(bit = 0)`` arrays of shape
``(l, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from . import gf2
from .bpcore import (LLR_MAX, PROB_EPS, TannerGraph, channel_llr, flood, logit, probabilities,
                     reconcile, sigmoid_clipped)

NX_VARIANTS = ("NX-S", "NX-FS")
X_VARIANTS = ("X-PA", "X-HR", "X-IC")
VARIANTS = NX_VARIANTS + X_VARIANTS
_RULE = {"X-PA": 0, "X-HR": 1, "X-IC": 2}


# -- exchange rules --------------------------------------------------------


@numba.njit(cache=True)
def majority_vote(p0):
    """Soft vote: sum over decoders of ln(p0 / (1 - p0)) per variable."""
    l, n = p0.shape
    vote = np.zeros(n)
    for d in range(l):
        for v in range(n):
            vote[v] += logit(p0[d, v])
    return vote


@numba.njit(cache=True)
def active_set(p0, vote):
    """Mask ``(l, n)``: decoder d is active at v if its LLR sign matches the vote.

    sgn(0) counts as positive on both sides.
    """
    l, n = p0.shape
    act = np.zeros((l, n), dtype=np.bool_)
    for d in range(l):
        for v in range(n):
            act[d, v] = (logit(p0[d, v]) >= 0.0) == (vote[v] >= 0.0)
    return act


@numba.njit(cache=True)
def combine_pa(p0, act):
    l, n = p0.shape
    out = np.empty(n)
    for v in range(n):
        s = 0.0
        cnt = 0
        for d in range(l):
            if act[d, v]:
                s += p0[d, v]
                cnt += 1
        out[v] = s / cnt
    return out


@numba.njit(cache=True)
def combine_hr(p0, act):
    l, n = p0.shape
    out = np.empty(n)
    for v in range(n):
        best = -1.0
        for d in range(l):
            if act[d, v]:
                r = abs(p0[d, v] - 0.5)
                if r > best:
                    best = r
                    out[v] = p0[d, v]
    return out


@numba.njit(cache=True)
def combine_ic(p0, act):
    """prod p0 / (prod p0 + prod p1), evaluated as a sum of LLRs."""
    l, n = p0.shape
    out = np.empty(n)
    for v in range(n):
        s = 0.0
        for d in range(l):
            if act[d, v]:
                s += logit(p0[d, v])
        out[v] = sigmoid_clipped(s, PROB_EPS)
    return out


@numba.njit(cache=True)
def _combine(p0, rule):
    vote = majority_vote(p0)
    act = active_set(p0, vote)
    if rule == 0:
        pc = combine_pa(p0, act)
    elif rule == 1:
        pc = combine_hr(p0, act)
    else:
        pc = combine_ic(p0, act)
    return pc


# -- decoding loops --------------------------------------------------------


@numba.njit(cache=True)
def _run_nx(chk_ptr, edge_var, var_ptr, var_edges, intrinsic, max_iter, first_success,
            c2v, v2c, work, prior, ext, hard, converged, iters):
    l = chk_ptr.shape[0]
    c2v[:] = 0.0
    prior[:] = 0.0
    converged[:] = False
    iters[:] = 0
    n_conv = 0
    for i in range(1, max_iter + 1):
        for d in range(l):
            if converged[d]:
                continue
            ok = flood(chk_ptr[d], edge_var[d], var_ptr[d], var_edges[d], intrinsic, prior[d],
                       c2v[d], v2c[d], work, ext[d], hard[d], LLR_MAX)
            iters[d] = i
            if ok:
                converged[d] = True
                n_conv += 1
        if n_conv == l or (first_success and n_conv > 0):
            break


@numba.njit(cache=True)
def _run_x(chk_ptr, edge_var, var_ptr, var_edges, intrinsic, max_iter, period, rule,
           check_every, retain, c2v, v2c, work, prior, ext, hard, ok, converged, p0):
    l = chk_ptr.shape[0]
    c2v[:] = 0.0
    prior[:] = 0.0
    converged[:] = False
    for i in range(1, max_iter + 1):
        for d in range(l):
            ok[d] = flood(chk_ptr[d], edge_var[d], var_ptr[d], var_edges[d], intrinsic,
                          prior[d], c2v[d], v2c[d], work, ext[d], hard[d], LLR_MAX)
        exchange = i % period == 0
        if exchange:
            for d in range(l):
                p0[d] = probabilities(ext[d], PROB_EPS)
            pc = _combine(p0, rule)
            for v in range(pc.shape[0]):
                pc[v] = min(max(pc[v], PROB_EPS), 1.0 - PROB_EPS)
            target = logit(pc)
            for d in range(l):
                reconcile(c2v[d], prior[d], var_ptr[d], var_edges[d], ext[d], target, retain)
        if exchange or check_every:
            found = False
            for d in range(l):
                if ok[d]:
                    converged[d] = True
                    found = True
            if found:
                return i
    return max_iter


# -- configuration & results -----------------------------------------------


@dataclass(frozen=True, eq=False)
class MbbpConfig:
    bases: tuple
    variant: str = "NX-S"
    max_iter: int = 100
    exchange_period: int = 10
    rng_seed: int = 0
    check_every_iteration: bool = False
    reconcile: str = "clear"  # or "retain"
    info_positions: np.ndarray | None = None
    verify_bases: bool = True

    def __post_init__(self):
        bases = tuple(gf2.as_bits(H, ndim=2) for H in self.bases)
        object.__setattr__(self, "bases", bases)
        if not bases:
            raise ValueError("need at least one basis")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.variant in X_VARIANTS and not 1 <= self.exchange_period <= self.max_iter:
            raise ValueError("exchange period must lie in 1..max_iter")
        if self.reconcile not in ("clear", "retain"):
            raise ValueError("reconcile must be 'clear' or 'retain'")
        n = bases[0].shape[1]
        if any(H.shape[1] != n for H in bases):
            raise ValueError("all bases need the same number of columns")
        if self.verify_bases and len(bases) > 1:
            if not all(gf2.same_row_space(bases[0], H) for H in bases[1:]):
                raise ValueError("bases do not define the same code")

    @property
    def l(self) -> int:
        return len(self.bases)

    @property
    def n(self) -> int:
        return self.bases[0].shape[1]


@dataclass(frozen=True, eq=False)
class MbbpOutcome:
    codeword_estimate: np.ndarray
    info_estimate: np.ndarray | None
    valid: bool
    winner: int | None
    iterations: np.ndarray      # per decoder
    selected_by: str            # LMS | first-success | random-tie | fallback
    candidates: np.ndarray      # (l, n) hard decisions
    converged: np.ndarray       # (l,) bool


def least_metric_index(candidates, y) -> int:
    """Index of the candidate closest to ``y`` in squared Euclidean distance."""
    cands = np.atleast_2d(np.asarray(candidates))
    if cands.shape[0] == 0:
        raise ValueError("no candidates")
    y = np.asarray(y, dtype=np.float64)
    if cands.shape[1] != y.shape[0]:
        raise ValueError("candidate length does not match y")
    dist = ((y[None, :] - (1.0 - 2.0 * cands)) ** 2).sum(axis=1)
    return int(np.argmin(dist))


def least_metric_select(candidates, y) -> np.ndarray:
    cands = np.atleast_2d(np.asarray(candidates))
    return cands[least_metric_index(cands, y)]


class _Bank:
    """Tanner graphs of all bases padded into 2-D arrays for the kernels."""

    def __init__(self, bases):
        graphs = [TannerGraph.from_matrix(H) for H in bases]
        l, n = len(graphs), graphs[0].n
        mmax = max(g.m for g in graphs)
        emax = max(g.num_edges for g in graphs)
        self.chk_ptr = np.zeros((l, mmax + 1), dtype=np.int64)
        self.edge_var = np.zeros((l, emax), dtype=np.int64)
        self.var_ptr = np.zeros((l, n + 1), dtype=np.int64)
        self.var_edges = np.zeros((l, emax), dtype=np.int64)
        for d, g in enumerate(graphs):
            self.chk_ptr[d, : g.m + 1] = g.chk_ptr
            self.chk_ptr[d, g.m + 1:] = g.chk_ptr[-1]
            self.edge_var[d, : g.num_edges] = g.edge_var
            self.var_ptr[d] = g.var_ptr
            self.var_edges[d, : g.num_edges] = g.var_edges
        self.graphs = graphs
        self.c2v = np.zeros((l, emax))
        self.v2c = np.zeros((l, emax))
        self.work = np.zeros(emax)
        self.prior = np.zeros((l, n))
        self.ext = np.zeros((l, n))
        self.hard = np.zeros((l, n), dtype=np.uint8)
        self.converged = np.zeros(l, dtype=np.bool_)
        self.ok = np.zeros(l, dtype=np.bool_)
        self.iters = np.zeros(l, dtype=np.int64)
        self.p0 = np.zeros((l, n))


class MultiBasisDecoder:
    """Reusable decoder for one configuration (not thread-safe)."""

    def __init__(self, config: MbbpConfig):
        self.config = config
        self.bank = _Bank(config.bases)
        self._rng = np.random.default_rng(config.rng_seed)

    def decode(self, y, noise_variance: float, tie_break: float | None = None) -> MbbpOutcome:
        cfg, b = self.config, self.bank
        y = np.asarray(y, dtype=np.float64)
        llr = np.clip(channel_llr(y, noise_variance), -LLR_MAX, LLR_MAX)
        u = self._rng.random() if tie_break is None else float(tie_break)
        if cfg.variant in NX_VARIANTS:
            _run_nx(b.chk_ptr, b.edge_var, b.var_ptr, b.var_edges, llr, cfg.max_iter,
                    cfg.variant == "NX-FS", b.c2v, b.v2c, b.work, b.prior, b.ext, b.hard,
                    b.converged, b.iters)
            iters = b.iters.copy()
        else:
            last = _run_x(b.chk_ptr, b.edge_var, b.var_ptr, b.var_edges, llr, cfg.max_iter,
                          cfg.exchange_period, _RULE[cfg.variant], cfg.check_every_iteration,
                          cfg.reconcile == "retain", b.c2v, b.v2c, b.work, b.prior, b.ext,
                          b.hard, b.ok, b.converged, b.p0)
            iters = np.full(cfg.l, last, dtype=np.int64)
        return self._select(y, b.hard.copy(), b.converged.copy(), iters, u)

    def _select(self, y, hard, converged, iters, u) -> MbbpOutcome:
        cfg = self.config
        valid_idx = np.flatnonzero(converged)
        valid = valid_idx.size > 0
        pool = valid_idx if valid else np.arange(cfg.l)
        if cfg.variant == "NX-S":
            winner = int(pool[least_metric_index(hard[pool], y)])
            how = "LMS" if valid else "fallback"
        else:
            winner = int(pool[min(int(u * pool.size), pool.size - 1)])
            how = "fallback" if not valid else ("first-success" if pool.size == 1 else "random-tie")
        cw = hard[winner]
        info = None if cfg.info_positions is None else cw[np.asarray(cfg.info_positions)]
        return MbbpOutcome(cw, info, valid, winner if valid else None, iters, how, hard,
                           converged)


def run_nx(config: MbbpConfig, y, noise_variance: float) -> MbbpOutcome:
    if config.variant not in NX_VARIANTS:
        raise ValueError("run_nx needs an NX variant")
    return MultiBasisDecoder(config).decode(y, noise_variance)


def run_x(config: MbbpConfig, y, noise_variance: float) -> MbbpOutcome:
    if config.variant not in X_VARIANTS:
        raise ValueError("run_x needs an X variant")
    return MultiBasisDecoder(config).decode(y, noise_variance)
