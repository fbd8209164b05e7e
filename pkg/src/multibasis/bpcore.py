"""Flooding sum-product decoding on the Tanner graph of a dense H.

Messages are LLRs ``ln(P(0)/P(1))``; the channel maps bit 0 to +1 and bit 1
to -1. All messages are clipped to ``[-LLR_MAX, LLR_MAX]``.

Each decoder also carries a per-variable ``prior`` that is added to the
variable-to-check messages of the next iteration only. It is how an
injected extrinsic estimate re-enters decoding after check-to-variable
memory has been cleared.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numba
import numpy as np

LLR_MAX = 30.0
PROB_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class TannerGraph:
    H: np.ndarray
    chk_ptr: np.ndarray    # edges of check j: chk_ptr[j]:chk_ptr[j+1]
    edge_var: np.ndarray   # variable of each edge
    var_ptr: np.ndarray
    var_edges: np.ndarray  # edge ids grouped by variable

    @classmethod
    def from_matrix(cls, H) -> "TannerGraph":
        H = np.atleast_2d(np.asarray(H, dtype=np.uint8))
        m, n = H.shape
        chk, var = np.nonzero(H)  # row-major: grouped by check
        chk_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(chk, minlength=m), out=chk_ptr[1:])
        order = np.argsort(var, kind="stable")
        var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(var, minlength=n), out=var_ptr[1:])
        arrays = [H.copy(), chk_ptr, var.astype(np.int64), var_ptr, order.astype(np.int64)]
        for a in arrays:
            a.setflags(write=False)
        return cls(*arrays)

    @property
    def m(self) -> int:
        return self.H.shape[0]

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def num_edges(self) -> int:
        return len(self.edge_var)

    @property
    def var_degree(self) -> np.ndarray:
        return np.diff(self.var_ptr)


@dataclass(frozen=True, eq=False)
class DecoderState:
    intrinsic: np.ndarray
    extrinsic: np.ndarray
    hard_decision: np.ndarray
    converged: bool
    iterations_used: int
    c2v: np.ndarray
    v2c: np.ndarray
    prior: np.ndarray

    @property
    def posterior(self) -> np.ndarray:
        return self.intrinsic + self.extrinsic


# -- kernels ---------------------------------------------------------------


@numba.njit(cache=True)
def _clip(x, lim):
    if x > lim:
        return lim
    if x < -lim:
        return -lim
    return x


@numba.njit(cache=True)
def flood(chk_ptr, edge_var, var_ptr, var_edges, intrinsic, prior, c2v, v2c, work, ext, hard,
          lmax):
    """One flooding iteration in place; returns True when the syndrome is zero.

    ``prior`` is consumed (reset to zero).
    """
    n = intrinsic.shape[0]
    m = chk_ptr.shape[0] - 1
    for v in range(n):
        total = intrinsic[v] + prior[v]
        for t in range(var_ptr[v], var_ptr[v + 1]):
            total += c2v[var_edges[t]]
        for t in range(var_ptr[v], var_ptr[v + 1]):
            e = var_edges[t]
            v2c[e] = _clip(total - c2v[e], lmax)
        prior[v] = 0.0
    for j in range(m):
        s = chk_ptr[j]
        f = chk_ptr[j + 1]
        p = 1.0
        for e in range(s, f):
            work[e] = np.tanh(0.5 * v2c[e])
            c2v[e] = p
            p *= work[e]
        p = 1.0
        for e in range(f - 1, s - 1, -1):
            x = c2v[e] * p
            p *= work[e]
            c2v[e] = _clip(np.log1p(x) - np.log1p(-x), lmax)
    for v in range(n):
        total = 0.0
        for t in range(var_ptr[v], var_ptr[v + 1]):
            total += c2v[var_edges[t]]
        ext[v] = total
        hard[v] = 1 if intrinsic[v] + total < 0.0 else 0
    for j in range(m):
        par = 0
        for e in range(chk_ptr[j], chk_ptr[j + 1]):
            par ^= hard[edge_var[e]]
        if par:
            return False
    return True


@numba.njit(cache=True)
def logit(p):
    return np.log(p) - np.log1p(-p)


@numba.njit(cache=True)
def sigmoid_clipped(x, eps):
    if x >= 0:
        p = 1.0 / (1.0 + np.exp(-x))
    else:
        z = np.exp(x)
        p = z / (1.0 + z)
    if p < eps:
        return eps
    if p > 1.0 - eps:
        return 1.0 - eps
    return p


@numba.njit(cache=True)
def probabilities(llr, eps):
    out = np.empty(llr.shape[0])
    for i in range(llr.shape[0]):
        out[i] = sigmoid_clipped(llr[i], eps)
    return out


@numba.njit(cache=True)
def reconcile(c2v, prior, var_ptr, var_edges, ext, target, retain):
    """Replace a decoder's extrinsic LLRs by ``target``.

    clear:  drop check-to-variable memory and seed the next iteration.
    retain: shift each variable's incoming messages equally so their sum
            equals the target.
    """
    n = target.shape[0]
    for v in range(n):
        s = var_ptr[v]
        f = var_ptr[v + 1]
        if retain:
            deg = f - s
            if deg > 0:
                delta = (target[v] - ext[v]) / deg
                for t in range(s, f):
                    c2v[var_edges[t]] += delta
            prior[v] = 0.0
        else:
            for t in range(s, f):
                c2v[var_edges[t]] = 0.0
            prior[v] = target[v]
        ext[v] = target[v]


# -- public API ------------------------------------------------------------


def channel_llr(y, noise_variance: float) -> np.ndarray:
    if noise_variance <= 0:
        raise ValueError("noise variance must be positive")
    return 2.0 * np.asarray(y, dtype=np.float64) / noise_variance


def init_state(graph: TannerGraph, llr) -> DecoderState:
    llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_MAX, LLR_MAX)
    if llr.shape != (graph.n,):
        raise ValueError(f"expected {graph.n} LLRs")
    n, E = graph.n, graph.num_edges
    return DecoderState(llr, np.zeros(n), (llr < 0).astype(np.uint8), False, 0,
                        np.zeros(E), np.zeros(E), np.zeros(n))


def bp_iteration(state: DecoderState, graph: TannerGraph) -> DecoderState:
    c2v, v2c, prior = state.c2v.copy(), state.v2c.copy(), state.prior.copy()
    ext = np.empty(graph.n)
    hard = np.empty(graph.n, dtype=np.uint8)
    ok = flood(graph.chk_ptr, graph.edge_var, graph.var_ptr, graph.var_edges, state.intrinsic,
               prior, c2v, v2c, np.empty(graph.num_edges), ext, hard, LLR_MAX)
    return DecoderState(state.intrinsic, ext, hard, bool(ok), state.iterations_used + 1,
                        c2v, v2c, prior)


def inject_extrinsic(state: DecoderState, p0, graph: TannerGraph | None = None,
                     policy: str = "clear") -> DecoderState:
    """Overwrite the extrinsic belief with probabilities ``p0 = P(bit = 0)``."""
    if policy not in ("clear", "retain"):
        raise ValueError("policy must be 'clear' or 'retain'")
    target = logit(np.clip(np.asarray(p0, dtype=np.float64), PROB_EPS, 1 - PROB_EPS))
    c2v, prior, ext = state.c2v.copy(), state.prior.copy(), state.extrinsic.copy()
    if graph is None:
        if policy == "retain":
            raise ValueError("the retain policy needs the Tanner graph")
        c2v[:] = 0.0
        prior[:] = target
        ext[:] = target
    else:
        reconcile(c2v, prior, graph.var_ptr, graph.var_edges, ext, target, policy == "retain")
    return replace(state, extrinsic=ext, c2v=c2v, prior=prior)


def extrinsic_probabilities(state: DecoderState) -> np.ndarray:
    return probabilities(state.extrinsic, PROB_EPS)


def decode(H, llr, max_iter: int = 100, graph: TannerGraph | None = None) -> DecoderState:
    """Plain BP: iterate until the syndrome is zero or ``max_iter`` is reached."""
    graph = TannerGraph.from_matrix(H) if graph is None else graph
    state = init_state(graph, llr)
    for _ in range(max_iter):
        state = bp_iteration(state, graph)
        if state.converged:
            break
    return state
