"""Union bounds from the weight distribution and the Gallager random-coding bound.

SNR is ``10 log10(Eb/N0)``; with unit-energy BPSK the noise variance is
``sigma^2 = 1 / (2 R Eb/N0)``. All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .codebook import CodeSpec, WeightDistribution

GH_NODES = 200
QUAD_TOL = 1e-9
RHO_STEP = 1e-3

_gh_t, _gh_w = np.polynomial.hermite.hermgauss(GH_NODES)


class QuadratureError(RuntimeError):
    pass


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def noise_variance(snr_db: float, rate: float) -> float:
    return 1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))


def union_bound(weights: WeightDistribution | None, code: CodeSpec, snr_db: float,
                kind: str = "fer") -> float:
    """ML union bound; ``kind`` is "ber" (codeword bits) or "fer"."""
    if weights is None:
        raise ValueError("weight distribution required")
    if kind not in ("ber", "fer"):
        raise ValueError("kind must be 'ber' or 'fer'")
    ebn0 = 10.0 ** (snr_db / 10.0)
    rate = code.k / code.n
    total = 0.0
    for i, a in weights.nonzero().items():
        if i == 0:
            continue
        term = a * float(q_function(math.sqrt(2.0 * rate * i * ebn0)))
        total += term * i / code.n if kind == "ber" else term
    return float(min(total, 1.0))


def _e0_integral_gh(rho: float, s2: float) -> float:
    """int (sum_x P(x) f(y|x)^(1/(1+rho)))^(1+rho) dy with P uniform on {+1,-1}.

    Factoring f(y|+1) out leaves 2^-(1+rho) E[(1 + exp(-2ys/s2))^(1+rho)]
    with y ~ N(1, s2) and s = 1/(1+rho).
    """
    s = 1.0 / (1.0 + rho)
    y = 1.0 + math.sqrt(2.0 * s2) * _gh_t
    g = np.exp((1.0 + rho) * np.logaddexp(0.0, -2.0 * y * s / s2))
    return 2.0 ** (-(1.0 + rho)) * float(_gh_w @ g) / math.sqrt(math.pi)


def _e0_integral_direct(rho: float, s2: float) -> float:
    s = 1.0 / (1.0 + rho)
    sig = math.sqrt(s2)
    c = -0.5 * math.log(2.0 * math.pi * s2)

    def h(y):
        a = s * (c - (y - 1.0) ** 2 / (2.0 * s2))
        b = s * (c - (y + 1.0) ** 2 / (2.0 * s2))
        return math.exp((1.0 + rho) * (math.log(0.5) + np.logaddexp(a, b)))

    val, _ = integrate.quad(h, -1.0 - 12.0 * sig, 1.0 + 12.0 * sig, points=[-1.0, 0.0, 1.0],
                            epsabs=0.0, epsrel=1e-13, limit=500)
    return val


def e0(rho: float, snr_db: float, rate: float, check: bool = False) -> float:
    """Gallager function E0(rho) in nats for BPSK on AWGN, uniform inputs."""
    s2 = noise_variance(snr_db, rate)
    val = _e0_integral_gh(rho, s2)
    if check:
        ref = _e0_integral_direct(rho, s2)
        if abs(val - ref) > QUAD_TOL * max(ref, 1e-300):
            raise QuadratureError(f"E0 quadrature mismatch at rho={rho}: {val} vs {ref}")
    return -math.log(val)


def gallager_exponent(rate: float, snr_db: float, e0_rate: float | None = None,
                      ) -> tuple[float, float]:
    """max over rho in [0,1] of E0(rho) - rho R ln 2; returns (value, rho*).

    ``rate`` is the code rate R = k/n in bits; ``e0_rate`` is the rate used to
    set the noise variance (defaults to ``rate``).
    """
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")
    er = rate if e0_rate is None else e0_rate
    r_nats = rate * math.log(2.0)

    def obj(rho):
        return e0(rho, snr_db, er) - rho * r_nats

    grid = np.linspace(0.0, 1.0, int(round(1.0 / RHO_STEP)) + 1)
    vals = np.array([obj(r) for r in grid])
    if vals[0] > 1e-12:
        raise AssertionError("maximand at rho=0 must be <= 0")
    j = int(np.argmax(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
    best_rho, best = grid[j], vals[j]
    if hi > lo:
        res = optimize.minimize_scalar(lambda r: -obj(r), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-9})
        if -res.fun > best:
            best_rho, best = float(res.x), float(-res.fun)
    e0(best_rho, snr_db, er, check=True)
    return float(best), float(best_rho)


def gallager_bound(n: int, rate: float, snr_db: float) -> float:
    """exp(-n max_rho (E0(rho) - rho R ln 2)); an upper bound on ensemble FER."""
    ex, _ = gallager_exponent(rate, snr_db)
    return float(min(math.exp(-n * ex), 1.0))


@dataclass(frozen=True)
class BoundCurve:
    snr_db: np.ndarray
    values: np.ndarray
    kind: str  # union_ber | union_fer | gallager_fer

    def rows(self):
        return [(float(s), self.kind, float(v)) for s, v in zip(self.snr_db, self.values)]


def bound_curve(kind: str, snr_grid, code: CodeSpec, weights: WeightDistribution | None = None,
                ) -> BoundCurve:
    snr = np.asarray(snr_grid, dtype=np.float64)
    if kind == "gallager_fer":
        vals = [gallager_bound(code.n, code.k / code.n, s) for s in snr]
    elif kind in ("union_ber", "union_fer"):
        vals = [union_bound(weights, code, s, kind.split("_")[1]) for s in snr]
    else:
        raise ValueError(f"unknown bound kind {kind!r}")
    return BoundCurve(snr, np.array(vals), kind)


def curves_to_csv(curves) -> str:
    lines = ["# sigma^2 = 1/(2 R 10^(snr_db/10)), unit-energy BPSK", "snr_db,kind,value"]
    for c in curves:
        lines += [f"{s:g},{k},{v:.12g}" for s, k, v in c.rows()]
    return "\n".join(lines) + "\n"
