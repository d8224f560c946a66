"""Dense baselines, fixed-Eb/N0 rate solving, load sweeps, envelopes.

Baseline spectral efficiencies are functions of (beta, snr) only:
Cover-Wyner sum capacity, orthogonal transmission (beta <= 1), and
random-spreading dense CDMA under optimum and LMMSE decoding.  The sparse
closed forms live in `capacity` and exist only on the integer lattice
beta*d in {2, 3, ...}.  A load sweep solves every scheme at a common
Eb/N0 via the fixed point R = C(R * ebn0 / beta) and adds the time-sharing
(upper concave) envelope over the sparse lattice points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .capacity import capacity_lmmse, capacity_optimum, kernel_F
from .errors import ConfigurationError, DomainError, NumericalError
from .spectral import SystemConfig
from .units import LN2, LOG2E

__all__ = [
    "SCHEMES",
    "RatePoint",
    "SweepTable",
    "baseline_rate",
    "solve_rate_at_ebn0",
    "timeshare_envelope",
    "sweep_load",
]

SCHEMES = (
    "sparse_opt",
    "sparse_lmmse",
    "rs_cdma_opt",
    "rs_cdma_lmmse",
    "orthogonal",
    "cover_wyner",
    "timeshare_envelope",
)

_DENSE_SCHEMES = ("cover_wyner", "orthogonal", "rs_cdma_opt", "rs_cdma_lmmse")

_RATE_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RatePoint:
    """One operating point: scheme, load, solved rate, and where it sits.

    snr is None for envelope points, which are time-sharing mixtures rather
    than single operating points.  below_threshold marks ebn0 <= ln 2, where
    the only fixed point is rate 0.
    """

    scheme: str
    beta: float
    rate: float
    ebn0: float
    snr: float | None
    d: int | None = None
    beta_d: int | None = None
    route: str = "closed_form"
    below_threshold: bool = False


@dataclass(frozen=True)
class SweepTable:
    """Rate points over a load grid at fixed Eb/N0 (and fixed d for sparse)."""

    points: tuple[RatePoint, ...]
    ebn0: float
    d: int | None = None
    degenerate: bool = False  # envelope built from fewer than 2 generators


def baseline_rate(scheme: str, beta: float, snr: float) -> float:
    """Dense-baseline spectral efficiency in bits/s/Hz at linear snr."""
    beta = float(beta)
    snr = float(snr)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    if not math.isfinite(snr) or snr < 0.0:
        raise DomainError(f"snr must be finite and >= 0, got {snr!r}")

    if scheme == "cover_wyner":
        return math.log1p(beta * snr) / LN2
    if scheme == "orthogonal":
        if beta > 1.0:
            raise DomainError(f"orthogonal transmission requires beta <= 1, got {beta!r}")
        return beta * math.log1p(snr) / LN2
    if scheme == "rs_cdma_opt":
        if snr == 0.0:
            return 0.0
        f = kernel_F(snr, beta)
        return (
            beta * math.log1p(snr - f / 4.0) / LN2
            + math.log1p(beta * snr - f / 4.0) / LN2
            - f / (4.0 * snr) * LOG2E
        )
    if scheme == "rs_cdma_lmmse":
        f = kernel_F(snr, beta)
        return beta * math.log1p(snr - f / 4.0) / LN2
    raise DomainError(f"unknown baseline scheme {scheme!r}; pick from {_DENSE_SCHEMES}")


def solve_rate_at_ebn0(
    rate_fn: Callable[[float], float],
    beta: float,
    ebn0: float,
    *,
    scheme: str = "custom",
    d: int | None = None,
    beta_d: int | None = None,
) -> RatePoint:
    """Solve R = rate_fn(R * ebn0 / beta) for the positive fixed point.

    rate_fn maps linear snr to bits/s/Hz.  R = 0 is always a fixed point;
    above the universal threshold ebn0 > ln 2 a unique positive one exists
    for the capacity curves handled here.  Bracketing doubles an upper bound
    from 1 until the residual changes sign, then plain bisection runs the
    interval down to 1e-12.
    """
    beta = float(beta)
    ebn0 = float(ebn0)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    if not math.isfinite(ebn0) or ebn0 <= 0.0:
        raise DomainError(f"ebn0 must be positive (linear), got {ebn0!r}")

    zero = RatePoint(
        scheme=scheme, beta=beta, rate=0.0, ebn0=ebn0, snr=0.0,
        d=d, beta_d=beta_d, below_threshold=True,
    )
    if ebn0 <= LN2:
        return zero

    def shortfall(r: float) -> float:
        return r - rate_fn(r * ebn0 / beta)

    lo = 1e-18
    if shortfall(lo) >= 0.0:
        # rate function vanishes faster than linearly; no positive rate
        return zero
    hi = 1.0
    doublings = 0
    while shortfall(hi) < 0.0:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > 60:
            raise NumericalError(
                f"rate bracket did not close for scheme={scheme!r}, beta={beta!r}, ebn0={ebn0!r}"
            )
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if shortfall(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    rate = 0.5 * (lo + hi)
    snr = rate * ebn0 / beta
    if abs(rate - rate_fn(snr)) > _RATE_RESIDUAL_TOL:
        raise NumericalError(
            f"fixed-point residual above {_RATE_RESIDUAL_TOL:g} for scheme={scheme!r}, "
            f"beta={beta!r}, ebn0={ebn0!r}"
        )
    return RatePoint(scheme=scheme, beta=beta, rate=rate, ebn0=ebn0, snr=snr, d=d, beta_d=beta_d)


def _upper_concave_hull(pts: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Upper hull of (beta, rate) pairs by the monotone-chain construction."""
    pts = sorted(pts)
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop middle point when it is at or below the chord
            if (x2 - x1) * (p[1] - y1) - (p[0] - x1) * (y2 - y1) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _interp_hull(hull: Sequence[tuple[float, float]], beta: float) -> float:
    xs = [p[0] for p in hull]
    if beta <= xs[0]:
        return hull[0][1]
    if beta >= xs[-1]:
        return hull[-1][1]
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= beta <= x2:
            t = (beta - x1) / (x2 - x1)
            return y1 + t * (y2 - y1)
    raise NumericalError("hull interpolation fell through")  # pragma: no cover


def timeshare_envelope(points: Sequence[RatePoint]) -> SweepTable:
    """Upper concave envelope over load of the given operating points.

    Points may mix column degrees (pooled time sharing) or come from a
    single d; the envelope only sees (beta, rate).  With fewer than two
    distinct loads the input is returned unchanged, flagged degenerate.
    """
    if not points:
        return SweepTable(points=(), ebn0=math.nan, d=None, degenerate=True)
    ebn0s = {p.ebn0 for p in points}
    if len(ebn0s) != 1:
        raise ConfigurationError("envelope requires a common ebn0 across points")
    ebn0 = ebn0s.pop()
    ds = {p.d for p in points}
    d = ds.pop() if len(ds) == 1 else None
    routes = {p.scheme for p in points}
    route = routes.pop() if len(routes) == 1 else "mixed"

    distinct = len({p.beta for p in points})
    if distinct < 2:
        return SweepTable(points=tuple(points), ebn0=ebn0, d=d, degenerate=True)

    hull = _upper_concave_hull([(p.beta, p.rate) for p in points])
    env = tuple(
        RatePoint(
            scheme="timeshare_envelope", beta=b, rate=r, ebn0=ebn0, snr=None,
            d=d, route=route,
        )
        for b, r in hull
    )
    return SweepTable(points=env, ebn0=ebn0, d=d)


def _sparse_rate_fn(d: int, beta_d: int, receiver: str) -> Callable[[float], float]:
    cfg = SystemConfig(d, beta_d)
    cap = capacity_optimum if receiver == "optimum" else capacity_lmmse
    return lambda snr: cap(cfg.with_snr(snr)).spectral_efficiency


def sweep_load(d: int, ebn0: float, beta_grid: Sequence[float]) -> SweepTable:
    """Solve all schemes over a load grid at fixed Eb/N0 (linear).

    Sparse closed forms are evaluated only at admissible lattice loads
    beta = beta_d / d with integer beta_d >= 2 inside the grid span; dense
    baselines cover every grid load (orthogonal only up to beta = 1).  The
    time-sharing envelopes of the two sparse families are interpolated back
    onto the grid so concavity is visible row by row.
    """
    betas = sorted({float(b) for b in beta_grid})
    if not betas:
        raise ConfigurationError("beta_grid is empty")
    if betas[0] <= 0.0:
        raise ConfigurationError(f"loads must be positive, got {betas[0]!r}")
    lo, hi = betas[0], betas[-1]

    bd_lo = max(2, math.ceil(lo * d - 1e-9))
    bd_hi = math.floor(hi * d + 1e-9)
    if bd_hi < bd_lo:
        raise ConfigurationError(
            f"no admissible lattice point beta_d in [{bd_lo}, {bd_hi}] "
            f"for d={d} over loads [{lo!r}, {hi!r}]"
        )

    points: list[RatePoint] = []
    sparse: dict[str, list[RatePoint]] = {"sparse_opt": [], "sparse_lmmse": []}
    for bd in range(bd_lo, bd_hi + 1):
        beta = bd / d
        for scheme, receiver in (("sparse_opt", "optimum"), ("sparse_lmmse", "lmmse")):
            pt = solve_rate_at_ebn0(
                _sparse_rate_fn(d, bd, receiver), beta, ebn0,
                scheme=scheme, d=d, beta_d=bd,
            )
            sparse[scheme].append(pt)
            points.append(pt)

    degenerate = False
    for scheme, pts in sparse.items():
        env = timeshare_envelope(pts)
        degenerate = degenerate or env.degenerate
        if env.degenerate:
            continue
        hull = [(p.beta, p.rate) for p in env.points]
        env_betas = sorted({p.beta for p in pts} | {b for b in betas if hull[0][0] <= b <= hull[-1][0]})
        points.extend(
            RatePoint(
                scheme="timeshare_envelope", beta=b, rate=_interp_hull(hull, b),
                ebn0=ebn0, snr=None, d=d, route=scheme,
            )
            for b in env_betas
        )

    for scheme in _DENSE_SCHEMES:
        for beta in betas:
            if scheme == "orthogonal" and beta > 1.0:
                continue
            points.append(
                solve_rate_at_ebn0(
                    lambda snr, s=scheme, b=beta: baseline_rate(s, b, snr),
                    beta, ebn0, scheme=scheme,
                )
            )

    order = {s: i for i, s in enumerate(SCHEMES)}
    points.sort(key=lambda p: (order[p.scheme], p.route, p.beta))
    return SweepTable(points=tuple(points), ebn0=ebn0, d=d, degenerate=degenerate)
