"""Entropy estimators for interval maps and the bound arithmetic built on them.

Estimators that can only partially succeed return results carrying a
`flags` tuple instead of raising.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np
from scipy.optimize import brentq

from hofbauer_entropy.core.errors import NotPeriodicError, UnsupportedOrderError
from hofbauer_entropy.core.tolerances import eps_root
from hofbauer_entropy.graphs import cyclic_components, entropy_of_graph, gurevic_entropy
from hofbauer_entropy.hofbauer import branch_deriv_sups, build_diagram, to_graph, vertex_L
from hofbauer_entropy.intervals import Real, is_exact
from hofbauer_entropy.maps import (
    NaturalPartition,
    PiecewiseMonotoneMap,
    PolynomialBranch,
    critical_set,
    flat_critical_points,
    lap_counts,
    natural_partition,
    sup_deriv_norms,
    turning_points,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EntropyEstimate:
    method: str  # lap|hofbauer|gurevic
    value: float
    sequence: tuple[tuple[int, float], ...] = ()
    params: dict[str, Any] = field(default_factory=dict)
    flags: tuple[str, ...] = ()


def _log_slope(counts: Sequence[int]) -> float:
    n = len(counts)
    if n == 1:
        return math.log(counts[0])
    m = max(1, n // 2)
    return (math.log(counts[n - 1]) - math.log(counts[m - 1])) / (n - m)


def entropy_lap(fmap: PiecewiseMonotoneMap, n_max: int) -> EntropyEstimate:
    """Growth rate of lap numbers.

    The slope of log ℓ(f^n) over the second half of the computed range
    cancels the constant factor in ℓ(f^n) ~ C·e^(hn), but for maps whose
    kneading closes late it still carries the early growth of the laps and
    lands above h. Since h ≤ R(f), the slope is capped by the
    `growth_rate_R` estimate over the same horizon; `params["slope"]` keeps
    the raw value and `params["capped_by_R"]` tells whether the cap applied.
    """

    counts = lap_counts(fmap, n_max, partial=True)
    flags: tuple[str, ...] = ()
    if len(counts) < n_max:
        flags = (f"partial: lap budget exhausted after n={len(counts)}",)
    seq = tuple((n, math.log(c) / n) for n, c in enumerate(counts, start=1))
    slope = max(_log_slope(counts), 0.0)
    R = growth_rate_R(fmap, n_max).value
    return EntropyEstimate(
        method="lap",
        value=min(slope, R),
        sequence=seq,
        params={
            "n_max": n_max,
            "n_reached": len(counts),
            "laps": counts[-1],
            "slope": slope,
            "capped_by_R": slope > R + 1e-12,
        },
        flags=flags,
    )


def entropy_hofbauer(
    fmap: PiecewiseMonotoneMap, partition: NaturalPartition | None, N: int, p_max: int = 40
) -> EntropyEstimate:
    """h(D_N) as the largest spectral entropy over its strongly connected components.

    The Gurevic estimate at a vertex of maximal L lying on a cycle is reported
    alongside in `params`.
    """

    part = partition or natural_partition(fmap)
    diagram = build_diagram(fmap, part, N)
    params: dict[str, Any] = {"N": N, "p_max": p_max, "vertices": len(diagram.vertices), "edges": len(diagram.edges)}
    if not diagram.vertices:
        return EntropyEstimate(method="hofbauer", value=0.0, params=params, flags=("empty_diagram",))

    graph = to_graph(diagram)
    h = entropy_of_graph(graph)
    flags: tuple[str, ...] = () if h.has_cycle else ("no_cycle",)

    on_cycle = {int(v) for comp in cyclic_components(graph) for v in comp}
    if on_cycle:
        best = max(sorted(on_cycle), key=lambda vid: vertex_L(diagram.vertex(vid)))
        ge = gurevic_entropy(graph, str(best), p_max)
        params.update({"gurevic_vertex": best, "gurevic": ge.estimate})
    return EntropyEstimate(method="hofbauer", value=h.value, params=params, flags=flags)


def hofbauer_sequence(fmap: PiecewiseMonotoneMap, partition: NaturalPartition | None, N_max: int) -> list[float]:
    """h(D_N) for N = 1..N_max, nondecreasing."""

    part = partition or natural_partition(fmap)
    deepest = build_diagram(fmap, part, N_max)
    out: list[float] = []
    for N in range(1, N_max + 1):
        h = entropy_of_graph(to_graph(deepest.truncate(N))).value
        out.append(max(h, out[-1]) if out else h)
    return out


@dataclass(frozen=True)
class GrowthRateEstimate:
    value: float
    sequence: tuple[tuple[int, float], ...]


def growth_rate_R(fmap: PiecewiseMonotoneMap, n_max: int) -> GrowthRateEstimate:
    """R(f) from above: the infimum of (1/n) log⁺ ||(f^n)'|| over n ≤ n_max."""

    norms = sup_deriv_norms(fmap, n_max)
    seq = tuple((n, max(math.log(s), 0.0) / n if s > 0 else 0.0) for n, s in enumerate(norms, start=1))
    return GrowthRateEstimate(value=min(v for _, v in seq), sequence=seq)


@dataclass(frozen=True)
class PeriodicPoint:
    x: Real
    period: int
    multiplier: float
    indeterminate: bool = False

    @property
    def repelling(self) -> bool:
        return abs(self.multiplier) > 1 and not self.indeterminate


@dataclass(frozen=True)
class PeriodicSearch:
    T: int
    points: tuple[PeriodicPoint, ...]
    interval_of_fixed_points: bool = False
    flags: tuple[str, ...] = ()


def _affine_cylinders(fmap: PiecewiseMonotoneMap, T: int) -> list[tuple[Real, Real, Real, Real]]:
    """Closed domains [a, b] on which f^T is affine, as (a, b, slope, intercept)."""

    out: list[tuple[Real, Real, Real, Real]] = []
    for pc in fmap.pieces:
        c0, c1 = (list(pc.branch.coeffs) + [0])[:2]  # type: ignore[attr-defined]
        out.append((pc.lo, pc.hi, c1, c0))
    for _ in range(T - 1):
        nxt: list[tuple[Real, Real, Real, Real]] = []
        for a, b, s, t in out:
            ya, yb = s * a + t, s * b + t
            lo, hi = min(ya, yb), max(ya, yb)
            for pc in fmap.pieces:
                c0, c1 = (list(pc.branch.coeffs) + [0])[:2]  # type: ignore[attr-defined]
                if s == 0:
                    if not (pc.lo <= lo < pc.hi or (lo == pc.hi == 1)):
                        continue
                    nxt.append((a, b, 0, c1 * lo + c0))
                    continue
                u, v = max(lo, pc.lo), min(hi, pc.hi)
                if u > v or (u == v and lo < hi):
                    continue
                xa, xb = sorted(((u - t) / s, (v - t) / s))
                nxt.append((xa, xb, c1 * s, c1 * t + c0))
        out = nxt
    return out


def find_periodic(fmap: PiecewiseMonotoneMap, T: int, tol: float = 1e-9, *, grid: int = 4000) -> PeriodicSearch:
    """Fixed points of f^T with their multipliers (f^T)'.

    Piecewise-linear maps are solved cylinder by cylinder; other maps use a
    sign-change scan of f^T(x) - x refined with brentq.
    """

    if T < 1:
        raise ValueError("T must be >= 1")
    found: dict[Any, PeriodicPoint] = {}
    interval_flag = False
    flags: list[str] = []

    if fmap.piecewise_linear:
        for a, b, s, t in _affine_cylinders(fmap, T):
            if s == 1:
                if t == 0 and a < b:
                    interval_flag = True
                continue
            x = t / (1 - s)
            if a <= x <= b:
                key = x if is_exact(x) else round(float(x), 12)
                if key not in found:
                    found[key] = PeriodicPoint(x=x, period=T, multiplier=_multiplier(fmap, x, T))
    else:
        xs = np.linspace(0.0, 1.0, max(grid, 200 * T) + 1)

        def h(x: float) -> float:
            y: Real = x
            for _ in range(T):
                y = fmap(y)
            return float(y) - x

        vals = [h(float(x)) for x in xs]
        if all(abs(v) <= tol for v in vals):
            interval_flag = True
        else:
            for i in range(len(xs) - 1):
                a, b = float(xs[i]), float(xs[i + 1])
                roots: list[float] = []
                if abs(vals[i]) <= eps_root():
                    roots.append(a)
                elif vals[i] * vals[i + 1] < 0:
                    roots.append(float(brentq(h, a, b, xtol=eps_root())))
                if i == len(xs) - 2 and abs(vals[i + 1]) <= eps_root():
                    roots.append(b)
                for x in roots:
                    key = round(x, 9)
                    if key not in found:
                        found[key] = PeriodicPoint(x=x, period=T, multiplier=_multiplier(fmap, x, T))

    points = []
    for pt in found.values():
        if abs(abs(pt.multiplier) - 1) <= tol:
            pt = PeriodicPoint(x=pt.x, period=T, multiplier=pt.multiplier, indeterminate=True)
            logger.warning("indeterminate periodic point x=%s (multiplier %s)", pt.x, pt.multiplier)
        points.append(pt)
    if interval_flag:
        flags.append("interval_of_fixed_points")
    points.sort(key=lambda p: float(p.x))
    return PeriodicSearch(T=T, points=tuple(points), interval_of_fixed_points=interval_flag, flags=tuple(flags))


def _multiplier(fmap: PiecewiseMonotoneMap, x: Real, T: int) -> float:
    prod = 1.0
    y = x
    for _ in range(T):
        prod *= float(fmap.pieces[fmap.piece_index(y)].branch.derivative(y, 1))
        y = fmap(y)
    return prod


def lyapunov_at_periodic(fmap: PiecewiseMonotoneMap, x: Real, T: int, tol: float = 1e-9) -> float:
    """(1/T) log |(f^T)'(x)|; -inf for a zero multiplier."""

    y = x
    for _ in range(T):
        y = fmap(y)
    if not (y == x or abs(float(y) - float(x)) <= tol):
        raise NotPeriodicError(f"{x} is not {T}-periodic (f^{T}(x)={y})")
    m = abs(_multiplier(fmap, x, T))
    if m == 0:
        return float("-inf")
    return math.log(m) / T


@dataclass(frozen=True)
class BetaEstimate:
    value: float
    orbits: tuple[tuple[int, int], ...]  # (period q, turning points p on the orbit)
    Q_max: int
    flags: tuple[str, ...] = ()


def beta_bound(fmap: PiecewiseMonotoneMap, Q_max: int, tol: float = 1e-9) -> BetaEstimate:
    """max (p/q) log 2 over periodic orbits of period q ≤ Q_max through p turning points.

    A turning plateau [b, c] with value v carries a q-periodic orbit exactly
    when f^(q-1)(v) lands back in [b, c].
    """

    if Q_max < 1:
        raise ValueError("Q_max must be >= 1")
    turning = turning_points(fmap)

    def _hits(y: Real, unit: tuple[Real, Real]) -> bool:
        b, c = unit
        if b == c and not (is_exact(y) and is_exact(b)):
            return abs(float(y) - float(b)) <= tol
        return b <= y <= c

    best = 0.0
    orbits: list[tuple[int, int]] = []
    for unit in turning:
        y = fmap(unit[0])
        for q in range(1, Q_max + 1):
            if _hits(y, unit):
                pts = [unit[0] if unit[0] == unit[1] else y]
                for _ in range(q - 1):
                    pts.append(fmap(pts[-1]))
                p = sum(1 for u in turning if any(_hits(pt, u) for pt in pts))
                orbits.append((q, p))
                best = max(best, p / q * math.log(2))
                break
            y = fmap(y)
    flags = () if orbits else (f"no periodic turning orbit up to period {Q_max}",)
    return BetaEstimate(value=best, orbits=tuple(orbits), Q_max=Q_max, flags=flags)


@dataclass(frozen=True)
class BoundsParams:
    n_max: int = 16
    N: int = 8
    p_max: int = 40
    T_max: int = 2
    Q_max: int = 10
    method: str = "all"  # lap|hofbauer|all


@dataclass(frozen=True)
class BoundsReport:
    r: float
    h_estimate: float | None
    h_method: str | None
    R_estimate: float | None
    yomdin_bound: float | None
    max_bound: float | None
    beta_estimate: float | None
    lambda_p: tuple[float, ...]
    flags: tuple[str, ...] = ()
    estimates: tuple[EntropyEstimate, ...] = ()
    R_sequence: tuple[tuple[int, float], ...] = ()


def bounds_report(fmap: PiecewiseMonotoneMap, r: float, params: BoundsParams | None = None) -> BoundsReport:
    """h, R(f), the Yomdin bound h + R/r and the bound max(h, R/r), with β(f) and λ(p)."""

    if r < 1:
        raise ValueError("r must be >= 1")
    prm = params or BoundsParams()
    flags: list[str] = []
    estimates: list[EntropyEstimate] = []

    h: float | None = None
    h_method: str | None = None
    if prm.method in {"lap", "all"}:
        try:
            est = entropy_lap(fmap, prm.n_max)
            estimates.append(est)
            flags.extend(est.flags)
            if not est.flags or prm.method == "lap":
                h, h_method = est.value, "lap"
        except Exception as e:
            flags.append(f"lap: {type(e).__name__}: {e}")
    if prm.method in {"hofbauer", "all"}:
        try:
            est = entropy_hofbauer(fmap, None, prm.N, prm.p_max)
            estimates.append(est)
            flags.extend(est.flags)
            if h is None:
                h, h_method = est.value, "hofbauer"
        except Exception as e:
            flags.append(f"hofbauer: {type(e).__name__}: {e}")

    R: float | None = None
    R_seq: tuple[tuple[int, float], ...] = ()
    try:
        gr = growth_rate_R(fmap, prm.n_max)
        R, R_seq = gr.value, gr.sequence
    except Exception as e:
        flags.append(f"R: {type(e).__name__}: {e}")

    beta: float | None = None
    try:
        be = beta_bound(fmap, prm.Q_max)
        beta = be.value
        flags.extend(be.flags)
    except Exception as e:
        flags.append(f"beta: {type(e).__name__}: {e}")

    lambdas: set[float] = set()
    for T in range(1, prm.T_max + 1):
        try:
            search = find_periodic(fmap, T)
        except Exception as e:
            flags.append(f"periodic T={T}: {type(e).__name__}: {e}")
            continue
        for pt in search.points:
            if pt.repelling:
                lambdas.add(round(math.log(abs(pt.multiplier)) / T, 12))

    yomdin = sharp = None
    if h is not None and R is not None:
        yomdin = h + R / r
        sharp = max(h, R / r)
    return BoundsReport(
        r=r,
        h_estimate=h,
        h_method=h_method,
        R_estimate=R,
        yomdin_bound=yomdin,
        max_bound=sharp,
        beta_estimate=beta,
        lambda_p=tuple(sorted(lambdas)),
        flags=tuple(flags),
        estimates=tuple(estimates),
        R_sequence=R_seq,
    )


@dataclass(frozen=True)
class CriticalBranchReport:
    r: float
    derivative_norm: float
    rows: tuple[tuple[float, int, float | None], ...]  # (l, count, ratio)


def _derivative_norm(fmap: PiecewiseMonotoneMap, k: int, grid: int = 2001) -> float:
    best = 0.0
    for pc in fmap.pieces:
        br = pc.branch
        if isinstance(br, PolynomialBranch):
            best = max(best, PolynomialBranch(br.derivative_coeffs(k - 1)).deriv_sup(pc.lo, pc.hi))
        else:
            xs = np.linspace(float(pc.lo), float(pc.hi), grid)
            best = max(best, max(abs(float(br.derivative(float(x), k))) for x in xs))
    return best


def critical_branch_count_check(fmap: PiecewiseMonotoneMap, r: float, l_values: Sequence[float]) -> CriticalBranchReport:
    """Branches with sup|f'| > l against ||f^(⌊r⌋)||·l^(1/(r-1)).

    The ratio column is an empirical look at the constant in that count bound;
    it is None when the derivative norm vanishes.
    """

    if r <= 1:
        raise ValueError("r must be > 1")
    k = int(math.floor(r))
    if k > fmap.max_order:
        raise UnsupportedOrderError(f"derivative of order {k} unavailable for {fmap.name} (r={fmap.smoothness_order})")
    norm = _derivative_norm(fmap, k)
    sups = branch_deriv_sups(fmap, natural_partition(fmap))
    rows = []
    for l in l_values:
        count = sum(1 for s in sups if s > l)
        ratio = count / (norm * l ** (1.0 / (r - 1))) if norm > 0 else None
        rows.append((float(l), count, ratio))
    return CriticalBranchReport(r=r, derivative_norm=norm, rows=tuple(rows))


@dataclass(frozen=True)
class RuelleReport:
    lyapunov: float
    entropy_proxy: float
    h_estimate: float
    consistent: bool
    resampled: int
    dropped: int = 0


# Large prime, not of the form 2^k - 1, so tent orbits on (1/p)Z do not cycle early.
GRID_PRIME = 1_000_000_007


def _orbit_letter(part: NaturalPartition, x: Real) -> int | None:
    letter = part.index_of(x)
    if letter is not None:
        return letter
    if x <= part.branches[0].lo:
        return 0
    if x >= part.branches[-1].hi:
        return len(part) - 1
    return None


def _sample_orbit(
    fmap: PiecewiseMonotoneMap, part: NaturalPartition, x0: float, n: int, burn_in: int, on_grid: bool
) -> tuple[list[float], list[int]] | None:
    """log|f'| and branch letters along one orbit, or None when it must be resampled.

    On the grid (1/p)Z the orbit is exact and rounded back to the grid only
    when a step leaves it. In floats, an orbit that lands exactly on a
    repelling cycle is a rounding artifact.
    """

    x: Real = Fraction(round(x0 * GRID_PRIME), GRID_PRIME) if on_grid else float(x0)
    all_logs: list[float] = []
    letters: list[int] = []
    seen: dict[float, int] | None = None if on_grid else {float(x0): 0}
    for k in range(burn_in + n):
        letter = _orbit_letter(part, x)
        d = abs(float(fmap.pieces[fmap.piece_index(x)].branch.derivative(x, 1)))
        if letter is None or d == 0.0:
            return None
        all_logs.append(math.log(d))
        if k >= burn_in:
            letters.append(letter)
        x = fmap(x)
        if on_grid:
            if x.denominator > GRID_PRIME:  # type: ignore[union-attr]
                x = Fraction(round(x * GRID_PRIME), GRID_PRIME)
        elif seen is not None:
            x = min(max(float(x), 0.0), 1.0)
            j = seen.get(x)
            if j is not None:
                if sum(all_logs[j:]) > 0:
                    return None
                seen = None
            else:
                seen[x] = k + 1
        else:
            x = min(max(float(x), 0.0), 1.0)
    return all_logs[burn_in:], letters


def _block_growth(letters: Sequence[int], m: int) -> float:
    """log #W(m) - log #W(m-1) for the distinct letter blocks W(k) of length k."""

    def _blocks(k: int) -> int:
        return len({tuple(letters[i : i + k]) for i in range(len(letters) - k + 1)})

    if len(letters) < m:
        return 0.0
    return math.log(_blocks(m)) - math.log(_blocks(m - 1)) if m > 1 else math.log(_blocks(1))


def ruelle_check(
    fmap: PiecewiseMonotoneMap,
    samples: Sequence[float] | None = None,
    *,
    n: int = 2000,
    burn_in: int = 100,
    window: int = 6,
    seed: int = 0,
    h_estimate: float | None = None,
    tol: float = 0.05,
) -> RuelleReport:
    """Orbit-average Lyapunov exponent against an entropy estimate (diagnostic only).

    Without `h_estimate` the entropy is the growth rate of distinct itinerary
    blocks of length `window` along the orbits. Exact piecewise-affine maps
    are iterated in `Fraction` on a prime-denominator grid; other maps run in
    floats. Orbits hitting a critical point, or collapsing in floats onto a
    repelling cycle, restart from a fresh random point; after ten failed
    restarts the orbit is dropped.
    """

    part = natural_partition(fmap)
    on_grid = fmap.exact and fmap.piecewise_linear
    rng = np.random.default_rng(seed)
    starts = list(samples) if samples is not None else list(rng.uniform(0.0, 1.0, size=4))
    lyaps: list[float] = []
    proxies: list[float] = []
    resampled = dropped = 0
    for x0 in starts:
        run = None
        for _attempt in range(10):
            run = _sample_orbit(fmap, part, float(x0), n, burn_in, on_grid)
            if run is not None:
                break
            resampled += 1
            x0 = float(rng.uniform(0.0, 1.0))
        if run is None:
            dropped += 1
            continue
        logs, letters = run
        lyaps.append(float(np.mean(logs)))
        proxies.append(_block_growth(letters, window))

    if dropped:
        logger.warning("ruelle_check dropped %d of %d orbits after repeated restarts", dropped, len(starts))
    lyap = float(np.mean(lyaps)) if lyaps else 0.0
    proxy = float(np.mean(proxies)) if proxies else 0.0
    h = proxy if h_estimate is None else h_estimate
    return RuelleReport(
        lyapunov=lyap,
        entropy_proxy=proxy,
        h_estimate=h,
        consistent=h <= max(lyap, 0.0) + tol,
        resampled=resampled,
        dropped=dropped,
    )


@dataclass(frozen=True)
class CriticalClusterReport:
    eps0: float
    max_in_window: int
    allowed: int
    lap_bound: int
    flat_points: tuple[Real, ...]

    @property
    def within_claim(self) -> bool:
        return self.max_in_window <= self.allowed


def critical_cluster_check(fmap: PiecewiseMonotoneMap, r: float, eps0: float) -> CriticalClusterReport:
    """Most critical points in a window of radius eps0, against ⌈r⌉ - 1."""

    if eps0 <= 0:
        raise ValueError("eps0 must be > 0")
    crit = critical_set(fmap)
    pts = sorted([float(p) for p in crit.points] + [float(iv.lo) for iv in crit.intervals])
    most = 0
    j = 0
    for i, x in enumerate(pts):
        while pts[j] < x - 2 * eps0:
            j += 1
        most = max(most, i - j + 1)
    return CriticalClusterReport(
        eps0=eps0,
        max_in_window=most,
        allowed=math.ceil(r) - 1,
        lap_bound=int(math.floor(r / eps0)) + 1,
        flat_points=flat_critical_points(fmap, r),
    )


@dataclass(frozen=True)
class IterateReport:
    m: int
    h_iterate: float
    m_times_h: float


def entropy_of_iterate(fmap: PiecewiseMonotoneMap, m: int, n_max: int) -> IterateReport:
    """h(f^m) from the laps of f^(m·n), compared with m·h(f)."""

    if m < 1:
        raise ValueError("m must be >= 1")
    counts = lap_counts(fmap, m * n_max, partial=True)
    iterate_counts = counts[m - 1 :: m]
    m_times_h = m * max(_log_slope(counts), 0.0)
    if not iterate_counts:
        logger.warning("lap budget ended before f^%d; h(f^%d) falls back to %d·h(f)", m, m, m)
        return IterateReport(m=m, h_iterate=m_times_h, m_times_h=m_times_h)
    return IterateReport(m=m, h_iterate=max(_log_slope(iterate_counts), 0.0), m_times_h=m_times_h)
