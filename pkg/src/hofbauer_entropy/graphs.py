"""Finite oriented graphs: periods, closed-path counts, first returns and entropies.

All path counts are Python ints; logarithms are taken only at the end.
Vertex ids are strings (ids read from files are normalized with `str`).
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from hofbauer_entropy.core.errors import ConnectivityError, GraphError, MissingTagsError, NoCycleError
from hofbauer_entropy.core.tolerances import eps_eig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrientedGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    tags: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        known = set(self.vertices)
        seen: set[tuple[str, str]] = set()
        succ: dict[str, list[str]] = {v: [] for v in self.vertices}
        pred: dict[str, list[str]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            if a not in known or b not in known:
                raise GraphError(f"edge ({a}, {b}) has an unknown endpoint")
            if (a, b) in seen:
                raise GraphError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            succ[a].append(b)
            pred[b].append(a)
        for v in self.tags:
            if v not in known:
                raise GraphError(f"tags given for unknown vertex {v}")
        object.__setattr__(self, "_succ", {v: tuple(ws) for v, ws in succ.items()})
        object.__setattr__(self, "_pred", {v: tuple(ws) for v, ws in pred.items()})
        object.__setattr__(self, "_order", {v: i for i, v in enumerate(self.vertices)})

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[Any, Any]],
        *,
        vertices: Iterable[Any] | None = None,
        tags: Mapping[Any, Iterable[str]] | None = None,
    ) -> OrientedGraph:
        es = [(str(a), str(b)) for a, b in edges]
        vs: list[str] = [str(v) for v in vertices] if vertices is not None else []
        for a, b in es:
            for v in (a, b):
                if v not in vs:
                    vs.append(v)
        tg = {str(k): tuple(v) for k, v in (tags or {}).items()}
        return cls(vertices=tuple(vs), edges=tuple(es), tags=tg)

    def successors(self, v: str) -> tuple[str, ...]:
        return self._succ[v]  # type: ignore[attr-defined]

    def predecessors(self, v: str) -> tuple[str, ...]:
        return self._pred[v]  # type: ignore[attr-defined]

    def has_vertex(self, v: str) -> bool:
        return v in self._order  # type: ignore[attr-defined]

    def order(self, v: str) -> int:
        return self._order[v]  # type: ignore[attr-defined]

    def tagged(self, tag: str) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if tag in self.tags.get(v, ()))

    def subgraph(self, keep: Iterable[str]) -> OrientedGraph:
        ks = set(keep)
        vs = tuple(v for v in self.vertices if v in ks)
        es = tuple((a, b) for a, b in self.edges if a in ks and b in ks)
        return OrientedGraph(vertices=vs, edges=es, tags={v: t for v, t in self.tags.items() if v in ks})

    def adjacency(self, component: Sequence[str] | None = None) -> np.ndarray:
        vs = list(component) if component is not None else list(self.vertices)
        idx = {v: i for i, v in enumerate(vs)}
        a = np.zeros((len(vs), len(vs)))
        for v in vs:
            for w in self.successors(v):
                if w in idx:
                    a[idx[v], idx[w]] = 1.0
        return a


@dataclass(frozen=True)
class ClosedPath:
    vertices: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphError("a path has at least one vertex")
        if self.vertices[0] != self.vertices[-1]:
            raise GraphError(f"path {self.vertices} is not closed")

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def base(self) -> str:
        return self.vertices[0]

    def concat(self, other: ClosedPath) -> ClosedPath:
        if other.base != self.base:
            raise GraphError("closed paths at different vertices cannot be concatenated")
        return ClosedPath(self.vertices + other.vertices[1:])

    def first_returns(self) -> list[ClosedPath]:
        u = self.base
        cuts = [k for k, v in enumerate(self.vertices) if v == u]
        return [ClosedPath(self.vertices[s : e + 1]) for s, e in zip(cuts, cuts[1:])]


# Structure.


def strongly_connected_components(g: OrientedGraph) -> list[tuple[str, ...]]:
    """Tarjan's algorithm without recursion; vertices inside a component keep graph order."""

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    comps: list[tuple[str, ...]] = []
    counter = 0

    for root in g.vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work: list[tuple[str, Iterator[str]]] = [(root, iter(g.successors(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp: list[str] = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp, key=g.order)))
    return comps


def _is_cyclic(g: OrientedGraph, comp: Sequence[str]) -> bool:
    return len(comp) > 1 or comp[0] in g.successors(comp[0])


def cyclic_components(g: OrientedGraph) -> list[tuple[str, ...]]:
    return [c for c in strongly_connected_components(g) if _is_cyclic(g, c)]


def is_strongly_connected(g: OrientedGraph) -> bool:
    comps = strongly_connected_components(g)
    return len(comps) == 1 and _is_cyclic(g, comps[0])


def component_period(g: OrientedGraph, comp: Sequence[str]) -> int:
    members = set(comp)
    level = {comp[0]: 0}
    queue = deque([comp[0]])
    while queue:
        v = queue.popleft()
        for w in g.successors(v):
            if w in members and w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    d = 0
    for v in comp:
        for w in g.successors(v):
            if w in members:
                d = math.gcd(d, abs(level[v] + 1 - level[w]))
    return d


def period(g: OrientedGraph) -> int | None:
    """gcd of closed-path lengths; None when the graph has no closed path."""

    d = 0
    for comp in cyclic_components(g):
        d = math.gcd(d, component_period(g, comp))
    return d or None


def _component_of(g: OrientedGraph, u: str) -> tuple[str, ...]:
    _require_vertex(g, u)
    for comp in strongly_connected_components(g):
        if u in comp:
            if not _is_cyclic(g, comp):
                raise NoCycleError(f"vertex {u} lies on no cycle")
            return comp
    raise NoCycleError(f"vertex {u} lies on no cycle")


def vertex_period(g: OrientedGraph, u: str) -> int:
    return component_period(g, _component_of(g, u))


def _require_vertex(g: OrientedGraph, u: str) -> None:
    if not g.has_vertex(u):
        raise GraphError(f"unknown vertex {u}")


# Counting.


def _step(g: OrientedGraph, vec: Mapping[str, int], *, avoid: str | None = None) -> dict[str, int]:
    out: dict[str, int] = defaultdict(int)
    for v, c in vec.items():
        for w in g.successors(v):
            if w != avoid:
                out[w] += c
    return out


def closed_counts(g: OrientedGraph, u: str, p_max: int) -> list[int]:
    """#Δ_p^u for p = 0..p_max (the empty path counts once at p = 0)."""

    _require_vertex(g, u)
    vec: dict[str, int] = {u: 1}
    counts = [1]
    for _ in range(p_max):
        vec = _step(g, vec)
        counts.append(vec.get(u, 0))
    return counts


def count_closed(g: OrientedGraph, u: str, p: int) -> int:
    if p < 1:
        raise ValueError("p must be >= 1")
    return closed_counts(g, u, p)[p]


def first_return_counts(g: OrientedGraph, u: str, L_max: int) -> list[int]:
    """Number of first returns to u of each length 1..L_max."""

    if L_max < 1:
        raise ValueError("L_max must be >= 1")
    _require_vertex(g, u)
    counts = [1 if u in g.successors(u) else 0]
    vec: dict[str, int] = {w: 1 for w in g.successors(u) if w != u}
    for _ in range(2, L_max + 1):
        counts.append(sum(c for v, c in vec.items() if u in g.successors(v)))
        vec = _step(g, vec, avoid=u)
    return counts


def bounded_counts(g: OrientedGraph, u: str, p_max: int, M: int | None) -> list[int]:
    """#Δ_{p,M}^u for p = 0..p_max; M=None means no bound on return lengths."""

    if M is not None and M < 1:
        raise ValueError("M must be >= 1")
    f = first_return_counts(g, u, max(p_max, 1))
    bound = p_max if M is None else min(M, p_max)
    c = [1]
    for p in range(1, p_max + 1):
        c.append(sum(f[q - 1] * c[p - q] for q in range(1, min(p, bound) + 1)))
    return c


def count_closed_bounded(g: OrientedGraph, u: str, p: int, M: int | None) -> int:
    if p < 1:
        raise ValueError("p must be >= 1")
    return bounded_counts(g, u, p, M)[p]


def enumerate_closed_paths(g: OrientedGraph, u: str, p: int) -> Iterator[ClosedPath]:
    """Every closed path of length p at u, by depth-first search."""

    _require_vertex(g, u)
    if p == 0:
        yield ClosedPath((u,))
        return
    path = [u]

    def _walk(depth: int) -> Iterator[ClosedPath]:
        v = path[-1]
        for w in g.successors(v):
            if depth + 1 == p:
                if w == u:
                    yield ClosedPath(tuple(path) + (u,))
                continue
            path.append(w)
            yield from _walk(depth + 1)
            path.pop()

    yield from _walk(0)


def returns_count(path: ClosedPath, u: str) -> int:
    """r(γ): visits to u at positions 1..p (1-based), the start included."""

    return sum(1 for v in path.vertices[:-1] if v == u)


@dataclass(frozen=True)
class PhiDecomposition:
    short: ClosedPath
    long: ClosedPath
    long_starts: frozenset[int]


def phi_decompose(path: ClosedPath, u: str, M: int) -> PhiDecomposition:
    """Split a closed path at u into its short (≤ M) and long (> M) first returns.

    `long_starts` holds the 1-based positions where long returns begin; the
    triple determines the path.
    """

    if M < 1:
        raise ValueError("M must be >= 1")
    if path.base != u:
        raise GraphError(f"path is not closed at {u}")
    short = ClosedPath((u,))
    long = ClosedPath((u,))
    starts: set[int] = set()
    pos = 1
    for ret in path.first_returns():
        if ret.length <= M:
            short = short.concat(ret)
        else:
            long = long.concat(ret)
            starts.add(pos)
        pos += ret.length
    return PhiDecomposition(short=short, long=long, long_starts=frozenset(starts))


def phi_compose(dec: PhiDecomposition, u: str, M: int) -> ClosedPath:
    """Inverse of `phi_decompose`."""

    shorts = deque(dec.short.first_returns())
    longs = deque(dec.long.first_returns())
    out = ClosedPath((u,))
    pos = 1
    total = dec.short.length + dec.long.length
    while pos <= total:
        queue = longs if pos in dec.long_starts else shorts
        if not queue:
            raise GraphError(f"decomposition is inconsistent at position {pos}")
        ret = queue.popleft()
        out = out.concat(ret)
        pos += ret.length
    if shorts or longs:
        raise GraphError("decomposition has unused returns")
    return out


@dataclass(frozen=True)
class ReturnCountBound:
    p: int
    M: int
    eps: float
    exhaustive: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.exhaustive <= self.bound


def return_counting_bound(g: OrientedGraph, u: str, p: int, M: int, eps: float) -> ReturnCountBound:
    """Compare #{γ ∈ Δ_p^u : r(γ) ≥ pε} with its bound through Φ.

    A path with many returns has a short part of length q ≥ pε − p/M; Φ
    embeds those paths into (short, long, start set) triples.
    """

    threshold = p * eps
    exhaustive = sum(1 for path in enumerate_closed_paths(g, u, p) if returns_count(path, u) >= threshold)
    short = bounded_counts(g, u, p, M)
    full = closed_counts(g, u, p)
    subsets = sum(math.comb(p, j) for j in range(0, p // M + 1))
    q_min = max(0, math.ceil(threshold - p / M))
    bound = sum(short[q] * full[p - q] for q in range(q_min, p + 1)) * subsets
    return ReturnCountBound(p=p, M=M, eps=eps, exhaustive=exhaustive, bound=bound)


# Entropies.


@dataclass(frozen=True)
class GurevicEstimate:
    vertex: str
    period: int
    sequence: tuple[tuple[int, float], ...]  # (p, (1/p) log #Δ_p^u)
    last: float
    aitken: float | None
    estimate: float
    lower_bound_only: bool

    @property
    def value(self) -> float:
        return self.estimate


def _aitken(xs: Sequence[float]) -> float | None:
    if len(xs) < 3:
        return None
    x0, x1, x2 = xs[-3:]
    denom = x2 - 2 * x1 + x0
    if abs(denom) < 1e-300:
        return x2
    return x2 - (x2 - x1) ** 2 / denom


def gurevic_entropy(g: OrientedGraph, u: str, p_max: int) -> GurevicEstimate:
    """Growth rate of closed paths at u along multiples of u's period.

    `estimate` is the log-ratio of the last two counts, which removes the
    O(1/p) bias of the raw sequence. When the graph is not strongly
    connected the value bounds h(graph) from below only.
    """

    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    d = vertex_period(g, u)
    counts = closed_counts(g, u, p_max)
    seq = tuple((p, math.log(counts[p]) / p) for p in range(d, p_max + 1, d) if counts[p] > 0)
    if not seq:
        raise NoCycleError(f"no closed path at {u} up to length {p_max}")
    values = [v for _, v in seq]
    last_p = seq[-1][0]
    estimate = values[-1]
    if last_p - d >= d and counts[last_p - d] > 0:
        estimate = math.log(counts[last_p] / counts[last_p - d]) / d
    return GurevicEstimate(
        vertex=u,
        period=d,
        sequence=seq,
        last=values[-1],
        aitken=_aitken(values),
        estimate=max(estimate, 0.0),
        lower_bound_only=not is_strongly_connected(g),
    )


def _perron_root(g: OrientedGraph, comp: Sequence[str]) -> float:
    members = set(comp)
    sums = {sum(1 for w in g.successors(v) if w in members) for v in comp}
    if len(sums) == 1:
        return float(sums.pop())
    eig = np.linalg.eigvals(g.adjacency(comp))
    return float(np.max(np.abs(eig)))


@dataclass(frozen=True)
class GraphEntropy:
    value: float
    component: tuple[str, ...]
    has_cycle: bool


def entropy_of_graph(g: OrientedGraph) -> GraphEntropy:
    """Largest log spectral radius over strongly connected components."""

    best = GraphEntropy(value=0.0, component=(), has_cycle=False)
    for comp in cyclic_components(g):
        h = math.log(_perron_root(g, comp))
        if not best.has_cycle or h > best.value:
            best = GraphEntropy(value=max(h, 0.0), component=comp, has_cycle=True)
    return best


def spectral_entropy(g: OrientedGraph) -> float:
    """log spectral radius; 0.0 for a graph without cycles (see `entropy_of_graph`)."""

    return entropy_of_graph(g).value


@dataclass(frozen=True)
class ParryMeasure:
    vertex_probs: Mapping[str, float]
    transitions: Mapping[tuple[str, str], float]
    eigenvalue: float
    entropy: float


def _perron_vector(a: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eig(a)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    v = v / v.sum()
    # Power iteration on A + I is primitive for irreducible A and sharpens the LAPACK vector.
    b = a + np.eye(len(a))
    tol = eps_eig()
    for it in range(10000):
        w = b @ v
        w = w / w.sum()
        if np.max(np.abs(w - v)) <= tol:
            v = w
            logger.debug("perron polish converged after %d iterations", it + 1)
            break
        v = w
    lam = float((a @ v).sum() / v.sum())
    return lam, v


def parry_measure(g: OrientedGraph) -> ParryMeasure:
    comps = strongly_connected_components(g)
    if len(comps) != 1:
        raise ConnectivityError(f"graph has {len(comps)} strongly connected components; Parry measure needs one")
    if not _is_cyclic(g, comps[0]):
        raise NoCycleError("graph has no cycle")

    a = g.adjacency()
    lam, right = _perron_vector(a)
    _, left = _perron_vector(a.T)
    pi = left * right
    pi = pi / pi.sum()
    idx = {v: i for i, v in enumerate(g.vertices)}
    probs = {v: float(pi[idx[v]]) for v in g.vertices}
    trans = {(v, w): float(right[idx[w]] / (lam * right[idx[v]])) for v, w in g.edges}
    return ParryMeasure(vertex_probs=probs, transitions=trans, eigenvalue=lam, entropy=math.log(lam))


def markov_entropy(measure: ParryMeasure) -> float:
    """Entropy of the Markov chain -Σ π_v P_vw log P_vw."""

    h = 0.0
    for (v, _w), pr in measure.transitions.items():
        if pr > 0:
            h -= measure.vertex_probs[v] * pr * math.log(pr)
    return h


def mass_on(measure: ParryMeasure, F: Iterable[str]) -> float:
    total = 0.0
    for v in set(F):
        if v not in measure.vertex_probs:
            raise GraphError(f"unknown vertex {v}")
        total += measure.vertex_probs[v]
    return total


def bowen_empirical(g: OrientedGraph, p: int, *, base: str | None = None) -> dict[str, float]:
    """Average visit frequencies over all closed paths of length p.

    With `base=None` the paths start anywhere, and cyclic shifts give
    mass_v = (A^p)_vv / trace(A^p). With a base vertex u only paths at u are
    counted, via forward/backward path counts.
    """

    if p < 1:
        raise ValueError("p must be >= 1")
    d = period(g)
    if d is None:
        raise NoCycleError("graph has no cycle")
    if p % d:
        raise GraphError(f"p={p} is not a multiple of the period {d}")

    if base is None:
        diag = {v: closed_counts(g, v, p)[p] for v in g.vertices}
        total = sum(diag.values())
        if total == 0:
            raise GraphError(f"no closed paths of length {p}")
        return {v: float(Fraction(c, total)) for v, c in diag.items()}

    _require_vertex(g, base)
    forward: list[dict[str, int]] = [{base: 1}]
    for _ in range(p):
        forward.append(_step(g, forward[-1]))
    reverse = OrientedGraph(vertices=g.vertices, edges=tuple((b, a) for a, b in g.edges))
    backward: list[dict[str, int]] = [{base: 1}]
    for _ in range(p):
        backward.append(_step(reverse, backward[-1]))
    total = forward[p].get(base, 0)
    if total == 0:
        raise GraphError(f"no closed paths of length {p} at {base}")
    mass: dict[str, int] = defaultdict(int)
    for k in range(p):
        for v, c in forward[k].items():
            mass[v] += c * backward[p - k].get(v, 0)
    return {v: float(Fraction(mass.get(v, 0), p * total)) for v in g.vertices}


def total_variation(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


# Convergence of graph sequences.


@dataclass(frozen=True)
class Violation:
    index: int
    vertex: str
    target: str | None
    p: int
    bounded_count: int
    limit_count: int


@dataclass(frozen=True)
class ConvergenceReport:
    tag: str
    M: int
    p_max: int
    ok: bool
    checked: int
    violations: tuple[Violation, ...]
    tagged_counts: tuple[int, ...]

    @property
    def uniformity_bound(self) -> int:
        return max(self.tagged_counts, default=0)


def _first_violation(bounded: Sequence[int], limit: Sequence[int], p_max: int) -> int | None:
    for p in range(1, p_max + 1):
        if bounded[p] > limit[p]:
            return p
    return None


def check_convergence(
    graph_seq: Sequence[OrientedGraph],
    limit_graph: OrientedGraph,
    *,
    tag: str,
    M: int,
    p_max: int,
    matching: Sequence[Mapping[str, str]] | Mapping[str, str] | None = None,
) -> ConvergenceReport:
    """Check #Δ_{p,M}^{u_n}(G_n) ≤ #Δ_p^u(G) for every vertex u_n tagged `tag`, p ≤ p_max.

    `matching` maps tagged vertices of G_n to vertices of G, either one
    mapping per graph or one shared mapping. Without it every vertex of G is
    tried and the candidate that survives longest is reported.
    """

    if M < 1 or p_max < 1:
        raise ValueError("M and p_max must be >= 1")
    limit_cache: dict[str, list[int]] = {}

    def _limit(u: str) -> list[int]:
        if u not in limit_cache:
            limit_cache[u] = closed_counts(limit_graph, u, p_max)
        return limit_cache[u]

    violations: list[Violation] = []
    tagged_counts: list[int] = []
    checked = 0
    for n, gn in enumerate(graph_seq):
        if not gn.tags:
            raise MissingTagsError(f"graph {n} of the sequence carries no vertex tags")
        tagged = gn.tagged(tag)
        tagged_counts.append(len(tagged))
        if matching is None:
            match_n = None
        elif isinstance(matching, Mapping):
            match_n = matching
        else:
            match_n = matching[n]
        for un in tagged:
            checked += 1
            bounded = bounded_counts(gn, un, p_max, M)
            if match_n is not None:
                target = match_n.get(un)
                if target is None or not limit_graph.has_vertex(target):
                    violations.append(Violation(n, un, target, 0, 0, 0))
                    continue
                p_bad = _first_violation(bounded, _limit(target), p_max)
                if p_bad is not None:
                    violations.append(Violation(n, un, target, p_bad, bounded[p_bad], _limit(target)[p_bad]))
                continue

            best: tuple[int, str] | None = None
            for u in limit_graph.vertices:
                p_bad = _first_violation(bounded, _limit(u), p_max)
                if p_bad is None:
                    best = None
                    break
                if best is None or p_bad > best[0]:
                    best = (p_bad, u)
            else:
                if best is None:
                    violations.append(Violation(n, un, None, 0, 0, 0))
                    continue
                p_bad, u = best
                violations.append(Violation(n, un, u, p_bad, bounded[p_bad], _limit(u)[p_bad]))
    return ConvergenceReport(
        tag=tag,
        M=M,
        p_max=p_max,
        ok=not violations,
        checked=checked,
        violations=tuple(violations),
        tagged_counts=tuple(tagged_counts),
    )


# Files.


def graph_to_payload(g: OrientedGraph, *, meta: Mapping[str, Any] | None = None) -> dict[str, Any]:
    vertices = []
    for v in g.vertices:
        item: dict[str, Any] = {"id": v}
        if g.tags.get(v):
            item["tags"] = list(g.tags[v])
        vertices.append(item)
    payload: dict[str, Any] = {"vertices": vertices, "edges": [[a, b] for a, b in g.edges]}
    if meta:
        payload["meta"] = dict(meta)
    return payload


def graph_from_payload(raw: Mapping[str, Any]) -> OrientedGraph:
    vs_raw = raw.get("vertices")
    es_raw = raw.get("edges")
    if not isinstance(vs_raw, list) or not isinstance(es_raw, list):
        raise GraphError("graph file needs 'vertices' and 'edges' lists")
    vertices: list[str] = []
    tags: dict[str, tuple[str, ...]] = {}
    for item in vs_raw:
        if isinstance(item, dict):
            if "id" not in item:
                raise GraphError("vertex entry without 'id'")
            vid = str(item["id"])
            if item.get("tags"):
                tags[vid] = tuple(str(t) for t in item["tags"])
        else:
            vid = str(item)
        vertices.append(vid)
    edges: list[tuple[str, str]] = []
    for e in es_raw:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise GraphError(f"edge entry must be [from, to], got {e!r}")
        edges.append((str(e[0]), str(e[1])))
    return OrientedGraph(vertices=tuple(vertices), edges=tuple(edges), tags=tags)

