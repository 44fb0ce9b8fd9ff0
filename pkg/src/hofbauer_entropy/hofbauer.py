"""Truncated Buzzi-Hofbauer diagrams D_N.

A vertex is identified by (last letter, image interval) of its shortest
admissible word. Breadth-first construction from the one-letter words
discovers every class through a shortest word first, so the stored depth is
minimal and D_N is a subgraph of D_(N+1).
"""

from __future__ import annotations

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from hofbauer_entropy.core.errors import RepresentationError
from hofbauer_entropy.graphs import OrientedGraph
from hofbauer_entropy.intervals import Interval, Real, to_exact
from hofbauer_entropy.maps import NaturalPartition, PiecewiseMonotoneMap, natural_partition, sup_deriv_norm
from hofbauer_entropy.symbolic import Word, branch_image

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiagramVertex:
    id: int
    word: Word
    image: Interval

    @property
    def base(self) -> int:
        return self.word.letters[-1]

    @property
    def depth(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class HofbauerDiagram:
    vertices: tuple[DiagramVertex, ...]
    edges: tuple[tuple[int, int], ...]
    N: int
    map_name: str = "map"

    def vertex(self, vid: int) -> DiagramVertex:
        return self.vertices[vid]

    def successors(self, vid: int) -> list[int]:
        return [b for a, b in self.edges if a == vid]

    def truncate(self, N: int) -> HofbauerDiagram:
        """D_N of a deeper diagram; ids are kept since discovery order is breadth-first."""

        keep = [v for v in self.vertices if v.depth <= N]
        ids = {v.id for v in keep}
        return HofbauerDiagram(
            vertices=tuple(keep),
            edges=tuple((a, b) for a, b in self.edges if a in ids and b in ids),
            N=N,
            map_name=self.map_name,
        )


def build_diagram(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, N: int) -> HofbauerDiagram:
    if N < 1:
        raise ValueError("N must be >= 1")
    if len(partition) == 0:
        raise RepresentationError("natural partition is empty")

    vertices: list[DiagramVertex] = []
    by_key: dict[tuple[int, tuple], int] = {}
    edges: list[tuple[int, int]] = []
    queue: deque[int] = deque()

    def _add(w: Word, image: Interval) -> int:
        vid = len(vertices)
        vertices.append(DiagramVertex(id=vid, word=w, image=image))
        by_key[(w.letters[-1], image.key())] = vid
        queue.append(vid)
        return vid

    for a in range(len(partition)):
        image = branch_image(fmap, partition, a)
        if not image.is_empty:
            _add(Word((a,)), image)

    dropped = 0
    while queue:
        vid = queue.popleft()
        v = vertices[vid]
        for b in range(len(partition)):
            image = branch_image(fmap, partition, b, v.image)
            if image.is_empty:
                continue
            target = by_key.get((b, image.key()))
            if target is None:
                if v.depth + 1 > N:
                    dropped += 1
                    continue
                target = _add(v.word.extend(b), image)
            edges.append((vid, target))

    logger.info("built D_%d of %s: %d vertices, %d edges (%d truncated)", N, fmap.name, len(vertices), len(edges), dropped)
    return HofbauerDiagram(vertices=tuple(vertices), edges=tuple(edges), N=N, map_name=fmap.name)


def vertex_L(vertex: DiagramVertex) -> Real:
    return vertex.image.length


def in_E_NK(vertex: DiagramVertex, N: int, K: int) -> bool:
    if K < 1:
        raise ValueError("K must be >= 1")
    threshold = Fraction(1, K) if vertex.image.exact else 1.0 / K
    return vertex.depth <= N and vertex_L(vertex) >= threshold


def branch_deriv_sups(fmap: PiecewiseMonotoneMap, partition: NaturalPartition) -> list[float]:
    """sup |f'| over the closure of each branch, from per-piece maxima."""

    sups: list[float] = []
    for b in partition.branches:
        best = 0.0
        for pc in fmap.pieces:
            lo, hi = max(pc.lo, b.lo), min(pc.hi, b.hi)
            if lo < hi:
                best = max(best, pc.branch.deriv_sup(lo, hi))
        sups.append(best)
    return sups


def partition_subset_Pm(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, m: int) -> tuple[int, ...]:
    """Branches on which |f'| reaches 1/m."""

    if m < 1:
        raise ValueError("m must be >= 1")
    return tuple(i for i, s in enumerate(branch_deriv_sups(fmap, partition)) if s >= 1.0 / m)


def tag_name(N: int, K: int) -> str:
    return f"E_{N}_{K}"


def tag_vertices(diagram: HofbauerDiagram, N: int, K: int) -> dict[int, tuple[str, ...]]:
    name = tag_name(N, K)
    return {v.id: ((name,) if in_E_NK(v, N, K) else ()) for v in diagram.vertices}


def to_graph(diagram: HofbauerDiagram, N: int | None = None, K: int | None = None) -> OrientedGraph:
    """The diagram as an `OrientedGraph`; with K given, E_{N,K} members are tagged."""

    tags: dict[str, tuple[str, ...]] = {}
    if K is not None:
        n = diagram.N if N is None else N
        tags = {str(vid): t for vid, t in tag_vertices(diagram, n, K).items() if t}
    return OrientedGraph(
        vertices=tuple(str(v.id) for v in diagram.vertices),
        edges=tuple((str(a), str(b)) for a, b in diagram.edges),
        tags=tags,
    )


def enlarged_parameters(N: int, K: int, M: int, sup_norm: float) -> tuple[int, int]:
    """(N', K') such that M steps from E_{N,K} stay inside E_{N',K'}."""

    return N + M, int(math.floor(K * max(1.0, sup_norm) ** M)) + 1


def derivative_threshold(N: int, K: int, sup_norm: float) -> int:
    """Smallest integer m > K·max(1, ||f'||)^N."""

    return int(math.floor(K * max(1.0, sup_norm) ** N)) + 1


def restricted_vertices(
    diagram: HofbauerDiagram, fmap: PiecewiseMonotoneMap, partition: NaturalPartition, m: int
) -> tuple[DiagramVertex, ...]:
    allowed = set(partition_subset_Pm(fmap, partition, m))
    return tuple(v for v in diagram.vertices if set(v.word.letters) <= allowed)


def e_nk_count_bound(n_letters: int, N: int) -> int:
    return sum(n_letters**k for k in range(1, N + 1))


@dataclass(frozen=True)
class UniformityReport:
    N: int
    K: int
    counts: tuple[int, ...]
    bounds: tuple[int, ...]

    @property
    def max_count(self) -> int:
        return max(self.counts, default=0)

    @property
    def within_bound(self) -> bool:
        return all(c <= b for c, b in zip(self.counts, self.bounds))


def uniformity_report(family: Sequence[PiecewiseMonotoneMap], N: int, K: int) -> UniformityReport:
    """#(V ∩ E_{N,K}) across a family of maps against the letter-count bound."""

    counts: list[int] = []
    bounds: list[int] = []
    for fmap in family:
        part = natural_partition(fmap)
        diagram = build_diagram(fmap, part, N)
        m = derivative_threshold(N, K, sup_deriv_norm(fmap, 1))
        counts.append(sum(1 for v in diagram.vertices if in_E_NK(v, N, K)))
        bounds.append(e_nk_count_bound(len(partition_subset_Pm(fmap, part, m)), N))
    return UniformityReport(N=N, K=K, counts=tuple(counts), bounds=tuple(bounds))


def tag_histogram(diagram: HofbauerDiagram, K_values: Sequence[int]) -> dict[int, int]:
    return {K: sum(1 for v in diagram.vertices if in_E_NK(v, diagram.N, K)) for K in K_values}


def depth_histogram(diagram: HofbauerDiagram) -> dict[int, int]:
    return dict(sorted(Counter(v.depth for v in diagram.vertices).items()))


def diagram_to_payload(diagram: HofbauerDiagram) -> dict[str, Any]:
    return {
        "vertices": [
            {
                "id": v.id,
                "base": v.base,
                "interval": [v.image.lo, v.image.hi],
                "depth": v.depth,
                "word": list(v.word.letters),
            }
            for v in diagram.vertices
        ],
        "edges": [[a, b] for a, b in diagram.edges],
        "meta": {"map": diagram.map_name, "N": diagram.N},
    }


def diagram_from_payload(raw: Mapping[str, Any]) -> HofbauerDiagram:
    meta = raw.get("meta") or {}
    vertices = []
    for i, item in enumerate(raw.get("vertices") or []):
        if int(item["id"]) != i:
            raise RepresentationError("diagram vertex ids must be dense and in order")
        lo, hi = (to_exact(x) if isinstance(x, (str, int)) else float(x) for x in item["interval"])
        letters = tuple(int(a) for a in item.get("word") or [item["base"]])
        vertices.append(DiagramVertex(id=i, word=Word(letters), image=Interval(lo, hi)))
    edges = tuple((int(a), int(b)) for a, b in raw.get("edges") or [])
    return HofbauerDiagram(
        vertices=tuple(vertices),
        edges=edges,
        N=int(meta.get("N", max((v.depth for v in vertices), default=1))),
        map_name=str(meta.get("map", "map")),
    )
