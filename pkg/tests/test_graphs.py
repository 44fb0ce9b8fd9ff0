from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from hofbauer_entropy.core.errors import ConnectivityError, GraphError, MissingTagsError, NoCycleError
from hofbauer_entropy.core.storage import read_json_or_yaml, write_json_atomic
from hofbauer_entropy.graphs import (
    ClosedPath,
    OrientedGraph,
    bowen_empirical,
    check_convergence,
    closed_counts,
    count_closed,
    count_closed_bounded,
    entropy_of_graph,
    enumerate_closed_paths,
    first_return_counts,
    graph_from_payload,
    graph_to_payload,
    gurevic_entropy,
    markov_entropy,
    mass_on,
    parry_measure,
    period,
    phi_compose,
    phi_decompose,
    return_counting_bound,
    returns_count,
    spectral_entropy,
    strongly_connected_components,
    total_variation,
)

LOG_GOLDEN = 0.481212
GOLDEN = OrientedGraph.from_edges([("a", "a"), ("a", "b"), ("b", "a")])


def _cycle(k: int, prefix: str = "c") -> OrientedGraph:
    return OrientedGraph.from_edges([(f"{prefix}{i}", f"{prefix}{(i + 1) % k}") for i in range(k)])


def _complete(k: int) -> OrientedGraph:
    return OrientedGraph.from_edges([(str(i), str(j)) for i in range(k) for j in range(k)])


def _random_graphs(n_graphs: int, seed: int = 7) -> list[OrientedGraph]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_graphs):
        n = int(rng.integers(1, 7))
        edges = [(str(i), str(j)) for i in range(n) for j in range(n) if rng.random() < 0.4]
        out.append(OrientedGraph.from_edges(edges, vertices=range(n)))
    return out


def _max_return(path: ClosedPath) -> int:
    return max((r.length for r in path.first_returns()), default=0)


def test_graph_validation() -> None:
    with pytest.raises(GraphError):
        OrientedGraph(vertices=("a",), edges=(("a", "b"),))
    with pytest.raises(GraphError):
        OrientedGraph(vertices=("a", "a"), edges=())


def test_periods() -> None:
    assert period(_cycle(3)) == 3
    assert period(GOLDEN) == 1
    two_and_four = OrientedGraph.from_edges(list(_cycle(2, "x").edges) + list(_cycle(4, "y").edges))
    assert period(two_and_four) == 2
    assert period(OrientedGraph.from_edges([("a", "b")])) is None


def test_components() -> None:
    g = OrientedGraph.from_edges([("a", "b"), ("b", "a"), ("b", "c"), ("c", "c")])

    comps = strongly_connected_components(g)
    assert sorted(comps) == [("a", "b"), ("c",)]


def test_closed_path_counts() -> None:
    assert closed_counts(GOLDEN, "a", 4)[1:] == [1, 2, 3, 5]
    assert count_closed(OrientedGraph.from_edges([("s", "s")]), "s", 7) == 1
    assert count_closed(_cycle(3), "c0", 3) == 1
    assert count_closed(_cycle(3), "c0", 4) == 0


def test_first_returns() -> None:
    assert first_return_counts(GOLDEN, "a", 4) == [1, 1, 0, 0]
    assert first_return_counts(OrientedGraph.from_edges([("s", "s")]), "s", 3) == [1, 0, 0]
    assert first_return_counts(_cycle(3), "c0", 4) == [0, 0, 1, 0]


def test_bounded_counts() -> None:
    assert all(count_closed_bounded(GOLDEN, "a", p, 1) == 1 for p in range(1, 8))
    assert count_closed_bounded(GOLDEN, "a", 4, 2) == 5
    assert count_closed_bounded(_cycle(3), "c0", 3, 2) == 0


def test_counts_match_enumeration_on_random_graphs() -> None:
    for g in _random_graphs(120):
        for u in g.vertices:
            closed = closed_counts(g, u, 9)
            firsts = first_return_counts(g, u, 9)
            bounded = {M: [count_closed_bounded(g, u, p, M) for p in range(1, 10)] for M in range(1, 6)}
            for p in range(1, 10):
                paths = list(enumerate_closed_paths(g, u, p))
                assert closed[p] == len(paths)
                assert count_closed(g, u, p) == len(paths)
                assert count_closed_bounded(g, u, p, None) == len(paths)
                assert firsts[p - 1] == sum(1 for path in paths if returns_count(path, u) == 1)
                for M in range(1, 6):
                    assert bounded[M][p - 1] == sum(1 for path in paths if _max_return(path) <= M)


def test_phi_is_injective_on_random_graphs() -> None:
    for g in _random_graphs(120):
        for u in g.vertices:
            seen: dict[int, set[tuple]] = {M: set() for M in (1, 2, 3)}
            for p in range(1, 9):
                for path in enumerate_closed_paths(g, u, p):
                    for M, keys in seen.items():
                        dec = phi_decompose(path, u, M)
                        key = (dec.short.vertices, dec.long.vertices, dec.long_starts)
                        assert key not in keys
                        keys.add(key)
                        assert phi_compose(dec, u, M) == path


def test_phi_decomposition_example() -> None:
    dec = phi_decompose(ClosedPath(("a", "a", "b", "a")), "a", 1)

    assert dec.short == ClosedPath(("a", "a"))
    assert dec.long == ClosedPath(("a", "b", "a"))
    assert dec.long_starts == frozenset({2})


def test_phi_decomposition_extremes() -> None:
    shorts = phi_decompose(ClosedPath(("a", "a", "a")), "a", 5)
    assert shorts.long == ClosedPath(("a",))
    assert shorts.long_starts == frozenset()

    one_long = phi_decompose(ClosedPath(("a", "b", "a")), "a", 1)
    assert one_long.short == ClosedPath(("a",))
    assert one_long.long_starts == frozenset({1})


def test_returns_count_and_counting_bound() -> None:
    assert returns_count(ClosedPath(("a", "a", "b", "a")), "a") == 2
    report = return_counting_bound(GOLDEN, "a", 10, 4, 0.5)
    assert report.holds
    assert report.exhaustive > 0


def test_gurevic_entropy() -> None:
    assert gurevic_entropy(GOLDEN, "a", 40).value == pytest.approx(LOG_GOLDEN, abs=0.01)
    assert gurevic_entropy(_complete(3), "0", 40).value == pytest.approx(math.log(3), abs=0.005)
    assert gurevic_entropy(OrientedGraph.from_edges([("s", "s")]), "s", 10).value == pytest.approx(0.0)


def test_gurevic_on_acyclic_vertex() -> None:
    with pytest.raises(NoCycleError):
        gurevic_entropy(OrientedGraph.from_edges([("a", "b")]), "a", 5)


def test_spectral_entropy() -> None:
    assert spectral_entropy(GOLDEN) == pytest.approx(LOG_GOLDEN, abs=1e-6)
    assert spectral_entropy(_complete(4)) == pytest.approx(math.log(4))
    assert spectral_entropy(_cycle(5)) == pytest.approx(0.0)
    assert not entropy_of_graph(OrientedGraph.from_edges([("a", "b")])).has_cycle


def test_parry_measure() -> None:
    mu = parry_measure(GOLDEN)

    assert mu.vertex_probs["a"] == pytest.approx(0.7236, abs=1e-4)
    assert mu.vertex_probs["b"] == pytest.approx(0.2764, abs=1e-4)
    assert markov_entropy(mu) == pytest.approx(LOG_GOLDEN, abs=1e-6)
    assert all(v == pytest.approx(0.25) for v in parry_measure(_complete(4)).vertex_probs.values())
    assert all(v == pytest.approx(1 / 3) for v in parry_measure(_cycle(3)).vertex_probs.values())


def test_parry_measure_is_stationary_and_stochastic() -> None:
    lopsided = OrientedGraph.from_edges([("a", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "b"), ("b", "a")])
    for g in (GOLDEN, _complete(3), _cycle(4), lopsided):
        mu = parry_measure(g)
        for v in g.vertices:
            assert sum(mu.transitions[(v, w)] for w in g.successors(v)) == pytest.approx(1.0)
        for w in g.vertices:
            inflow = sum(mu.vertex_probs[v] * mu.transitions[(v, w)] for v in g.predecessors(w))
            assert inflow == pytest.approx(mu.vertex_probs[w])
        assert sum(mu.vertex_probs.values()) == pytest.approx(1.0)
        assert markov_entropy(mu) == pytest.approx(mu.entropy, abs=1e-9)


def test_parry_needs_a_connected_graph() -> None:
    with pytest.raises(ConnectivityError):
        parry_measure(OrientedGraph.from_edges(list(_cycle(2, "x").edges) + list(_cycle(3, "y").edges)))


def test_mass_on() -> None:
    mu = parry_measure(GOLDEN)

    assert mass_on(mu, ["a", "b"]) == pytest.approx(1.0)
    assert mass_on(mu, []) == 0.0
    assert mass_on(mu, ["a"]) == pytest.approx(0.7236, abs=1e-4)


def test_bowen_equidistribution() -> None:
    empirical = bowen_empirical(GOLDEN, 24)
    assert total_variation(empirical, dict(parry_measure(GOLDEN).vertex_probs)) <= 0.05

    cycle = bowen_empirical(_cycle(4), 4)
    assert all(abs(v - 0.25) <= 1e-12 for v in cycle.values())
    assert bowen_empirical(_complete(2), 10) == {"0": 0.5, "1": 0.5}

    based = bowen_empirical(GOLDEN, 24, base="a")
    assert sum(based.values()) == pytest.approx(1.0)


def test_bowen_rejects_lengths_off_the_period() -> None:
    with pytest.raises(GraphError):
        bowen_empirical(_cycle(3), 4)


def _tag_all(g: OrientedGraph, tag: str = "T") -> OrientedGraph:
    return OrientedGraph(vertices=g.vertices, edges=g.edges, tags={v: (tag,) for v in g.vertices})


def test_convergence_of_constant_sequence() -> None:
    g = _tag_all(GOLDEN)
    ident = {v: v for v in g.vertices}

    for M in (1, 2, 3):
        report = check_convergence([g, g], GOLDEN, tag="T", M=M, p_max=12, matching=ident)
        assert report.ok
        assert report.checked == 4


def test_convergence_of_subgraphs() -> None:
    sub = _tag_all(OrientedGraph.from_edges([("a", "b"), ("b", "a")]))

    report = check_convergence([sub], GOLDEN, tag="T", M=2, p_max=10, matching={"a": "a", "b": "b"})

    assert report.ok


def test_convergence_reports_planted_loop() -> None:
    limit = OrientedGraph.from_edges([("a", "b"), ("b", "a")])
    extra = OrientedGraph(vertices=("a", "b"), edges=(("a", "b"), ("b", "a"), ("a", "a")), tags={"a": ("T",)})

    report = check_convergence([extra], limit, tag="T", M=3, p_max=8, matching={"a": "a"})

    assert not report.ok
    assert report.violations[0].p == 1
    assert report.uniformity_bound == 1


def test_convergence_needs_tags() -> None:
    with pytest.raises(MissingTagsError):
        check_convergence([GOLDEN], GOLDEN, tag="T", M=1, p_max=3)


def test_graph_file_round_trip(tmp_path: Path) -> None:
    g = OrientedGraph(vertices=("a", "b"), edges=GOLDEN.edges, tags={"a": ("E_2_1",)})
    path = tmp_path / "g.json"
    write_json_atomic(path, graph_to_payload(g, meta={"name": "golden"}))

    assert graph_from_payload(read_json_or_yaml(path)) == g
