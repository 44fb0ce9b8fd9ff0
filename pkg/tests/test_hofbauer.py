from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hofbauer_entropy.core.storage import read_json_or_yaml, write_json_atomic
from hofbauer_entropy.hofbauer import (
    build_diagram,
    depth_histogram,
    derivative_threshold,
    diagram_from_payload,
    diagram_to_payload,
    e_nk_count_bound,
    enlarged_parameters,
    in_E_NK,
    partition_subset_Pm,
    restricted_vertices,
    tag_histogram,
    to_graph,
    uniformity_report,
    vertex_L,
)
from hofbauer_entropy.intervals import UNIT, Interval
from hofbauer_entropy.maps import identity, logistic, natural_partition, piecewise_linear, sup_deriv_norm, tent


def _diagram(fmap, N: int):
    return build_diagram(fmap, natural_partition(fmap), N)


def test_full_tent_depth_one() -> None:
    d = _diagram(tent(2), 1)

    assert len(d.vertices) == 2
    assert all(v.image == UNIT for v in d.vertices)
    assert sorted(d.edges) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_identity_diagram_is_a_single_loop() -> None:
    d = _diagram(identity(), 3)

    assert len(d.vertices) == 1
    assert d.edges == ((0, 0),)


def test_tent_one_and_a_half_depth_two() -> None:
    d = _diagram(tent("1.5"), 2)

    images = [v.image for v in d.vertices]
    assert images[:2] == [Interval(Fraction(0), Fraction(3, 4))] * 2
    assert images[2] == Interval(Fraction(3, 8), Fraction(3, 4))
    assert d.vertices[2].word.letters == (0, 1)
    assert sorted(d.edges) == [(0, 0), (0, 2), (1, 0), (1, 2), (2, 2)]
    assert depth_histogram(d) == {1: 2, 2: 1}


def test_vertex_lengths_and_tags() -> None:
    d = _diagram(tent(2), 1)
    v = d.vertex(0)

    assert vertex_L(v) == 1
    assert vertex_L(_diagram(tent("1.5"), 1).vertex(0)) == Fraction(3, 4)
    assert in_E_NK(v, 1, 1)
    assert in_E_NK(v, 1, 2)
    assert tag_histogram(d, [1, 2]) == {1: 2, 2: 2}


def test_depth_beyond_N_is_outside_E_NK() -> None:
    d = _diagram(tent("1.5"), 3)
    deep = [v for v in d.vertices if v.depth == 3]

    assert deep
    assert not in_E_NK(deep[0], 2, 1)
    with pytest.raises(ValueError):
        in_E_NK(deep[0], 3, 0)


def test_short_interval_fails_length_threshold() -> None:
    d = _diagram(tent("1.5"), 2)
    # L = 3/8 < 1/2
    assert not in_E_NK(d.vertex(2), 2, 2)
    assert in_E_NK(d.vertex(2), 2, 3)


def test_truncation_matches_direct_construction() -> None:
    fmap = tent("1.5")
    assert _diagram(fmap, 5).truncate(2) == _diagram(fmap, 2)


def test_partition_subsets() -> None:
    assert partition_subset_Pm(tent(2), natural_partition(tent(2)), 1) == (0, 1)
    assert partition_subset_Pm(logistic(4), natural_partition(logistic(4)), 1) == (0, 1)

    fmap = piecewise_linear([(0, 1), ("1/2", 0), (1, "1/40")])
    assert partition_subset_Pm(fmap, natural_partition(fmap), 10) == (0,)
    d = _diagram(fmap, 3)
    assert all(set(v.word.letters) == {0} for v in restricted_vertices(d, fmap, natural_partition(fmap), 10))


def test_e_nk_letters_lie_in_the_derivative_subset() -> None:
    flat_right = piecewise_linear([(0, 1), ("1/2", 0), (1, "1/40")])
    for fmap in (tent(2), tent("1.5"), logistic(4), flat_right):
        part = natural_partition(fmap)
        norm = sup_deriv_norm(fmap, 1)
        d = _diagram(fmap, 4)
        for N in (2, 3, 4):
            for K in (1, 2, 3):
                allowed = set(partition_subset_Pm(fmap, part, derivative_threshold(N, K, norm)))
                for v in d.vertices:
                    if in_E_NK(v, N, K):
                        assert set(v.word.letters) <= allowed

    assert partition_subset_Pm(flat_right, natural_partition(flat_right), derivative_threshold(3, 2, 2.0)) == (0,)


def test_parameter_arithmetic() -> None:
    assert enlarged_parameters(8, 2, 2, 2.0) == (10, 9)
    assert derivative_threshold(1, 1, 2.0) == 3
    assert derivative_threshold(3, 2, 0.5) == 3
    assert e_nk_count_bound(2, 3) == 14


def test_uniformity_report_respects_the_letter_bound() -> None:
    report = uniformity_report([tent(2), tent("1.5"), tent("1.8")], N=4, K=2)

    assert len(report.counts) == 3
    assert report.within_bound
    assert report.max_count >= 2


def test_tagged_graph() -> None:
    g = to_graph(_diagram(tent("1.5"), 2), K=2)

    assert g.tagged("E_2_2") == ("0", "1")


@given(st.fractions(min_value=Fraction(11, 10), max_value=Fraction(2), max_denominator=20))
def test_edge_growth_law(slope: Fraction) -> None:
    fmap = tent(slope)
    d = _diagram(fmap, 6)
    norm = sup_deriv_norm(fmap, 1)

    for a, b in d.edges:
        assert vertex_L(d.vertex(b)) <= norm * vertex_L(d.vertex(a)) + 1e-12


def test_diagram_file_round_trip(tmp_path: Path) -> None:
    d = _diagram(tent("1.5"), 4)
    path = tmp_path / "d.json"
    write_json_atomic(path, diagram_to_payload(d))

    back = diagram_from_payload(read_json_or_yaml(path))

    assert back == d
