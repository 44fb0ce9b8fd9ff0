from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hofbauer_entropy.core.errors import DomainError, RepresentationError, UnsupportedOrderError
from hofbauer_entropy.intervals import Interval
from hofbauer_entropy.maps import (
    Piece,
    PiecewiseMonotoneMap,
    PolynomialBranch,
    as_float_map,
    critical_set,
    deriv,
    evaluate,
    flat_critical_points,
    identity,
    lap_count,
    lap_counts,
    logistic,
    natural_partition,
    orbit,
    piecewise_linear,
    sup_deriv_norm,
    sup_deriv_norms,
    tent,
    turning_points,
)
from hofbauer_entropy.perturb import tangency_family

CUBIC = PiecewiseMonotoneMap(
    pieces=(Piece(Fraction(0), Fraction(1), PolynomialBranch((0, 9, -24, 16))),),
    smoothness_order=3.0,
    name="cubic",
)


def test_evaluate_builtins() -> None:
    assert evaluate(tent(2), Fraction(1, 2)) == 1
    assert evaluate(identity(), Fraction(3, 10)) == Fraction(3, 10)
    assert evaluate(tent(2), 0.75) == pytest.approx(0.5)


def test_evaluate_outside_unit_interval() -> None:
    with pytest.raises(DomainError):
        evaluate(tent(2), Fraction(3, 2))


def test_derivatives() -> None:
    assert deriv(tent(2), Fraction(1, 4)) == 2
    assert deriv(logistic(4), Fraction(1, 2)) == 0
    assert deriv(logistic(4), Fraction(1, 4), order=2) == -8


def test_derivative_order_above_smoothness() -> None:
    with pytest.raises(UnsupportedOrderError):
        deriv(tent(2, r=2.0), Fraction(1, 4), order=3)


def test_critical_sets() -> None:
    assert critical_set(tent(2)).points == (Fraction(1, 2),)
    assert critical_set(identity()).is_empty
    assert critical_set(logistic(4)).points == (Fraction(1, 2),)


def test_plateau_is_a_critical_interval() -> None:
    crit = critical_set(tangency_family())

    assert crit.intervals == (Interval(Fraction(21, 50) - Fraction(1, 80), Fraction(21, 50) + Fraction(1, 80)),)


def test_natural_partitions() -> None:
    part = natural_partition(tent(2))
    assert part.branches == (Interval(Fraction(0), Fraction(1, 2)), Interval(Fraction(1, 2), Fraction(1)))
    assert part.signs == (1, -1)
    assert part.labels() == ("B0", "B1")

    assert natural_partition(identity()).branches == (Interval(Fraction(0), Fraction(1)),)
    assert len(natural_partition(CUBIC)) == 3


def test_strictly_monotone_flag_is_checked() -> None:
    fmap = PiecewiseMonotoneMap(
        pieces=(Piece(Fraction(0), Fraction(1), PolynomialBranch((0, 4, -4)), strictly_monotone=True),),
    )
    with pytest.raises(RepresentationError):
        critical_set(fmap)


def test_discontinuous_map_is_rejected() -> None:
    with pytest.raises(RepresentationError):
        PiecewiseMonotoneMap(
            pieces=(
                Piece(Fraction(0), Fraction(1, 2), PolynomialBranch((0, 1))),
                Piece(Fraction(1, 2), Fraction(1), PolynomialBranch((1, 0))),
            )
        )


def test_map_leaving_unit_interval_is_rejected() -> None:
    with pytest.raises(RepresentationError):
        piecewise_linear([(0, 0), ("1/2", "3/2"), (1, 0)])
    with pytest.raises(RepresentationError):
        PiecewiseMonotoneMap(pieces=(Piece(Fraction(0), Fraction(1), PolynomialBranch((0, 5, -5))),))
    with pytest.raises(RepresentationError):
        PiecewiseMonotoneMap(pieces=(Piece(0.0, 1.0, PolynomialBranch((0.0, 4.0001, -4.0001))),))

    assert PolynomialBranch((0, 4, -4)).value_range(Fraction(0), Fraction(1)) == (0, 1)


def test_turning_points_merge_plateaus() -> None:
    assert turning_points(tent(2)) == ((Fraction(1, 2), Fraction(1, 2)),)
    fmap = piecewise_linear([(0, 0), ("1/3", 1), ("2/3", 1), (1, 0)])
    assert turning_points(fmap) == ((Fraction(1, 3), Fraction(2, 3)),)


def test_flat_critical_points() -> None:
    assert flat_critical_points(tent(2), 2) == ()
    assert flat_critical_points(logistic(4), 3) == ()
    assert flat_critical_points(tangency_family(), 3) == (Fraction(21, 50),)


def test_lap_counts() -> None:
    assert lap_count(tent(2), 3) == 8
    assert lap_counts(identity(), 5) == [1, 1, 1, 1, 1]
    assert lap_count(tent("1.8"), 2) == 4
    assert lap_counts(CUBIC, 4) == [3, 9, 27, 81]


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6))
def test_lap_counts_are_submultiplicative(m: int, n: int) -> None:
    counts = lap_counts(tent("1.7"), m + n)
    assert counts[m + n - 1] <= counts[m - 1] * counts[n - 1]


def test_sup_derivative_norms() -> None:
    assert sup_deriv_norm(tent(2), 3) == pytest.approx(8.0)
    assert sup_deriv_norm(identity(), 5) == pytest.approx(1.0)
    assert sup_deriv_norm(tent("1.5"), 4) == pytest.approx(5.0625)
    norms = sup_deriv_norms(logistic(4), 4)
    assert norms[0] == pytest.approx(4.0)
    for m in range(1, 4):
        assert norms[m] <= norms[m - 1] * norms[0] + 1e-9


def test_orbit_tracks_derivative_products() -> None:
    orb = orbit(tent(2), Fraction(2, 7), 3)

    assert orb.points == (Fraction(2, 7), Fraction(4, 7), Fraction(6, 7), Fraction(2, 7))
    assert orb.derivative_products[-1] == pytest.approx(8.0)


def test_builtin_parameter_ranges() -> None:
    with pytest.raises(DomainError):
        tent(3)
    with pytest.raises(DomainError):
        logistic(5)


def test_float_copy_keeps_values() -> None:
    fmap = as_float_map(tent("1.5"))

    assert not fmap.exact
    assert fmap(0.5) == pytest.approx(0.75)
    assert math.isclose(float(fmap.pieces[0].hi), 0.5)
