from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hofbauer_entropy.core.errors import AdmissibilityError, BoundaryHitError, PartitionMismatchError
from hofbauer_entropy.intervals import UNIT, Interval
from hofbauer_entropy.maps import identity, natural_partition, piecewise_linear, tent
from hofbauer_entropy.symbolic import (
    Word,
    admissible_words,
    cylinder,
    cylinder_midpoint,
    follower_image,
    is_admissible,
    itinerary,
    last_letter,
    word,
)

TENT = tent(2)
PART = natural_partition(TENT)
L, R = 0, 1
HALF = Fraction(1, 2)


def test_one_letter_cylinder() -> None:
    cyl = cylinder(TENT, PART, Word((L,)))

    assert cyl.interval == Interval(Fraction(0), HALF)
    assert cyl.image == UNIT


def test_two_letter_cylinder() -> None:
    cyl = cylinder(TENT, PART, Word((L, L)))

    assert cyl.interval == Interval(Fraction(0), Fraction(1, 4))
    assert cyl.image == UNIT


def test_identity_cylinder() -> None:
    part = natural_partition(identity())
    cyl = cylinder(identity(), part, Word((0, 0, 0)))

    assert cyl.interval == UNIT
    assert cyl.image == UNIT


def test_admissibility() -> None:
    assert is_admissible(TENT, PART, Word((L, R)))
    assert is_admissible(identity(), natural_partition(identity()), Word((0, 0, 0, 0)))


def test_inadmissible_word() -> None:
    # f maps (0, 1/2) onto (0, 1/4), which misses the right branch.
    fmap = piecewise_linear([(0, 0), ("1/2", "1/4"), (1, 0)])
    part = natural_partition(fmap)

    assert not is_admissible(fmap, part, Word((0, 1)))
    with pytest.raises(AdmissibilityError):
        follower_image(fmap, part, Word((0, 1)))


def test_follower_images() -> None:
    assert follower_image(TENT, PART, Word((L,))) == UNIT
    assert follower_image(TENT, PART, Word((R, L))) == UNIT
    assert follower_image(identity(), natural_partition(identity()), Word((0,))) == UNIT


def test_itineraries() -> None:
    assert itinerary(TENT, PART, Fraction(3, 10), 2) == Word((L, R))
    assert itinerary(TENT, PART, Fraction(2, 7), 3) == Word((L, R, R))
    assert itinerary(identity(), natural_partition(identity()), HALF, 3) == Word((0, 0, 0))


def test_itinerary_hitting_a_boundary() -> None:
    with pytest.raises(BoundaryHitError):
        itinerary(TENT, PART, Fraction(1, 4), 3)


def test_word_labels_and_mismatch() -> None:
    assert word(["B0", "B1"], PART) == Word((L, R))
    with pytest.raises(PartitionMismatchError):
        word([0, 2], PART)
    with pytest.raises(PartitionMismatchError):
        word(["B7"], PART)


def test_midpoint_and_last_letter() -> None:
    assert cylinder_midpoint(TENT, PART, Word((L, L))) == Fraction(1, 8)
    assert last_letter(Word((L, R))) == R
    assert str(Word((L, R))) == "(0,1)"


def test_full_shift_words() -> None:
    assert len(admissible_words(TENT, PART, 4)) == 16


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=6), st.integers(min_value=0, max_value=1))
def test_cylinders_are_nested(letters: list[int], extra: int) -> None:
    fmap = tent("1.6")
    part = natural_partition(fmap)
    w = Word(tuple(letters))
    longer = cylinder(fmap, part, w.extend(extra))
    if longer.is_empty:
        return
    outer = cylinder(fmap, part, w)

    assert not outer.is_empty
    assert outer.interval.covers(longer.interval)


THREE_LAP = piecewise_linear([(0, 0), ("1/3", 1), ("2/3", 0), (1, "3/4")])


@given(st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=5), st.integers(min_value=0, max_value=2))
def test_follower_image_of_extension(letters: list[int], extra: int) -> None:
    part = natural_partition(THREE_LAP)
    w = Word(tuple(letters))
    if not is_admissible(THREE_LAP, part, w):
        return
    j = follower_image(THREE_LAP, part, w).intersect(part.branches[extra])
    if j.is_empty:
        assert not is_admissible(THREE_LAP, part, w.extend(extra))
        return
    ends = (THREE_LAP(j.lo), THREE_LAP(j.hi))

    assert follower_image(THREE_LAP, part, w.extend(extra)) == Interval(min(ends), max(ends))


@given(st.integers(min_value=1, max_value=10006), st.integers(min_value=1, max_value=8))
def test_point_lies_in_cylinder_of_its_itinerary(k: int, n: int) -> None:
    fmap = tent("9/5")
    part = natural_partition(fmap)
    x = Fraction(k, 10007)
    try:
        w = itinerary(fmap, part, x, n)
    except BoundaryHitError:
        return

    assert cylinder(fmap, part, w).interval.contains(x)
