"""Words over a natural partition, their cylinders and image intervals.

Letters are branch indices of a `NaturalPartition`. `letters[0]` is the
oldest letter (the branch containing the cylinder), `letters[-1]` the most
recent one; the image of a word is f^len applied to its cylinder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from scipy.optimize import brentq

from hofbauer_entropy.core.errors import AdmissibilityError, BoundaryHitError, GeometryError, PartitionMismatchError
from hofbauer_entropy.core.tolerances import eps_geom, eps_root
from hofbauer_entropy.intervals import EMPTY, Interval, Real, hull_of, is_exact
from hofbauer_entropy.maps import NaturalPartition, PiecewiseMonotoneMap, PolynomialBranch


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def extend(self, letter: int) -> Word:
        return Word(self.letters + (letter,))

    def drop_oldest(self) -> Word:
        return Word(self.letters[1:])

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.letters) + ")"


@dataclass(frozen=True)
class CylinderInterval:
    interval: Interval
    image: Interval

    @property
    def is_empty(self) -> bool:
        return self.interval.is_empty or self.image.is_empty


EMPTY_CYLINDER = CylinderInterval(interval=EMPTY, image=EMPTY)


def word(letters: Iterable[int | str], partition: NaturalPartition) -> Word:
    """Build a word from branch indices or `B<i>` labels, validating each letter."""

    labels = partition.labels()
    out: list[int] = []
    for a in letters:
        if isinstance(a, str):
            if a not in labels:
                raise PartitionMismatchError(f"unknown branch label {a!r}")
            out.append(labels.index(a))
        else:
            out.append(int(a))
    w = Word(tuple(out))
    _check_letters(w, partition)
    return w


def _check_letters(w: Word, partition: NaturalPartition) -> None:
    for a in w.letters:
        if not 0 <= a < len(partition):
            raise PartitionMismatchError(f"letter {a} names no branch of a {len(partition)}-branch partition")


def branch_image(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, letter: int, within: Interval | None = None) -> Interval:
    """f(B ∩ within) for branch B = partition.branches[letter]; EMPTY when the intersection is empty."""

    b = partition.branches[letter]
    j = b if within is None else b.intersect(within)
    if j.is_empty:
        return EMPTY
    return hull_of([fmap(j.lo), fmap(j.hi)])


def forward_image(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, w: Word) -> Interval:
    if not w.letters:
        raise ValueError("word must be non-empty")
    _check_letters(w, partition)
    image = branch_image(fmap, partition, w.letters[0])
    for a in w.letters[1:]:
        if image.is_empty:
            return EMPTY
        image = branch_image(fmap, partition, a, image)
    return EMPTY if image.is_empty else image


def inverse_on_branch(fmap: PiecewiseMonotoneMap, branch: Interval, y: Real) -> Real:
    """The x in closure(branch) with f(x) = y; f is monotone there."""

    for pc in fmap.pieces:
        if pc.hi < branch.lo or pc.lo > branch.hi:
            continue
        a, b = max(pc.lo, branch.lo), min(pc.hi, branch.hi)
        if a > b:
            continue
        fa, fb = pc.branch(a), pc.branch(b)
        if not min(fa, fb) <= y <= max(fa, fb):
            continue
        if y == fa:
            return a
        if y == fb:
            return b
        br = pc.branch
        if isinstance(br, PolynomialBranch) and br.degree == 1:
            return (y - br.coeffs[0]) / br.coeffs[1]
        yf = float(y)
        return float(brentq(lambda t: float(br(t)) - yf, float(a), float(b), xtol=eps_root()))
    raise GeometryError(f"{y} is not in the image of branch {branch}")


def cylinder(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, w: Word) -> CylinderInterval:
    """The cylinder of `w` and its image under f^len(w)."""

    image = forward_image(fmap, partition, w)
    if image.is_empty:
        return EMPTY_CYLINDER

    target = partition.branches[w.letters[-1]]
    for a in reversed(w.letters[:-1]):
        b = partition.branches[a]
        reach = branch_image(fmap, partition, a)
        t = target.intersect(reach)
        if t.is_empty:
            return EMPTY_CYLINDER
        x0, x1 = inverse_on_branch(fmap, b, t.lo), inverse_on_branch(fmap, b, t.hi)
        target = hull_of([x0, x1]).intersect(b)
        if target.is_empty:
            return EMPTY_CYLINDER
    return CylinderInterval(interval=target, image=image)


def is_admissible(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, w: Word) -> bool:
    return not cylinder(fmap, partition, w).is_empty


def follower_image(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, w: Word) -> Interval:
    """Image interval standing in for the follower set of `w`.

    Two words with equal last letter and equal follower image have the same
    admissible continuations.
    """

    image = forward_image(fmap, partition, w)
    if image.is_empty:
        raise AdmissibilityError(f"word {w} is not admissible")
    return image


def itinerary(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, x: Real, n: int) -> Word:
    if n < 1:
        raise ValueError("n must be >= 1")
    tol = eps_geom()
    letters: list[int] = []
    cur = x
    for k in range(n):
        idx = partition.index_of(cur)
        if idx is None:
            raise BoundaryHitError(f"orbit of {x} hits a branch boundary at step {k} (f^k(x)={cur})")
        b = partition.branches[idx]
        if not (is_exact(cur) and b.exact):
            if min(float(cur) - float(b.lo), float(b.hi) - float(cur)) <= tol:
                raise BoundaryHitError(f"orbit of {x} is within {tol:g} of a branch boundary at step {k}")
        letters.append(idx)
        cur = fmap(cur)
    return Word(tuple(letters))


def cylinder_midpoint(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, w: Word) -> Real:
    """Finite-depth coding projection: a point of the cylinder of `w`."""

    cyl = cylinder(fmap, partition, w)
    if cyl.is_empty:
        raise AdmissibilityError(f"word {w} is not admissible")
    return cyl.interval.midpoint


def last_letter(w: Word) -> int:
    if not w.letters:
        raise ValueError("word must be non-empty")
    return w.letters[-1]


def admissible_words(fmap: PiecewiseMonotoneMap, partition: NaturalPartition, length: int) -> list[Word]:
    """All admissible words of the given length, grown letter by letter."""

    frontier: list[tuple[Word, Interval]] = [
        (Word((a,)), branch_image(fmap, partition, a)) for a in range(len(partition))
    ]
    frontier = [(w, im) for w, im in frontier if not im.is_empty]
    for _ in range(length - 1):
        nxt: list[tuple[Word, Interval]] = []
        for w, im in frontier:
            for a in range(len(partition)):
                im2 = branch_image(fmap, partition, a, im)
                if not im2.is_empty:
                    nxt.append((w.extend(a), im2))
        frontier = nxt
    return [w for w, _ in frontier]

