"""Election instances, approval ballots, profiles and committees.

Ballots and committees are plain ``frozenset`` objects of candidate ids and a
profile is a tuple of ballots indexed by voter.  :class:`Instance` validates
them and fixes the canonical candidate order used everywhere else
(enumeration order, serialization, witness minimality).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .errors import InvalidInstanceError

Candidate = Hashable
Ballot = frozenset
Committee = frozenset
Profile = tuple


class Ordering(Enum):
    """Outcome of comparing two alternatives from one voter's viewpoint."""

    FIRST = "prefer-first"
    SECOND = "prefer-second"
    INDIFFERENT = "indifferent"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> Ordering:
        if self is Ordering.FIRST:
            return Ordering.SECOND
        if self is Ordering.SECOND:
            return Ordering.FIRST
        return self


def order_by_value(a, b) -> Ordering:
    """Order two values where larger is better."""
    if a > b:
        return Ordering.FIRST
    if a < b:
        return Ordering.SECOND
    return Ordering.INDIFFERENT


@dataclass(frozen=True)
class Instance:
    """A multiwinner election: candidates, number of voters, committee size."""

    candidates: tuple
    n: int
    k: int
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        cands = tuple(self.candidates)
        object.__setattr__(self, "candidates", cands)
        if len(set(cands)) != len(cands):
            raise InvalidInstanceError("candidate ids must be unique")
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidInstanceError(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.k, int) or not 1 <= self.k < len(cands):
            raise InvalidInstanceError(
                f"committee size must satisfy 1 <= k < |C| = {len(cands)}, got {self.k!r}"
            )
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(cands)})

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def quota(self) -> Fraction:
        """Election threshold n/k as an exact rational."""
        return Fraction(self.n, self.k)

    @property
    def removal(self) -> int:
        """Number of ballots consumed per first-stage election, ceil(n/k)."""
        return -(-self.n // self.k)

    def index(self, candidate) -> int:
        try:
            return self._index[candidate]
        except KeyError:
            raise InvalidInstanceError(f"unknown candidate {candidate!r}") from None

    def ordered(self, cands: Iterable) -> tuple:
        """Candidates of ``cands`` in canonical instance order."""
        return tuple(sorted(cands, key=self.index))

    def sort_key(self, cands: Iterable) -> tuple:
        """Canonical key for a candidate set: size first, then index tuple."""
        idx = sorted(self.index(c) for c in cands)
        return (len(idx), tuple(idx))

    def mask(self, cands: Iterable) -> int:
        out = 0
        for c in cands:
            out |= 1 << self.index(c)
        return out

    def unmask(self, mask: int) -> frozenset:
        return frozenset(c for i, c in enumerate(self.candidates) if mask >> i & 1)

    def ballot(self, approved: Iterable = ()) -> Ballot:
        approved = frozenset(approved)
        for c in approved:
            if c not in self._index:
                raise InvalidInstanceError(f"ballot names unknown candidate {c!r}")
        return approved

    def profile(self, rows: Sequence[Iterable]) -> Profile:
        rows = list(rows)
        if len(rows) != self.n:
            raise InvalidInstanceError(f"profile has {len(rows)} ballots, expected n = {self.n}")
        return tuple(self.ballot(r) for r in rows)

    def committee(self, members: Iterable) -> Committee:
        members = self.ballot(members)
        if len(members) != self.k:
            raise InvalidInstanceError(
                f"committee must have exactly k = {self.k} members, got {len(members)}"
            )
        return members

    def abstain_profile(self) -> Profile:
        return (frozenset(),) * self.n

    def ballots(self) -> list:
        """Every ballot (the full powerset of C), empty ballot first."""
        out = []
        for size in range(self.m + 1):
            out.extend(frozenset(s) for s in combinations(self.candidates, size))
        return out

    def committees(self) -> list:
        return [frozenset(s) for s in combinations(self.candidates, self.k)]


def _check_members(instance: Instance | None, *sets):
    if instance is None:
        return
    for s in sets:
        instance.ballot(s)


def committee_satisfaction(committee: Committee, ballot: Ballot, instance: Instance | None = None) -> int:
    """Number of approved candidates in ``committee``."""
    _check_members(instance, committee, ballot)
    return len(committee & ballot)


def compare_committees(w1: Committee, w2: Committee, ballot: Ballot, instance: Instance | None = None) -> Ordering:
    _check_members(instance, w1, w2, ballot)
    return order_by_value(len(w1 & ballot), len(w2 & ballot))


def k_divides_n(instance: Instance) -> bool:
    return instance.n % instance.k == 0


def sufficiency_condition(instance: Instance, truthful: Profile) -> bool:
    """True iff every voter disapproves of at least k candidates."""
    cands = frozenset(instance.candidates)
    return all(len(cands - a) >= instance.k for a in truthful)
