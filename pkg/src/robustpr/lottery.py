"""Exact lotteries over committees and preference extensions to compare them."""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from typing import Iterable

from .errors import InvalidInstanceError
from .model import Ballot, Instance, Ordering, order_by_value


class Lottery(Mapping):
    """Immutable finite distribution ``committee -> Fraction``.

    Zero-probability entries are dropped, so two lotteries are equal exactly
    when their supports and probabilities are equal.
    """

    __slots__ = ("_dist", "_hash")

    def __init__(self, dist):
        clean = {}
        for committee, p in dict(dist).items():
            p = Fraction(p)
            if p < 0:
                raise InvalidInstanceError(f"negative probability {p} for {set(committee)}")
            if p:
                key = frozenset(committee)
                clean[key] = clean.get(key, Fraction(0)) + p
        if sum(clean.values()) != 1:
            raise InvalidInstanceError(f"lottery probabilities sum to {sum(clean.values())}, not 1")
        sizes = {len(c) for c in clean}
        if len(sizes) > 1:
            raise InvalidInstanceError("lottery mixes committees of different sizes")
        self._dist = clean
        self._hash = None

    @classmethod
    def point(cls, committee) -> Lottery:
        return cls({frozenset(committee): Fraction(1)})

    @classmethod
    def uniform(cls, committees: Iterable) -> Lottery:
        committees = [frozenset(c) for c in committees]
        if len(set(committees)) != len(committees):
            raise InvalidInstanceError("uniform lottery over repeated committees")
        p = Fraction(1, len(committees))
        return cls({c: p for c in committees})

    def __getitem__(self, committee):
        return self._dist[frozenset(committee)]

    def get(self, committee, default=Fraction(0)):
        return self._dist.get(frozenset(committee), default)

    def __iter__(self):
        return iter(self._dist)

    def __len__(self):
        return len(self._dist)

    def __eq__(self, other):
        if isinstance(other, Lottery):
            return self._dist == other._dist
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._dist.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{sorted(map(str, c))}: {p}" for c, p in self._dist.items())
        return f"Lottery({{{body}}})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._dist)

    @property
    def is_degenerate(self) -> bool:
        return len(self._dist) == 1

    def mix(self, other: Lottery, weight) -> Lottery:
        """The compound lottery ``weight * self + (1 - weight) * other``."""
        weight = Fraction(weight)
        if not 0 <= weight <= 1:
            raise InvalidInstanceError(f"mixture weight {weight} outside [0, 1]")
        out = {c: weight * p for c, p in self._dist.items()}
        for c, p in other._dist.items():
            out[c] = out.get(c, Fraction(0)) + (1 - weight) * p
        return Lottery(out)

    def probability_contains(self, cands) -> Fraction:
        """Probability that the outcome includes every candidate in ``cands``."""
        cands = frozenset(cands)
        return sum((p for c, p in self._dist.items() if cands <= c), Fraction(0))

    def validate_for(self, instance: Instance) -> Lottery:
        for c in self._dist:
            instance.committee(c)
        return self

    def to_records(self, instance: Instance) -> list:
        """Canonically sorted ``[{"committee": [...], "p": "num/den"}, ...]``."""
        rows = sorted(self._dist.items(), key=lambda item: instance.sort_key(item[0]))
        return [
            {"committee": list(instance.ordered(c)), "p": f"{p.numerator}/{p.denominator}"}
            for c, p in rows
        ]

    @classmethod
    def from_records(cls, records) -> Lottery:
        return cls({frozenset(r["committee"]): Fraction(r["p"]) for r in records})


def satisfaction_distribution(lottery: Lottery, ballot: Ballot, k: int) -> tuple:
    """Probability of each satisfaction level 0..k, zero-padded to length k+1."""
    pi = [Fraction(0)] * (k + 1)
    for committee, p in lottery.items():
        pi[len(committee & ballot)] += p
    return tuple(pi)


def ul_compare_distributions(pi1, pi2) -> Ordering:
    # Smaller mass at the first differing (worst) level wins.
    for a, b in zip(pi1, pi2):
        if a != b:
            return Ordering.FIRST if a < b else Ordering.SECOND
    return Ordering.INDIFFERENT


def ul_compare(l1: Lottery, l2: Lottery, ballot: Ballot, k: int) -> Ordering:
    """Upward-lexicographic comparison: minimise the chance of bad outcomes first."""
    return ul_compare_distributions(
        satisfaction_distribution(l1, ballot, k), satisfaction_distribution(l2, ballot, k)
    )


def sd_compare_distributions(pi1, pi2) -> Ordering:
    better = worse = False
    tail1 = tail2 = Fraction(0)
    for a, b in zip(reversed(pi1), reversed(pi2)):
        tail1 += a
        tail2 += b
        if tail1 > tail2:
            better = True
        elif tail1 < tail2:
            worse = True
    if better and worse:
        return Ordering.INCOMPARABLE
    if better:
        return Ordering.FIRST
    if worse:
        return Ordering.SECOND
    return Ordering.INDIFFERENT


def sd_compare(l1: Lottery, l2: Lottery, ballot: Ballot, k: int) -> Ordering:
    """First-order stochastic dominance on satisfaction; may be incomparable."""
    return sd_compare_distributions(
        satisfaction_distribution(l1, ballot, k), satisfaction_distribution(l2, ballot, k)
    )


def worst_case_compare(l1: Lottery, l2: Lottery, ballot: Ballot) -> Ordering:
    """Compare lotteries by the least satisfying committee in their supports."""
    worst1 = min(len(c & ballot) for c in l1)
    worst2 = min(len(c & ballot) for c in l2)
    return order_by_value(worst1, worst2)
