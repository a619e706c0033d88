"""The modified GreedyMonroe rule and the AV rule.

Each rule comes in two flavours: a seeded sampler producing one realised
committee, and an exact evaluator producing the full :class:`Lottery` by
branching over every random choice with rational weights.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable

from .errors import DomainError, ResourceLimitError
from .lottery import Lottery
from .model import Committee, Instance, Profile

DEFAULT_STATE_BUDGET = 10**6
STATE_BUDGET_ENV = "ROBUSTPR_STATE_BUDGET"


def default_state_budget() -> int:
    value = os.environ.get(STATE_BUDGET_ENV)
    return int(value) if value else DEFAULT_STATE_BUDGET


def make_rng(seed=None) -> random.Random:
    """A ``random.Random`` from an int seed, or the generator itself."""
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def spawn_seeds(seed: int, count: int) -> list:
    """Derive ``count`` independent child seeds from one parent seed."""
    parent = random.Random(seed)
    return [parent.getrandbits(64) for _ in range(count)]


def approval_scores(instance: Instance, reported: Profile) -> dict:
    """Approval count of every candidate, in canonical candidate order."""
    scores = dict.fromkeys(instance.candidates, 0)
    for ballot in reported:
        for c in ballot:
            scores[c] += 1
    return scores


@dataclass(frozen=True)
class RuleTrace:
    """Record of one GreedyMonroe run.

    ``steps`` holds ``(candidate, removed_voters)`` per first-stage election
    in order; ``fill`` is the set drawn uniformly in the second stage.
    """

    steps: tuple
    fill: frozenset
    seed: object = None

    @property
    def first_stage(self) -> frozenset:
        return frozenset(c for c, _ in self.steps)

    @property
    def committee(self) -> frozenset:
        return self.first_stage | self.fill


def greedy_monroe_sample(instance: Instance, reported: Profile, seed=None):
    """Run GreedyMonroe once; returns ``(committee, trace)``."""
    rng = make_rng(seed)
    n, k, q = instance.n, instance.k, instance.removal
    live = list(range(n))
    elected = []
    steps = []
    while len(elected) < k:
        remaining = [c for c in instance.candidates if c not in elected]
        cstar = [c for c in remaining if k * sum(1 for i in live if c in reported[i]) >= n]
        if not cstar:
            break
        winner = rng.choice(cstar)
        supporters = [i for i in live if winner in reported[i]]
        removed = frozenset(rng.sample(supporters, q))
        live = [i for i in live if i not in removed]
        elected.append(winner)
        steps.append((winner, removed))
    rest = [c for c in instance.candidates if c not in elected]
    fill = frozenset(rng.sample(rest, k - len(elected)))
    trace = RuleTrace(tuple(steps), fill, seed if not isinstance(seed, random.Random) else None)
    return frozenset(elected) | fill, trace


def _removals(groups, q):
    """Ways to take ``q`` ballots from groups of identical ballots.

    Yields a tuple of per-group counts for each composition.
    """
    if not groups:
        if q == 0:
            yield ()
        return
    head, tail = groups[0], groups[1:]
    capacity = sum(tail)
    for r in range(max(0, q - capacity), min(head, q) + 1):
        for rest in _removals(tail, q - r):
            yield (r,) + rest


def greedy_monroe_exact(instance: Instance, reported: Profile, state_budget: int | None = None) -> Lottery:
    """Exact GreedyMonroe lottery.

    The state is the elected set plus the multiset of live ballots with
    elected candidates stripped and empty ballots dropped; identical live
    ballots are interchangeable because every draw is uniform over them.
    """
    budget = default_state_budget() if state_budget is None else state_budget
    n, k, q, m = instance.n, instance.k, instance.removal, instance.m
    full = (1 << m) - 1
    memo = {}

    def solve(elected: int, live: tuple) -> dict:
        key = (elected, live)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) >= budget:
            raise ResourceLimitError(f"exact GreedyMonroe exceeded state budget of {budget}")
        size = bin(elected).count("1")
        out = {}
        if size == k:
            out[elected] = Fraction(1)
        else:
            cstar = []
            for c in range(m):
                if elected >> c & 1:
                    continue
                score = sum(cnt for b, cnt in live if b >> c & 1)
                if k * score >= n:
                    cstar.append(c)
            if not cstar:
                rest = [c for c in range(m) if not elected >> c & 1]
                p = Fraction(1, comb(len(rest), k - size))
                for chosen in combinations(rest, k - size):
                    w = elected
                    for c in chosen:
                        w |= 1 << c
                    out[w] = p
            else:
                pick = Fraction(1, len(cstar))
                for c in cstar:
                    bit = 1 << c
                    sup = [(b, cnt) for b, cnt in live if b & bit]
                    denom = comb(sum(cnt for _, cnt in sup), q)
                    for taken in _removals([cnt for _, cnt in sup], q):
                        ways = 1
                        left = Counter(dict(live))
                        for (b, cnt), r in zip(sup, taken):
                            ways *= comb(cnt, r)
                            left[b] -= r
                        nxt = Counter()
                        for b, cnt in left.items():
                            b &= full ^ bit
                            if cnt and b:
                                nxt[b] += cnt
                        weight = pick * Fraction(ways, denom)
                        for w, p in solve(elected | bit, tuple(sorted(nxt.items()))).items():
                            out[w] = out.get(w, Fraction(0)) + weight * p
        memo[key] = out
        return out

    start = Counter(instance.mask(b) for b in reported)
    start.pop(0, None)
    dist = solve(0, tuple(sorted(start.items())))
    return Lottery({instance.unmask(w): p for w, p in dist.items()})


def _av_split(instance: Instance, reported: Profile):
    scores = approval_scores(instance, reported)
    threshold = sorted(scores.values(), reverse=True)[instance.k - 1]
    above = frozenset(c for c, s in scores.items() if s > threshold)
    tied = [c for c, s in scores.items() if s == threshold]
    return above, tied, instance.k - len(above)


def av_exact(instance: Instance, reported: Profile) -> Lottery:
    """Top-k approval scores, uniform over completions of the boundary tie."""
    above, tied, need = _av_split(instance, reported)
    return Lottery.uniform(above | frozenset(extra) for extra in combinations(tied, need))


def av_sample(instance: Instance, reported: Profile, seed=None) -> Committee:
    rng = make_rng(seed)
    above, tied, need = _av_split(instance, reported)
    return above | frozenset(rng.sample(tied, need))


def hypergeometric_all_marked(m: int, j: int, l: int) -> Fraction:
    """Chance that ``j`` draws without replacement from ``m`` items hit all ``l`` marked ones."""
    if not (isinstance(m, int) and isinstance(j, int) and isinstance(l, int)) or not 0 <= l <= j <= m:
        raise DomainError(f"need integers 0 <= l <= j <= m, got m={m}, j={j}, l={l}")
    return Fraction(comb(m - l, j - l), comb(m, j))


@dataclass(frozen=True)
class Rule:
    """A voting rule bundled as exact evaluator plus sampler."""

    name: str
    _exact: Callable
    _sample: Callable
    budgeted: bool = False

    def lottery(self, instance: Instance, reported: Profile, state_budget: int | None = None) -> Lottery:
        if self.budgeted:
            return self._exact(instance, reported, state_budget)
        return self._exact(instance, reported)

    def sample(self, instance: Instance, reported: Profile, seed=None) -> Committee:
        out = self._sample(instance, reported, seed)
        return out[0] if isinstance(out, tuple) else out


GREEDY_MONROE = Rule("greedy-monroe", greedy_monroe_exact, greedy_monroe_sample, budgeted=True)
AV = Rule("av", av_exact, av_sample)
RULES = {r.name: r for r in (GREEDY_MONROE, AV)}


def get_rule(rule) -> Rule:
    if isinstance(rule, Rule):
        return rule
    try:
        return RULES[rule]
    except KeyError:
        raise DomainError(f"unknown rule {rule!r}; expected one of {sorted(RULES)}") from None
