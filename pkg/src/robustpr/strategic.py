"""Best responses, equilibrium checks and searches over reported profiles.

All verdicts are computed from exact lotteries.  A :class:`Game` bundles a
rule, an instance and the truthful profile, and memoises lotteries by the
multiset of reported ballots (both rules are anonymous) so that exhaustive
searches evaluate each distinct profile once.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import DomainError, ResourceLimitError
from .lottery import Lottery, satisfaction_distribution, ul_compare_distributions
from .model import Ballot, Instance, Ordering, Profile, k_divides_n
from .pjr import check_pjr_lottery
from .rules import RuleTrace, get_rule, greedy_monroe_sample

KINDS = ("pne", "costly", "strong-pne", "strong-costly")
DEFAULT_PROFILE_LIMIT = 10**5


@dataclass(frozen=True)
class DeviationWitness:
    """A deviation refuting an equilibrium or strategyproofness claim.

    ``failure`` is one of ``"pne"`` (a unilateral strict improvement),
    ``"costly"`` (a voter who participates although abstaining is weakly
    best; the verdict is then not strict), ``"strong"`` (a coalition
    deviation strictly better for every member) or ``"strategyproofness"``.
    """

    voters: tuple
    original: tuple
    deviation: tuple
    profile: Profile
    before: Lottery
    after: Lottery
    verdicts: tuple
    failure: str = "pne"

    @property
    def voter(self) -> int:
        return self.voters[0]

    @property
    def deviated_profile(self) -> Profile:
        out = list(self.profile)
        for i, b in zip(self.voters, self.deviation):
            out[i] = b
        return tuple(out)


@dataclass(frozen=True)
class EquilibriumReport:
    profile: Profile
    kind: str
    verified: bool
    lottery: Lottery
    pjr_failure: object = None
    max_coalition: int | None = None

    @property
    def pjr_ok(self) -> bool:
        return self.pjr_failure is None


@dataclass
class DynamicsResult:
    status: str
    profile: Profile
    steps: int
    trace: list = field(default_factory=list)

    @property
    def improving_steps(self) -> int:
        return len(self.trace)


def _check_kind(kind: str):
    if kind not in KINDS:
        raise DomainError(f"unknown equilibrium kind {kind!r}; expected one of {KINDS}")


class Game:
    """A voting rule applied to one instance with known truthful preferences."""

    def __init__(self, rule, instance: Instance, truthful: Profile | None = None, state_budget: int | None = None):
        self.rule = get_rule(rule)
        self.instance = instance
        self.truthful = instance.abstain_profile() if truthful is None else instance.profile(truthful)
        self.state_budget = state_budget
        self.ballots = instance.ballots()
        self._lotteries = {}
        self._pis = {}

    def _key(self, reported) -> tuple:
        return tuple(sorted(self.instance.mask(b) for b in reported))

    def lottery(self, reported: Profile) -> Lottery:
        key = self._key(reported)
        out = self._lotteries.get(key)
        if out is None:
            out = self.rule.lottery(self.instance, tuple(reported), self.state_budget)
            self._lotteries[key] = out
        return out

    def distribution(self, voter: int, reported: Profile) -> tuple:
        truth = self.truthful[voter]
        key = (self.instance.mask(truth), self._key(reported))
        out = self._pis.get(key)
        if out is None:
            out = satisfaction_distribution(self.lottery(reported), truth, self.instance.k)
            self._pis[key] = out
        return out

    def compare(self, voter: int, first: Profile, second: Profile) -> Ordering:
        """ul comparison of the lotteries induced by two reported profiles."""
        return ul_compare_distributions(self.distribution(voter, first), self.distribution(voter, second))

    @staticmethod
    def replaced(reported: Profile, voter: int, ballot: Ballot) -> Profile:
        out = list(reported)
        out[voter] = ballot
        return tuple(out)

    def best_responses(self, reported: Profile, voter: int) -> list:
        scored = [(self.distribution(voter, self.replaced(reported, voter, b)), b) for b in self.ballots]
        best = min(pi for pi, _ in scored)
        return [b for pi, b in scored if pi == best]

    def is_pivotable(self, reported: Profile, voter: int) -> bool:
        base = self.lottery(reported)
        return any(
            self.lottery(self.replaced(reported, voter, b)) != base for b in self.ballots if b != reported[voter]
        )

    def _witness(self, reported, voters, deviation, failure) -> DeviationWitness:
        after_profile = list(reported)
        for i, b in zip(voters, deviation):
            after_profile[i] = b
        after_profile = tuple(after_profile)
        return DeviationWitness(
            voters=tuple(voters),
            original=tuple(reported[i] for i in voters),
            deviation=tuple(deviation),
            profile=tuple(reported),
            before=self.lottery(reported),
            after=self.lottery(after_profile),
            verdicts=tuple(self.compare(i, after_profile, reported) for i in voters),
            failure=failure,
        )

    def unilateral_improvement(self, reported: Profile, voter: int):
        """The canonically first ul-best deviation if it strictly improves, else ``None``."""
        current = self.distribution(voter, reported)
        best, best_pi = None, current
        for b in self.ballots:
            if b == reported[voter]:
                continue
            pi = self.distribution(voter, self.replaced(reported, voter, b))
            if pi < best_pi:
                best, best_pi = b, pi
        return best

    def pne_witness(self, reported: Profile):
        for i in range(self.instance.n):
            dev = self.unilateral_improvement(reported, i)
            if dev is not None:
                return self._witness(reported, (i,), (dev,), "pne")
        return None

    def costly_witness(self, reported: Profile):
        witness = self.pne_witness(reported)
        if witness is not None:
            return witness
        empty = frozenset()
        for i, b in enumerate(reported):
            if b and self.compare(i, reported, self.replaced(reported, i, empty)) is not Ordering.FIRST:
                return self._witness(reported, (i,), (empty,), "costly")
        return None

    def _saturated(self, voter: int, reported: Profile) -> bool:
        # already at the best satisfaction level with certainty
        top = min(self.instance.k, len(self.truthful[voter]))
        return self.distribution(voter, reported)[top] == 1

    def strong_witness(self, reported: Profile, max_coalition: int):
        n = self.instance.n
        if not 1 <= max_coalition <= n:
            raise DomainError(f"max_coalition must lie in 1..{n}, got {max_coalition}")
        hopeful = [i for i in range(n) if not self._saturated(i, reported)]
        for size in range(1, max_coalition + 1):
            for coalition in combinations(hopeful, size):
                current = [self.distribution(i, reported) for i in coalition]
                originals = tuple(reported[i] for i in coalition)
                for joint in product(self.ballots, repeat=size):
                    if joint == originals:
                        continue
                    trial = list(reported)
                    for i, b in zip(coalition, joint):
                        trial[i] = b
                    if all(self.distribution(i, trial) < cur for i, cur in zip(coalition, current)):
                        return self._witness(reported, coalition, joint, "strong")
        return None

    def witness(self, reported: Profile, kind: str, max_coalition: int | None = None):
        """First failing deviation for ``kind``, or ``None`` if verified."""
        _check_kind(kind)
        if kind == "pne":
            return self.pne_witness(reported)
        if kind == "costly":
            return self.costly_witness(reported)
        cap = self.instance.n if max_coalition is None else max_coalition
        base = self.costly_witness(reported) if kind == "strong-costly" else self.pne_witness(reported)
        if base is not None:
            return base
        return self.strong_witness(reported, cap)

    def report(self, reported: Profile, kind: str, max_coalition: int | None = None, mode: str = "exact"):
        witness = self.witness(reported, kind, max_coalition)
        lottery = self.lottery(reported)
        strong = kind.startswith("strong")
        return EquilibriumReport(
            profile=tuple(reported),
            kind=kind,
            verified=witness is None,
            lottery=lottery,
            pjr_failure=check_pjr_lottery(self.instance, self.truthful, lottery, mode),
            max_coalition=(self.instance.n if max_coalition is None else max_coalition) if strong else None,
        )


def _game(rule, instance, truthful=None, state_budget=None, game=None) -> Game:
    return game if game is not None else Game(rule, instance, truthful, state_budget)


def is_pivotable(rule, instance: Instance, reported: Profile, voter: int, *, state_budget=None, game=None) -> bool:
    return _game(rule, instance, None, state_budget, game).is_pivotable(tuple(reported), voter)


def best_response_set(rule, instance: Instance, truthful_ballot: Ballot, opponents, *, state_budget=None) -> list:
    """Every ul-best ballot for a voter with ``truthful_ballot`` facing ``opponents``.

    ``opponents`` holds the other n-1 reported ballots; the rules are
    anonymous so the voter's position is immaterial.
    """
    opponents = list(opponents)
    if len(opponents) != instance.n - 1:
        raise DomainError(f"expected {instance.n - 1} opponent ballots, got {len(opponents)}")
    truthful = [frozenset()] * (instance.n - 1) + [truthful_ballot]
    game = Game(rule, instance, truthful, state_budget)
    return game.best_responses(instance.profile(opponents + [frozenset()]), instance.n - 1)


def is_pne(rule, instance, truthful, reported, *, state_budget=None, game=None):
    """``None`` if ``reported`` is a pure Nash equilibrium, else a witness."""
    return _game(rule, instance, truthful, state_budget, game).pne_witness(tuple(reported))


def is_costly_voting_equilibrium(rule, instance, truthful, reported, *, state_budget=None, game=None):
    """``None`` if verified; a witness with ``failure`` ``"pne"`` or ``"costly"`` otherwise.

    A voter for whom abstaining is weakly best must abstain, so every
    non-empty ballot has to be strictly better than the empty one.
    """
    return _game(rule, instance, truthful, state_budget, game).costly_witness(tuple(reported))


def is_strong_equilibrium(
    rule, instance, truthful, reported, kind="strong-pne", max_coalition=None, *, state_budget=None, game=None
):
    """Check coalitions up to ``max_coalition`` members (all of N by default)."""
    if kind not in ("strong-pne", "strong-costly"):
        raise DomainError(f"kind must be 'strong-pne' or 'strong-costly', got {kind!r}")
    return _game(rule, instance, truthful, state_budget, game).witness(tuple(reported), kind, max_coalition)


def construct_coordinated_profile(instance: Instance, truthful: Profile, seed=None):
    """Equilibrium built from one sincere GreedyMonroe run.

    Each voter whose ballot was consumed when candidate ``c`` was elected
    reports ``{c}``; every other voter abstains.  Returns ``(reported, trace)``.
    """
    if not k_divides_n(instance):
        raise DomainError(f"construction requires k | n, got n = {instance.n}, k = {instance.k}")
    _, trace = greedy_monroe_sample(instance, truthful, seed)
    reported = [frozenset()] * instance.n
    for candidate, voters in trace.steps:
        for i in voters:
            reported[i] = frozenset([candidate])
    return tuple(reported), trace


def check_strategyproofness(rule, instance, truthful, opponent_profiles=None, *, state_budget=None, game=None):
    """Search for a profitable misreport against each opponent profile.

    ``opponent_profiles`` is an iterable of full profiles; for voter ``i``
    entry ``i`` is replaced by the truthful ballot.  Defaults to the sincere
    profile alone.  Returns ``None`` if no witness exists over that family.
    """
    game = _game(rule, instance, truthful, state_budget, game)
    family = [game.truthful] if opponent_profiles is None else opponent_profiles
    for others in family:
        for i in range(instance.n):
            base = game.replaced(tuple(others), i, game.truthful[i])
            dev = game.unilateral_improvement(base, i)
            if dev is not None:
                return game._witness(base, (i,), (dev,), "strategyproofness")
    return None


def _enumerate_chunk(args):
    rule, instance, truthful, kind, max_coalition, state_budget, mode, heads = args
    game = Game(rule, instance, truthful, state_budget)
    found = []
    for head in heads:
        for tail in product(game.ballots, repeat=instance.n - 1):
            profile = (head,) + tail
            if game.witness(profile, kind, max_coalition) is None:
                found.append(game.report(profile, kind, max_coalition, mode))
    return found


def enumerate_equilibria(
    rule,
    instance: Instance,
    truthful: Profile,
    kind: str = "costly",
    *,
    max_coalition: int | None = None,
    limit: int = DEFAULT_PROFILE_LIMIT,
    state_budget: int | None = None,
    mode: str = "exact",
    jobs: int = 1,
) -> list:
    """All reported profiles of the requested equilibrium kind, in canonical order."""
    _check_kind(kind)
    total = (2**instance.m) ** instance.n
    if total > limit:
        raise ResourceLimitError(f"{total} reported profiles exceed the enumeration limit of {limit}")
    truthful = instance.profile(truthful)
    heads = instance.ballots()
    if jobs <= 1:
        return _enumerate_chunk((get_rule(rule), instance, truthful, kind, max_coalition, state_budget, mode, heads))
    rule = get_rule(rule)
    chunks = [heads[j::jobs] for j in range(jobs)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = pool.map(
            _enumerate_chunk,
            [(rule, instance, truthful, kind, max_coalition, state_budget, mode, c) for c in chunks],
        )
        found = [r for part in parts for r in part]
    order = {b: i for i, b in enumerate(heads)}
    return sorted(found, key=lambda r: [order[b] for b in r.profile])


def _update(game: Game, reported: Profile, voter: int, costly: bool) -> Ballot:
    best = game.best_responses(reported, voter)
    if costly and frozenset() in best:
        return frozenset()
    if reported[voter] in best:
        return reported[voter]
    return best[0]


def best_response_dynamics(
    rule,
    instance: Instance,
    truthful: Profile,
    start: Profile,
    schedule: str = "round-robin",
    *,
    seed=None,
    max_steps: int = 1000,
    costly: bool = False,
    state_budget: int | None = None,
) -> DynamicsResult:
    """Repeatedly let one voter switch to a best response.

    A voter keeps the current ballot when it is already best; otherwise the
    canonically first best response is taken.  Under ``costly`` semantics
    the empty ballot is chosen whenever it is among the best.  Stops at a
    fixed point (``"converged"``), on revisiting a round-robin state
    (``"cycled"``) or after ``max_steps`` voter turns (``"step-limit"``).
    """
    if schedule not in ("round-robin", "random"):
        raise DomainError(f"schedule must be 'round-robin' or 'random', got {schedule!r}")
    game = Game(rule, instance, truthful, state_budget)
    rng = random.Random(seed)
    profile = instance.profile(start)
    n = instance.n
    trace = []

    def fixed(p):
        return all(_update(game, p, i, costly) == p[i] for i in range(n))

    if fixed(profile):
        return DynamicsResult("converged", profile, 0, trace)
    seen = set()
    for step in range(max_steps):
        voter = step % n if schedule == "round-robin" else rng.randrange(n)
        if schedule == "round-robin":
            state = (profile, voter)
            if state in seen:
                return DynamicsResult("cycled", profile, step, trace)
            seen.add(state)
        new = _update(game, profile, voter, costly)
        if new != profile[voter]:
            trace.append((step, voter, profile[voter], new))
            profile = game.replaced(profile, voter, new)
            if fixed(profile):
                return DynamicsResult("converged", profile, step + 1, trace)
    return DynamicsResult("step-limit", profile, max_steps, trace)


__all__ = [
    "KINDS",
    "DeviationWitness",
    "DynamicsResult",
    "EquilibriumReport",
    "Game",
    "RuleTrace",
    "best_response_dynamics",
    "best_response_set",
    "check_strategyproofness",
    "construct_coordinated_profile",
    "enumerate_equilibria",
    "is_costly_voting_equilibrium",
    "is_pivotable",
    "is_pne",
    "is_strong_equilibrium",
]
