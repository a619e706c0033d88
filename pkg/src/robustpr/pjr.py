"""Proportional Justified Representation for committees and lotteries."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import DomainError, ResourceLimitError
from .lottery import Lottery
from .model import Committee, Instance, Profile, k_divides_n
from .rules import greedy_monroe_sample

MODES = ("exact", "weak")
DEFAULT_ORACLE_CAP = 12


def group_quota(instance: Instance, level: int, mode: str) -> Fraction:
    """Minimum group size that entitles a cohesive group to ``level`` seats."""
    if mode == "exact":
        return level * instance.quota
    if mode == "weak":
        return Fraction(level * instance.removal)
    raise DomainError(f"unknown PJR mode {mode!r}; expected 'exact' or 'weak'")


@dataclass(frozen=True)
class PjrViolation:
    """A cohesive voter group under-represented by a committee.

    ``common`` is a set of at least ``level`` candidates every member of
    ``group`` approves; ``covered`` is the part of the committee that any
    member approves, which has fewer than ``level`` candidates.
    """

    level: int
    group: frozenset
    common: frozenset
    covered: frozenset

    def is_valid(self, instance: Instance, truthful: Profile, committee: Committee, mode: str = "exact") -> bool:
        if not self.group or self.level < 1:
            return False
        if len(self.group) < group_quota(instance, self.level, mode):
            return False
        shared = frozenset.intersection(*(truthful[i] for i in self.group))
        union = frozenset.union(*(truthful[i] for i in self.group))
        return (
            len(self.common) >= self.level
            and self.common <= shared
            and self.covered == committee & union
            and len(self.covered) < self.level
        )

    def to_record(self, instance: Instance) -> dict:
        return {
            "level": self.level,
            "group": sorted(self.group),
            "common": list(instance.ordered(self.common)),
            "covered": list(instance.ordered(self.covered)),
        }


def check_pjr_committee(instance: Instance, truthful: Profile, committee: Committee, mode: str = "exact"):
    """Return ``None`` if ``committee`` satisfies PJR, else a minimal violation.

    Rather than enumerating voter groups, this fixes the level, a candidate
    set every member must approve, and a set of fewer than ``level``
    committee members allowed to be covered; the voters compatible with
    both form the largest group for that choice.
    """
    for level in range(1, instance.k + 1):
        need = group_quota(instance, level, mode)
        if need > instance.n:
            break
        for common in combinations(instance.candidates, level):
            common = frozenset(common)
            fans = [i for i, a in enumerate(truthful) if common <= a]
            if len(fans) < need:
                continue
            # a violating group's covered set can always be padded to size level-1
            for allowed in combinations(instance.ordered(committee), level - 1):
                allowed = frozenset(allowed)
                group = frozenset(i for i in fans if truthful[i] & committee <= allowed)
                if group and len(group) >= need:
                    covered = committee & frozenset.union(*(truthful[i] for i in group))
                    return PjrViolation(level, group, common, covered)
    return None


def pjr_brute_force_oracle(
    instance: Instance, truthful: Profile, committee: Committee, mode: str = "exact", cap: int = DEFAULT_ORACLE_CAP
) -> bool:
    """Direct check over every voter subset; ``True`` iff PJR holds."""
    if instance.n > cap:
        raise ResourceLimitError(f"brute-force PJR oracle limited to n <= {cap}, got n = {instance.n}")
    for size in range(1, instance.n + 1):
        for group in combinations(range(instance.n), size):
            shared = frozenset.intersection(*(truthful[i] for i in group))
            union = frozenset.union(*(truthful[i] for i in group))
            hit = len(committee & union)
            for level in range(1, instance.k + 1):
                if size >= group_quota(instance, level, mode) and len(shared) >= level and hit < level:
                    return False
    return True


def check_pjr_lottery(instance: Instance, truthful: Profile, lottery: Lottery, mode: str = "exact"):
    """``None`` if every support committee satisfies PJR, else ``(committee, violation)``."""
    for committee in sorted(lottery, key=instance.sort_key):
        violation = check_pjr_committee(instance, truthful, committee, mode)
        if violation is not None:
            return committee, violation
    return None


def construct_pjr_committee(instance: Instance, truthful: Profile, seed=None) -> Committee:
    """A PJR committee from one sincere GreedyMonroe run.

    When k does not divide n the guarantee is for the weak variant only.
    """
    committee, _ = greedy_monroe_sample(instance, truthful, seed)
    return committee


def applicable_mode(instance: Instance) -> str:
    return "exact" if k_divides_n(instance) else "weak"
