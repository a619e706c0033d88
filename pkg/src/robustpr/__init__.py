"""Proportional representation with strategic approval voters.

Exact lotteries for the modified GreedyMonroe and AV rules, PJR checking,
and equilibrium analysis (pure Nash, costly voting, strong variants).
"""

from .errors import (
    DomainError,
    InstanceParseError,
    InvalidInstanceError,
    ResourceLimitError,
    RobustPRError,
)
from .lottery import (
    Lottery,
    satisfaction_distribution,
    sd_compare,
    ul_compare,
    worst_case_compare,
)
from .model import (
    Instance,
    Ordering,
    committee_satisfaction,
    compare_committees,
    k_divides_n,
    sufficiency_condition,
)
from .pjr import (
    PjrViolation,
    check_pjr_committee,
    check_pjr_lottery,
    construct_pjr_committee,
    pjr_brute_force_oracle,
)
from .rules import (
    AV,
    GREEDY_MONROE,
    RuleTrace,
    approval_scores,
    av_exact,
    av_sample,
    greedy_monroe_exact,
    greedy_monroe_sample,
    hypergeometric_all_marked,
)
from .strategic import (
    DeviationWitness,
    EquilibriumReport,
    Game,
    best_response_dynamics,
    best_response_set,
    check_strategyproofness,
    construct_coordinated_profile,
    enumerate_equilibria,
    is_costly_voting_equilibrium,
    is_pivotable,
    is_pne,
    is_strong_equilibrium,
)

__version__ = "0.1.0"
