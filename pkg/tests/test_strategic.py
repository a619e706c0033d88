import random
from fractions import Fraction

import pytest

from conftest import random_instance
from robustpr.errors import DomainError, ResourceLimitError
from robustpr.lottery import Lottery, satisfaction_distribution, ul_compare, worst_case_compare
from robustpr.model import Instance, Ordering
from robustpr.pjr import check_pjr_lottery
from robustpr.strategic import (
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

GM = "greedy-monroe"
SIX = Instance(tuple("abcd"), 6, 3)
SINCERE = SIX.profile([{"c"}, {"c", "b"}, {"b"}, {"b"}, {"d"}, {"d"}])
THREE = Instance(tuple("abc"), 4, 2)
TIGHT = THREE.profile([set("abc"), {"a"}, set(), set()])
ALL_A = THREE.profile([{"a"}] * 4)
AV_CASE = THREE.profile([{"a"}, {"a"}, {"b", "c"}, set()])
FOUR = Instance(tuple("abcd"), 4, 2)
PAIRS = FOUR.profile([{"a"}, {"a"}, {"b"}, {"b"}])
E = frozenset()


def _coordinated_six():
    # a run where voter 2 is consumed by b, leaving c short and some abstainers
    for seed in range(100):
        reported, trace = construct_coordinated_profile(SIX, SINCERE, seed)
        if any(reported) and not all(reported):
            return reported, trace
    raise AssertionError("no run with abstainers")


def test_pivotable_voters():
    reported, _ = _coordinated_six()
    for i, b in enumerate(reported):
        assert is_pivotable(GM, SIX, reported, i) is bool(b)
    assert not any(is_pivotable(GM, THREE, THREE.abstain_profile(), i) for i in range(4))


def test_best_response_sets():
    opponents = [SINCERE[0]] + list(SINCERE[2:])
    best = best_response_set(GM, SIX, SINCERE[1], opponents)
    assert frozenset("c") in best and SINCERE[1] not in best
    assert len(best_response_set(GM, THREE, E, [E, E, E])) == 8
    assert E in best_response_set(GM, THREE, frozenset("a"), [E, E, E])
    with pytest.raises(DomainError):
        best_response_set(GM, THREE, E, [E])


def test_is_pne():
    reported, _ = _coordinated_six()
    assert is_pne(GM, SIX, SINCERE, reported) is None
    witness = is_pne(GM, SIX, SINCERE, SINCERE)
    assert witness.voters == (1,) and witness.deviation == (frozenset("c"),)
    assert is_pne(GM, THREE, TIGHT, THREE.abstain_profile()) is None


def test_costly_voting_equilibrium():
    assert is_costly_voting_equilibrium(GM, THREE, TIGHT, THREE.abstain_profile()) is None
    reported, _ = construct_coordinated_profile(FOUR, PAIRS, 0)
    assert is_costly_voting_equilibrium(GM, FOUR, PAIRS, reported) is None
    lone = THREE.profile([E, {"a"}, E, E])
    witness = is_costly_voting_equilibrium(GM, THREE, TIGHT, lone)
    assert witness.voters == (1,) and witness.failure == "costly"
    assert witness.verdicts == (Ordering.INDIFFERENT,)


def test_strong_deviation_by_grand_coalition():
    abstain = THREE.abstain_profile()
    game = Game(GM, THREE, ALL_A)
    assert satisfaction_distribution(game.lottery(abstain), frozenset("a"), 2)[0] == Fraction(1, 3)
    witness = is_strong_equilibrium(GM, THREE, ALL_A, abstain, "strong-pne", 4)
    assert witness is not None and witness.failure == "strong"
    assert all(v is Ordering.FIRST for v in witness.verdicts)
    unanimous = THREE.profile([{"a"}] * 4)
    assert satisfaction_distribution(game.lottery(unanimous), frozenset("a"), 2)[0] == 0
    assert game.strong_witness(abstain, 4) == witness
    # pairs suffice: two voters reach n/k = 2
    assert len(witness.voters) == 2


def test_single_member_coalitions_reduce_to_unilateral_checks():
    rng = random.Random(31)
    for _ in range(15):
        inst, truthful = random_instance(rng, n_max=4, m_max=3)
        game = Game(GM, inst, truthful)
        for _ in range(8):
            reported = tuple(rng.choice(game.ballots) for _ in range(inst.n))
            assert (game.witness(reported, "strong-pne", 1) is None) == (game.pne_witness(reported) is None)
            assert (game.witness(reported, "strong-costly", 1) is None) == (game.costly_witness(reported) is None)


def test_strong_costly_equilibria_satisfy_pjr():
    truthful = THREE.profile([{"a"}, {"b"}, {"c"}, {"c"}])
    found = enumerate_equilibria(GM, THREE, truthful, "strong-costly")
    assert found
    for rep in found:
        assert check_pjr_lottery(THREE, truthful, rep.lottery) is None


def test_witnesses_are_sound():
    rng = random.Random(41)
    for _ in range(20):
        inst, truthful = random_instance(rng, n_max=4, m_max=3)
        game = Game(GM, inst, truthful)
        for _ in range(6):
            reported = tuple(rng.choice(game.ballots) for _ in range(inst.n))
            for kind in ("pne", "costly", "strong-pne"):
                w = game.witness(reported, kind)
                if w is None:
                    continue
                fresh = Game(GM, inst, truthful)
                assert fresh.lottery(w.deviated_profile) == w.after
                for i, verdict in zip(w.voters, w.verdicts):
                    again = ul_compare(w.after, w.before, truthful[i], inst.k)
                    assert again is verdict
                    assert again is (Ordering.INDIFFERENT if w.failure == "costly" else Ordering.FIRST)


def test_construction_examples():
    for seed in range(10):
        reported, trace = construct_coordinated_profile(FOUR, PAIRS, seed)
        assert reported == PAIRS and trace.first_stage == frozenset("ab")
    reported, trace = construct_coordinated_profile(THREE, THREE.abstain_profile(), 0)
    assert reported == THREE.abstain_profile() and not trace.steps
    with pytest.raises(DomainError):
        construct_coordinated_profile(Instance(tuple("abc"), 3, 2), (E, E, E))


def test_equilibrium_deters_deviation_in_worst_case():
    eq, _ = construct_coordinated_profile(FOUR, PAIRS, 0)
    game = Game(GM, FOUR, PAIRS)
    deviated = game.replaced(eq, 0, E)
    assert worst_case_compare(game.lottery(eq), game.lottery(deviated), frozenset("a")) is Ordering.FIRST


def test_strategyproofness():
    witness = check_strategyproofness(GM, SIX, SINCERE)
    assert witness.voters == (1,) and witness.deviation == (frozenset("c"),)
    assert witness.after == Lottery.point("bcd")
    solo = Instance(tuple("ab"), 1, 1)
    truthful = solo.profile([{"a"}])
    assert check_strategyproofness(GM, solo, truthful) is None
    assert check_strategyproofness("av", solo, truthful) is None
    blind = THREE.profile([E, E, E, E])
    family = [tuple(random.Random(s).choice(THREE.ballots()) for _ in range(4)) for s in range(10)]
    assert check_strategyproofness(GM, THREE, blind, family) is None


def test_enumeration_examples():
    av = enumerate_equilibria("av", THREE, AV_CASE, "costly")
    assert not any(rep.pjr_ok for rep in av)
    tight = enumerate_equilibria(GM, THREE, TIGHT, "costly")
    assert [r.profile for r in tight] == [THREE.abstain_profile()]
    blind = enumerate_equilibria(GM, THREE, THREE.abstain_profile(), "costly")
    assert [r.profile for r in blind] == [THREE.abstain_profile()]
    with pytest.raises(ResourceLimitError):
        enumerate_equilibria(GM, SIX, SINCERE, "pne", limit=1000)
    with pytest.raises(DomainError):
        enumerate_equilibria(GM, THREE, TIGHT, "nash")


def test_parallel_enumeration_matches_serial():
    serial = enumerate_equilibria(GM, THREE, ALL_A, "pne")
    parallel = enumerate_equilibria(GM, THREE, ALL_A, "pne", jobs=3)
    assert [r.profile for r in serial] == [r.profile for r in parallel]


def test_kind_lattice():
    rng = random.Random(53)
    for _ in range(6):
        inst, truthful = random_instance(rng, n_max=3, m_max=3)
        by_kind = {
            kind: {r.profile for r in enumerate_equilibria(GM, inst, truthful, kind)}
            for kind in ("pne", "costly", "strong-pne", "strong-costly")
        }
        assert by_kind["costly"] <= by_kind["pne"]
        assert by_kind["strong-costly"] <= by_kind["strong-pne"] & by_kind["costly"]
        assert by_kind["strong-pne"] <= by_kind["pne"]


def test_abstaining_is_costly_equilibrium_when_quota_exceeds_one():
    rng = random.Random(61)
    checked = 0
    while checked < 40:
        inst, truthful = random_instance(rng, n_max=8, m_max=4, divides=False, n_min=2)
        if inst.n <= inst.k:
            continue
        assert is_costly_voting_equilibrium(GM, inst, truthful, inst.abstain_profile()) is None
        checked += 1


def test_dynamics_fixed_point_start():
    result = best_response_dynamics(GM, THREE, TIGHT, THREE.abstain_profile(), costly=True)
    assert result.status == "converged" and result.steps == 0 and result.improving_steps == 0


@pytest.mark.parametrize("schedule", ["round-robin", "random"])
def test_dynamics_reach_abstention(schedule):
    result = best_response_dynamics(GM, THREE, TIGHT, TIGHT, schedule, seed=3, costly=True)
    assert result.status == "converged"
    assert result.profile == THREE.abstain_profile()
    assert is_costly_voting_equilibrium(GM, THREE, TIGHT, result.profile) is None


def test_dynamics_terminal_profiles_are_equilibria():
    rng = random.Random(71)
    for _ in range(25):
        inst, truthful = random_instance(rng, n_max=6, m_max=4)
        costly = rng.random() < 0.5
        result = best_response_dynamics(GM, inst, truthful, truthful, seed=rng.random(), costly=costly, max_steps=200)
        assert result.status in ("converged", "cycled", "step-limit")
        if result.status == "converged":
            check = is_costly_voting_equilibrium if costly else is_pne
            assert check(GM, inst, truthful, result.profile) is None


def test_dynamics_step_limit_and_schedule_validation():
    result = best_response_dynamics(GM, SIX, SINCERE, SINCERE, max_steps=1)
    assert result.status in ("converged", "step-limit")
    with pytest.raises(DomainError):
        best_response_dynamics(GM, SIX, SINCERE, SINCERE, "sequential")
