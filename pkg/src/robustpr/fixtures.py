"""Embedded reference instances and the claims checked on each of them.

``run_fixture`` returns ``(report, ok)`` where ``ok`` says whether the
expected behaviour was reproduced.  Every run is deterministic.
"""

from __future__ import annotations

from .formats import equilibrium_record, lottery_record, profile_rows, witness_record
from .lottery import Lottery
from .model import Instance, Ordering, sufficiency_condition
from .pjr import check_pjr_lottery
from .strategic import (
    Game,
    check_strategyproofness,
    construct_coordinated_profile,
    enumerate_equilibria,
)

FIXTURES = {
    "thm3": {
        "summary": "GreedyMonroe is not strategyproof: voter index 1 gains by dropping b",
        "candidates": ["a", "b", "c", "d"],
        "k": 3,
        "truthful": [["c"], ["c", "b"], ["b"], ["b"], ["d"], ["d"]],
    },
    "thm4-demo": {
        "summary": "coordinated profiles from sincere runs are PJR equilibria",
        "candidates": ["a", "b", "c", "d"],
        "k": 2,
        "truthful": [["a"], ["a"], ["b"], ["b"]],
    },
    "thm5": {
        "summary": "without enough disapproved candidates, only all-abstain is a costly voting equilibrium",
        "candidates": ["a", "b", "c"],
        "k": 2,
        "truthful": [["a", "b", "c"], ["a"], [], []],
    },
    "thm6-demo": {
        "summary": "every strong costly voting equilibrium satisfies PJR",
        "candidates": ["a", "b", "c"],
        "k": 2,
        "truthful": [["a"], ["b"], ["c"], ["c"]],
    },
    "thm7-demo": {
        "summary": "GreedyMonroe admits a costly voting equilibrium (all abstain) that violates PJR",
        "candidates": ["a", "b", "c"],
        "k": 2,
        "truthful": [["a"], ["b"], ["c"], ["c"]],
    },
    "prop2": {
        "summary": "under AV no costly voting equilibrium supports a PJR outcome",
        "candidates": ["a", "b", "c"],
        "k": 2,
        "truthful": [["a"], ["a"], ["b", "c"], []],
    },
}

# the 6-voter instance doubles as a second construction demo (k=3 divides n=6)
_EXTRA_CONSTRUCTION = ["thm3"]
_CONSTRUCTION_SEEDS = range(8)


def fixture_instance(fixture_id: str):
    try:
        data = FIXTURES[fixture_id]
    except KeyError:
        raise KeyError(f"unknown fixture {fixture_id!r}; expected one of {sorted(FIXTURES)}") from None
    instance = Instance(tuple(data["candidates"]), len(data["truthful"]), data["k"])
    return instance, instance.profile(data["truthful"])


def _base(fixture_id, instance, truthful, rule):
    return {
        "fixture": fixture_id,
        "summary": FIXTURES[fixture_id]["summary"],
        "rule": rule,
        "k": instance.k,
        "candidates": list(instance.candidates),
        "truthful": profile_rows(instance, truthful),
    }


def _thm3(fid, instance, truthful):
    report = _base(fid, instance, truthful, "greedy-monroe")
    witness = check_strategyproofness("greedy-monroe", instance, truthful)
    report["witness"] = None if witness is None else witness_record(instance, witness)
    ok = (
        witness is not None
        and witness.voters == (1,)
        and witness.deviation == (frozenset("c"),)
        and witness.after == Lottery.point(frozenset("bcd"))
        and witness.verdicts == (Ordering.FIRST,)
    )
    return report, ok


def _construction_runs(instance, truthful):
    game = Game("greedy-monroe", instance, truthful)
    sufficient = sufficiency_condition(instance, truthful)
    runs, ok = [], True
    for seed in _CONSTRUCTION_SEEDS:
        reported, trace = construct_coordinated_profile(instance, truthful, seed)
        lottery = game.lottery(reported)
        checks = {
            "subset_of_truthful": all(r <= a for r, a in zip(reported, truthful)),
            "pne": game.pne_witness(reported) is None,
            "first_stage_certain": lottery.probability_contains(trace.first_stage) == 1,
            "pjr": check_pjr_lottery(instance, truthful, lottery) is None,
        }
        if sufficient:
            checks["costly"] = game.costly_witness(reported) is None
        ok = ok and all(checks.values())
        runs.append({"seed": seed, "reported": profile_rows(instance, reported), **checks})
    return runs, ok


def _thm4(fid, instance, truthful):
    report = _base(fid, instance, truthful, "greedy-monroe")
    report["sufficiency_condition"] = sufficiency_condition(instance, truthful)
    runs, ok = _construction_runs(instance, truthful)
    report["runs"] = runs
    for other in _EXTRA_CONSTRUCTION:
        inst2, truth2 = fixture_instance(other)
        runs2, ok2 = _construction_runs(inst2, truth2)
        report[f"runs_{other}_instance"] = runs2
        ok = ok and ok2
    return report, ok


def _thm5(fid, instance, truthful):
    report = _base(fid, instance, truthful, "greedy-monroe")
    found = enumerate_equilibria("greedy-monroe", instance, truthful, "costly")
    report["equilibria"] = [equilibrium_record(instance, r) for r in found]
    only_abstain = [r.profile for r in found] == [instance.abstain_profile()]
    misses_a = only_abstain and found[0].lottery.probability_contains({"a"}) < 1
    report["sincere_lottery"] = lottery_record(instance, Game("greedy-monroe", instance, truthful).lottery(truthful))
    return report, only_abstain and misses_a


def _thm6(fid, instance, truthful):
    report = _base(fid, instance, truthful, "greedy-monroe")
    found = enumerate_equilibria("greedy-monroe", instance, truthful, "strong-costly")
    report["equilibria"] = [equilibrium_record(instance, r) for r in found]
    return report, all(r.pjr_ok for r in found)


def _thm7(fid, instance, truthful):
    report = _base(fid, instance, truthful, "greedy-monroe")
    game = Game("greedy-monroe", instance, truthful)
    abstain = instance.abstain_profile()
    rec = game.report(abstain, "costly")
    report["equilibrium"] = equilibrium_record(instance, rec)
    return report, rec.verified and not rec.pjr_ok


def _prop2(fid, instance, truthful):
    report = _base(fid, instance, truthful, "av")
    found = enumerate_equilibria("av", instance, truthful, "costly")
    report["equilibria"] = [equilibrium_record(instance, r) for r in found]
    report["pjr_supporting"] = sum(r.pjr_ok for r in found)
    return report, report["pjr_supporting"] == 0


_RUNNERS = {
    "thm3": _thm3,
    "thm4-demo": _thm4,
    "thm5": _thm5,
    "thm6-demo": _thm6,
    "thm7-demo": _thm7,
    "prop2": _prop2,
}


def run_fixture(fixture_id: str):
    instance, truthful = fixture_instance(fixture_id)
    report, ok = _RUNNERS[fixture_id](fixture_id, instance, truthful)
    report["reproduced"] = ok
    return report, ok
