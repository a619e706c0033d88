"""Command-line front end.

Exit codes: 0 success, 1 claim not reproduced / check failed,
2 usage or parse error, 3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import InvalidInstanceError, ResourceLimitError
from .fixtures import FIXTURES, run_fixture
from .formats import (
    emit_report,
    equilibrium_record,
    lottery_record,
    parse_instance,
    parse_profile,
    profile_rows,
    witness_record,
)
from .pjr import check_pjr_committee
from .rules import default_state_budget, get_rule, greedy_monroe_sample
from .strategic import KINDS, Game, best_response_dynamics, enumerate_equilibria

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path):
    try:
        with open(path) as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read instance file: {exc}") from None


def _profile_arg(instance, value):
    if value.startswith("@"):
        with open(value[1:]) as fh:
            value = fh.read()
    return parse_profile(instance, value)


def _reported_or_truthful(loaded):
    return loaded.reported if loaded.reported is not None else loaded.truthful


def _emit(args, report):
    sys.stdout.write(emit_report(report, args.format))


def cmd_pjr_check(args):
    loaded = _load(args.instance)
    mode = args.mode or loaded.mode
    if mode is None:
        raise UsageError("--mode exact|weak is required (or set 'mode' in the instance file)")
    names = [c.strip() for c in args.committee.split(",") if c.strip()]
    committee = loaded.instance.committee(names)
    violation = check_pjr_committee(loaded.instance, loaded.truthful, committee, mode)
    _emit(args, {
        "committee": list(loaded.instance.ordered(committee)),
        "mode": mode,
        "pjr": violation is None,
        "violation": None if violation is None else violation.to_record(loaded.instance),
    })
    return EXIT_OK if violation is None else EXIT_FAIL


def cmd_run_rule(args):
    loaded = _load(args.instance)
    inst = loaded.instance
    profile = loaded.truthful if args.profile == "truthful" else _reported_or_truthful(loaded)
    rule = get_rule(args.rule)
    report = {"rule": rule.name, "mode": args.mode, "profile": profile_rows(inst, profile)}
    if args.mode == "exact":
        report["lottery"] = lottery_record(inst, rule.lottery(inst, profile, args.state_budget))
    elif rule.name == "greedy-monroe":
        committee, trace = greedy_monroe_sample(inst, profile, args.seed)
        report["seed"] = args.seed
        report["committee"] = list(inst.ordered(committee))
        report["first_stage"] = [
            {"candidate": c, "removed_voters": sorted(voters)} for c, voters in trace.steps
        ]
        report["fill"] = list(inst.ordered(trace.fill))
    else:
        report["seed"] = args.seed
        report["committee"] = list(inst.ordered(rule.sample(inst, profile, args.seed)))
    _emit(args, report)
    return EXIT_OK


def cmd_equilibria(args):
    loaded = _load(args.instance)
    inst = loaded.instance
    if args.enumerate:
        found = enumerate_equilibria(
            args.rule, inst, loaded.truthful, args.kind,
            max_coalition=args.max_coalition, state_budget=args.state_budget,
            mode=loaded.mode or "exact", jobs=args.jobs,
        )
        if args.require_pjr:
            found = [r for r in found if r.pjr_ok]
        _emit(args, {
            "rule": args.rule,
            "kind": args.kind,
            "require_pjr": args.require_pjr,
            "count": len(found),
            "equilibria": [equilibrium_record(inst, r) for r in found],
        })
        return EXIT_OK if found else EXIT_FAIL
    if args.verify is not None:
        reported = _profile_arg(inst, args.verify)
    elif loaded.reported is not None:
        reported = loaded.reported
    else:
        raise UsageError("give --enumerate, --verify PROFILE, or a 'reported' field in the instance")
    game = Game(args.rule, inst, loaded.truthful, args.state_budget)
    witness = game.witness(reported, args.kind, args.max_coalition)
    rec = game.report(reported, args.kind, args.max_coalition, loaded.mode or "exact")
    out = {"rule": args.rule, **equilibrium_record(inst, rec)}
    out["witness"] = None if witness is None else witness_record(inst, witness)
    _emit(args, out)
    ok = rec.verified and (rec.pjr_ok or not args.require_pjr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_reproduce(args):
    ids = sorted(FIXTURES) if args.fixture == "all" else [args.fixture]
    reports, ok = [], True
    for fid in ids:
        report, good = run_fixture(fid)
        reports.append(report)
        ok = ok and good
    _emit(args, reports[0] if len(reports) == 1 else {"fixtures": reports, "reproduced": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dynamics(args):
    loaded = _load(args.instance)
    inst = loaded.instance
    start = {
        "truthful": loaded.truthful,
        "reported": _reported_or_truthful(loaded),
        "abstain": inst.abstain_profile(),
    }[args.start]
    result = best_response_dynamics(
        args.rule, inst, loaded.truthful, start, args.schedule,
        seed=args.seed, max_steps=args.max_steps, costly=args.costly, state_budget=args.state_budget,
    )
    _emit(args, {
        "rule": args.rule,
        "status": result.status,
        "steps": result.steps,
        "improving_steps": result.improving_steps,
        "profile": profile_rows(inst, result.profile),
        "trace": [
            {"step": s, "voter": v, "from": list(inst.ordered(a)), "to": list(inst.ordered(b))}
            for s, v, a, b in result.trace
        ],
    })
    return EXIT_OK if result.status == "converged" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustpr", description="Proportional representation with strategic approval voters."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "structured"), default="table")
    common.add_argument("--state-budget", type=int, default=None,
                        help=f"memo-state cap for exact GreedyMonroe (default {default_state_budget()})")
    common.add_argument("--jobs", type=int, default=1)
    ruled = argparse.ArgumentParser(add_help=False)
    ruled.add_argument("--instance", required=True)
    ruled.add_argument("--rule", choices=("greedy-monroe", "av"), default="greedy-monroe")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pjr-check", parents=[common], help="check a committee for PJR")
    p.add_argument("--instance", required=True)
    p.add_argument("--committee", required=True, help="comma-separated candidate ids")
    p.add_argument("--mode", choices=("exact", "weak"))
    p.set_defaults(func=cmd_pjr_check)

    p = sub.add_parser("run-rule", parents=[common, ruled], help="sample or evaluate a rule")
    p.add_argument("--mode", choices=("sample", "exact"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=("reported", "truthful"), default="reported")
    p.set_defaults(func=cmd_run_rule)

    p = sub.add_parser("equilibria", parents=[common, ruled], help="verify or enumerate equilibria")
    p.add_argument("--kind", choices=KINDS, default="costly")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--enumerate", action="store_true")
    group.add_argument("--verify", metavar="PROFILE", help="JSON array of ballots, or @file")
    p.add_argument("--max-coalition", type=int, default=None)
    p.add_argument("--require-pjr", action="store_true")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("reproduce", parents=[common], help="run an embedded reference fixture")
    p.add_argument("fixture", choices=sorted(FIXTURES) + ["all"])
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("dynamics", parents=[common, ruled], help="simulate best-response dynamics")
    p.add_argument("--start", choices=("truthful", "reported", "abstain"), default="truthful")
    p.add_argument("--schedule", choices=("round-robin", "random"), default="round-robin")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--costly", action="store_true")
    p.set_defaults(func=cmd_dynamics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InvalidInstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
