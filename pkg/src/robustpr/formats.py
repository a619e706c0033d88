"""Instance files and report rendering.

An instance file is a JSON object::

    {
      "k": 2,
      "candidates": ["a", "b", "c"],
      "truthful": [["a", "b", "c"], ["a"], [], []],
      "reported": [[], [], [], []],      # optional, same shape as truthful
      "mode": "exact"                    # optional, "exact" or "weak"
    }

The number of voters is the number of truthful ballots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import InstanceParseError, InvalidInstanceError
from .lottery import Lottery
from .model import Instance, Profile

FIELDS = ("k", "candidates", "truthful", "reported", "mode")
REQUIRED = ("k", "candidates", "truthful")


@dataclass(frozen=True)
class InstanceFile:
    instance: Instance
    truthful: Profile
    reported: Profile | None = None
    mode: str | None = None


def _ballots(instance_cands, rows, name):
    if not isinstance(rows, list):
        raise InstanceParseError(f"'{name}' must be an array of ballots")
    known = set(instance_cands)
    out = []
    for r, row in enumerate(rows):
        if not isinstance(row, list):
            raise InstanceParseError(f"'{name}' ballot must be an array", row=r)
        for c, cand in enumerate(row):
            if cand not in known:
                raise InstanceParseError(f"'{name}' names undeclared candidate {cand!r}", row=r, col=c)
        if len(set(row)) != len(row):
            raise InstanceParseError(f"'{name}' ballot lists a candidate twice", row=r)
        out.append(frozenset(row))
    return tuple(out)


def parse_instance(text: str) -> InstanceFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"syntax error: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(data, dict):
        raise InstanceParseError("instance file must be a JSON object")
    unknown = sorted(set(data) - set(FIELDS))
    if unknown:
        raise InstanceParseError(f"unknown field(s): {', '.join(unknown)}")
    missing = [f for f in REQUIRED if f not in data]
    if missing:
        raise InstanceParseError(f"missing field(s): {', '.join(missing)}")
    k, cands = data["k"], data["candidates"]
    if isinstance(k, bool) or not isinstance(k, int):
        raise InstanceParseError("'k' must be an integer")
    if not isinstance(cands, list) or not all(isinstance(c, str) for c in cands):
        raise InstanceParseError("'candidates' must be an array of strings")
    truthful = _ballots(cands, data["truthful"], "truthful")
    reported = None
    if "reported" in data:
        reported = _ballots(cands, data["reported"], "reported")
        if len(reported) != len(truthful):
            raise InstanceParseError(
                f"'reported' has {len(reported)} ballots but 'truthful' has {len(truthful)}"
            )
    mode = data.get("mode")
    if mode is not None and mode not in ("exact", "weak"):
        raise InstanceParseError(f"'mode' must be 'exact' or 'weak', got {mode!r}")
    try:
        instance = Instance(tuple(cands), len(truthful), k)
    except InvalidInstanceError as exc:
        raise InstanceParseError(str(exc)) from None
    return InstanceFile(instance, truthful, reported, mode)


def profile_rows(instance: Instance, profile: Profile) -> list:
    return [list(instance.ordered(b)) for b in profile]


def serialize_instance(loaded: InstanceFile) -> str:
    inst = loaded.instance
    data = {"k": inst.k, "candidates": list(inst.candidates), "truthful": profile_rows(inst, loaded.truthful)}
    if loaded.reported is not None:
        data["reported"] = profile_rows(inst, loaded.reported)
    if loaded.mode is not None:
        data["mode"] = loaded.mode
    return json.dumps(data, indent=2) + "\n"


def parse_profile(instance: Instance, text: str) -> Profile:
    """A reported profile given as a JSON array of ballots."""
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"syntax error: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    profile = _ballots(instance.candidates, rows, "profile")
    if len(profile) != instance.n:
        raise InstanceParseError(f"profile has {len(profile)} ballots, expected {instance.n}")
    return profile


def fraction_text(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def lottery_record(instance: Instance, lottery: Lottery) -> list:
    return lottery.to_records(instance)


def witness_record(instance: Instance, witness) -> dict:
    return {
        "failure": witness.failure,
        "voters": list(witness.voters),
        "original": profile_rows(instance, witness.original),
        "deviation": profile_rows(instance, witness.deviation),
        "verdicts": [v.value for v in witness.verdicts],
        "profile": profile_rows(instance, witness.profile),
        "deviated_profile": profile_rows(instance, witness.deviated_profile),
        "lottery_before": lottery_record(instance, witness.before),
        "lottery_after": lottery_record(instance, witness.after),
    }


def pjr_failure_record(instance: Instance, failure) -> dict | None:
    if failure is None:
        return None
    committee, violation = failure
    return {"committee": list(instance.ordered(committee)), "violation": violation.to_record(instance)}


def equilibrium_record(instance: Instance, report) -> dict:
    return {
        "kind": report.kind,
        "verified": report.verified,
        "profile": profile_rows(instance, report.profile),
        "max_coalition": report.max_coalition,
        "pjr": report.pjr_ok,
        "pjr_failure": pjr_failure_record(instance, report.pjr_failure),
        "lottery": lottery_record(instance, report.lottery),
    }


def _cell(value) -> str:
    if isinstance(value, list) and all(isinstance(v, list) for v in value):
        return " ".join("{" + ",".join(map(str, v)) + "}" for v in value)
    if isinstance(value, list):
        return "{" + ",".join(map(str, value)) + "}"
    if value is None:
        return "-"
    return str(value)


def _table(rows: list, indent: str) -> list:
    cols = list(rows[0])
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = [indent + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    out += [indent + "  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return out


def _render(data, indent="") -> list:
    lines = []
    for key, value in data.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines += _render(value, indent + "  ")
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            flat = all(not isinstance(x, (dict, list)) or (isinstance(x, list) and not any(isinstance(y, dict) for y in x))
                       for v in value for x in v.values())
            lines.append(f"{indent}{key}:")
            if flat:
                lines += _table(value, indent + "  ")
            else:
                for j, v in enumerate(value):
                    lines.append(f"{indent}  [{j}]")
                    lines += _render(v, indent + "    ")
        else:
            lines.append(f"{indent}{key}: {_cell(value)}")
    return lines


def emit_report(result: dict, fmt: str = "structured") -> str:
    """Render a report dict as JSON (``structured``) or aligned text (``table``)."""
    if fmt == "structured":
        return json.dumps(result, indent=2) + "\n"
    if fmt == "table":
        return "\n".join(_render(result)) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
