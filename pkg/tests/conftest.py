import random

import pytest

from robustpr.model import Instance

ACCEPTANCE_RESULTS = {}


def random_instance(rng, n_max, m_max, divides=True, n_min=1, approve=0.4):
    """Random instance with k < |C| (and k | n when ``divides``) plus a truthful profile."""
    while True:
        m = rng.randint(2, m_max)
        k = rng.randint(1, m - 1)
        ns = [n for n in range(max(1, n_min), n_max + 1) if not divides or n % k == 0]
        if ns:
            break
    n = rng.choice(ns)
    cands = tuple("abcdefgh"[:m])
    inst = Instance(cands, n, k)
    truthful = inst.profile([{c for c in cands if rng.random() < approve} for _ in range(n)])
    return inst, truthful


@pytest.fixture
def rng():
    return random.Random(20261015)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, label = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {label}")
