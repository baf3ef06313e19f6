import random
import time
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from peerhelp.churn import random_scenario
from peerhelp.model import Scenario


def worked6():
    return Scenario.build(1, {1: [2], 2: [3], 3: [2], 4: [2], 5: [1], 6: [1]})


def star4():
    return Scenario.build(1, {1: [2], 2: [1], 3: [1], 4: [1]})


def cycle3():
    return Scenario.build(1, {1: [2], 2: [3], 3: [1]})


@pytest.fixture
def scenario6():
    return worked6()


@pytest.fixture
def scenario4():
    return star4()


@pytest.fixture
def scenario3():
    return cycle3()


@st.composite
def k1_scenarios(draw, min_n=2, max_n=30, heterogeneous=False):
    n = draw(st.integers(min_n, max_n))
    watches = {}
    for uid in range(1, n + 1):
        t = draw(st.integers(1, n - 1))
        watches[uid] = [t if t < uid else t + 1]
    uploads = None
    if heterogeneous:
        uploads = {uid: Fraction(draw(st.integers(1, 24)), draw(st.integers(1, 12)))
                   for uid in watches}
    return Scenario.build(1, watches, uploads)


def seeded_k1_scenarios(count=1000, seed=2024, n_lo=2, n_hi=100):
    rng = random.Random(seed)
    return [random_scenario(rng.randint(n_lo, n_hi), rng) for _ in range(count)]


# acceptance reporting: one line per criterion, plus the whole-suite runtime gate
ACCEPTANCE_RESULTS = []
SUITE_LIMIT_SECONDS = 60.0


def record_acceptance(label, passed, detail=""):
    ACCEPTANCE_RESULTS.append((label, passed, detail))
    print(f"{label}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_sessionstart(session):
    session.config._suite_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    elapsed = time.perf_counter() - config._suite_start
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[1])):
        terminalreporter.write_line(f"{label}: {'PASS' if passed else 'FAIL'} {detail}")
    ok = elapsed < SUITE_LIMIT_SECONDS
    terminalreporter.write_line(
        f"AC 10 suite runtime: {'PASS' if ok else 'FAIL'} {elapsed:.1f}s (limit {SUITE_LIMIT_SECONDS:.0f}s)")


def pytest_sessionfinish(session, exitstatus):
    if ACCEPTANCE_RESULTS and exitstatus == 0:
        if time.perf_counter() - session.config._suite_start >= SUITE_LIMIT_SECONDS:
            session.exitstatus = 1
