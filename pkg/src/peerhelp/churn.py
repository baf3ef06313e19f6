"""Seeded random scenarios and watch-switch churn.

Each step applies a number of uniformly random switches, rebuilds the PHM
from scratch, plans, verifies and emits one :class:`MetricsRecord`.
"""
from __future__ import annotations

import csv
import io
import json
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .capacity import DEFAULT_TARGET, plan_capacity
from .model import Scenario, UserProfile, format_decimal, format_rational
from .phm import PHM, build_phm
from .rateplan import FeasibilityReport, SubPlan, plan_theorem3, verify_plan

MODES = ("theorem3", "capacity")


def random_scenario(n: int, rng: random.Random, k: int = 1,
                    upload_den: int | None = None) -> Scenario:
    """Each user watches ``k`` distinct others drawn uniformly.

    With ``upload_den`` set, uploads are random rationals ``p/upload_den`` in
    ``(0, 2]``; otherwise every upload is 1.
    """
    if n < k + 1:
        raise ValueError(f"need at least k+1={k + 1} users, got {n}")
    users = []
    for uid in range(1, n + 1):
        others = [v for v in range(1, n + 1) if v != uid]
        watches = rng.sample(others, k)
        up = Fraction(1) if upload_den is None else Fraction(rng.randint(1, 2 * upload_den), upload_den)
        users.append(UserProfile(uid, frozenset(watches), up))
    return Scenario(k, tuple(users))


def generate_scenario(n: int, seed: int, k: int = 1) -> Scenario:
    if n < 2:
        raise ValueError(f"need N >= 2, got {n}")
    return random_scenario(n, random.Random(seed), k)


def apply_switch(scenario: Scenario, user: int, new_target: int) -> Scenario:
    if scenario.k != 1:
        raise ValueError("switching is defined for k=1 scenarios")
    ids = set(scenario.ids)
    if user not in ids:
        raise ValueError(f"unknown user {user}")
    if new_target == user:
        raise ValueError(f"user {user}: self-watch")
    if new_target not in ids:
        raise ValueError(f"user {user}: unknown watch target {new_target}")
    users = tuple(UserProfile(u.id, frozenset({new_target}), u.upload) if u.id == user else u
                  for u in scenario.users)
    return Scenario(scenario.k, users)


@dataclass(frozen=True)
class ChurnConfig:
    users: int
    steps: int
    seed: int = 0
    switches_per_step: int = 1
    mode: str = "theorem3"
    capacity_target: Fraction = DEFAULT_TARGET

    def __post_init__(self):
        object.__setattr__(self, "capacity_target", Fraction(self.capacity_target))
        if self.users < 2:
            raise ValueError(f"need at least 2 users, got {self.users}")
        if self.steps < 1:
            raise ValueError(f"need at least 1 step, got {self.steps}")
        if self.switches_per_step < 0:
            raise ValueError("switches_per_step must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    sub_conference_count: int
    idle_count: int
    group_size_histogram: dict[int, int]
    min_rate: Fraction
    per_source_rates: dict[int, Fraction]
    feasible: bool
    phm_rebuilt: bool = True

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "subConferenceCount": self.sub_conference_count,
            "idleCount": self.idle_count,
            "groupSizeHistogram": {str(s): c for s, c in sorted(self.group_size_histogram.items())},
            "minRate": format_rational(self.min_rate),
            "perSourceRates": {str(s): format_rational(r)
                               for s, r in sorted(self.per_source_rates.items())},
            "feasible": self.feasible,
            "phmRebuilt": self.phm_rebuilt,
        }


@dataclass(frozen=True)
class StepState:
    scenario: Scenario
    phm: PHM
    plans: dict[int, SubPlan]
    report: FeasibilityReport
    record: MetricsRecord


def plan_step(scenario: Scenario, mode: str, target=DEFAULT_TARGET, step: int = 0) -> StepState:
    phm = build_phm(scenario)
    if mode == "capacity":
        plans = plan_capacity(scenario, phm, target)
    else:
        plans = plan_theorem3(scenario, phm)
    report = verify_plan(scenario, plans)
    rates = {s: p.achieved_rate for s, p in plans.items()}
    record = MetricsRecord(
        step=step,
        sub_conference_count=scenario.busy_count,
        idle_count=len(scenario.idle_set),
        group_size_histogram=dict(sorted(Counter(g.size for g in scenario.sub_conferences.values()).items())),
        min_rate=min(rates.values()),
        per_source_rates=rates,
        feasible=report.feasible,
    )
    return StepState(scenario, phm, plans, report, record)


def iter_states(config: ChurnConfig) -> Iterator[StepState]:
    rng = random.Random(config.seed)
    scenario = random_scenario(config.users, rng)
    ids = scenario.ids
    for step in range(config.steps):
        for _ in range(config.switches_per_step):
            user = rng.choice(ids)
            target = rng.choice([v for v in ids if v != user])
            scenario = apply_switch(scenario, user, target)
        yield plan_step(scenario, config.mode, config.capacity_target, step)


def run_simulation(config: ChurnConfig) -> Iterator[MetricsRecord]:
    for state in iter_states(config):
        yield state.record


def records_to_jsonl(records) -> str:
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "sub_conference_count", "idle_count", "min_rate", "min_rate_decimal",
                "feasible", "phm_rebuilt"])
    for r in records:
        w.writerow([r.step, r.sub_conference_count, r.idle_count, format_rational(r.min_rate),
                    format_decimal(r.min_rate), int(r.feasible), int(r.phm_rebuilt)])
    return buf.getvalue()
