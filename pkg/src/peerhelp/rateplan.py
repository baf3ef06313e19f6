"""Depth-2 substream schedules for a single sub-conference, and their verification.

A source splits its video into one substream per contributor plus an optional
direct substream sent to every viewer.  A contributor forwards its substream
to every viewer other than itself: ``n - 1`` copies when it is a viewer,
``n`` copies otherwise.

The threshold ``delta = sum(capacity_j / fanout_j)`` is the rate the
contributors can carry.  With source budget ``b``:

* ``b <= delta``: the whole budget goes through contributors, scaled
  proportionally, and the group receives ``b``;
* ``b > delta``: every contributor is saturated and the remainder becomes the
  direct substream at ``(b - delta) / n``, giving ``delta + (b - delta) / n``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .model import Scenario, format_rational, parse_rational
from .phm import PHM


class Role(enum.Enum):
    IN_HELPER = "InHelper"
    OUT_HELPER = "OutHelper"
    BUSY_VIEWER = "BusyViewer"

    @property
    def in_group(self) -> bool:
        return self is not Role.OUT_HELPER


@dataclass(frozen=True)
class Contributor:
    user: int
    role: Role
    capacity: Fraction
    fanout: int

    def __post_init__(self):
        object.__setattr__(self, "capacity", Fraction(self.capacity))
        if self.capacity < 0:
            raise ValueError(f"contributor {self.user}: negative capacity {self.capacity}")
        if self.fanout < 1:
            raise ValueError(f"contributor {self.user}: fanout must be >= 1, got {self.fanout}")

    @classmethod
    def for_group(cls, user: int, role: Role, capacity, n: int) -> "Contributor":
        """Contributor whose fanout follows from its role in a group of ``n`` viewers."""
        fanout = n - 1 if role.in_group else n
        if fanout < 1:
            raise ValueError(f"in-group contributor {user} in a single-viewer group relays to nobody")
        return cls(user, role, Fraction(capacity), fanout)


@dataclass(frozen=True)
class SubPlan:
    source: int
    n: int
    budget: Fraction
    relay_rates: dict[int, Fraction]
    direct_rate: Fraction
    achieved_rate: Fraction
    threshold: Fraction | None = field(default=None, compare=False)
    v_value: Fraction | None = field(default=None, compare=False)
    contributors: tuple[Contributor, ...] = field(default=(), compare=False)

    @property
    def source_egress(self) -> Fraction:
        return sum(self.relay_rates.values(), Fraction(0)) + self.n * self.direct_rate

    @property
    def delivered(self) -> Fraction:
        return sum(self.relay_rates.values(), Fraction(0)) + self.direct_rate

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "budget": format_rational(self.budget),
            "relays": [{"user": u, "rate": format_rational(r)}
                       for u, r in sorted(self.relay_rates.items())],
            "direct": format_rational(self.direct_rate),
            "rate": format_rational(self.achieved_rate),
        }


def threshold_delta(n: int, contributors: Sequence[Contributor]) -> Fraction:
    if n < 1:
        raise ValueError(f"group size must be >= 1, got {n}")
    total = Fraction(0)
    for c in contributors:
        if c.role.in_group and n == 1:
            raise ValueError("in-group contributor in a single-viewer group")
        total += c.capacity / c.fanout
    return total


def plan_subconference(budget, n: int, contributors: Sequence[Contributor],
                       source: int = 0) -> SubPlan:
    budget = Fraction(budget)
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    delta = threshold_delta(n, contributors)
    v = (budget + (n - 1) * delta) / n
    if budget <= delta:
        relays = {c.user: budget * (c.capacity / c.fanout) / delta for c in contributors}
        direct = Fraction(0)
        achieved = budget
    else:
        relays = {c.user: c.capacity / c.fanout for c in contributors}
        direct = (budget - delta) / n
        achieved = delta + direct
    return SubPlan(source, n, budget, relays, direct, achieved, delta, v, tuple(contributors))


def plan_theorem3(scenario: Scenario, phm: PHM) -> dict[int, SubPlan]:
    """Each source spends its whole upload; its help set relays at full upload."""
    if scenario.k != 1:
        raise ValueError("rate planning is defined for k=1 scenarios only")
    up = scenario.uploads()
    plans = {}
    for s, g in scenario.sub_conferences.items():
        n = g.size
        contributors = [
            Contributor.for_group(j, Role.IN_HELPER if j in g.viewers else Role.OUT_HELPER, up[j], n)
            for j in sorted(phm.help_sets.get(s, ()))
        ]
        plans[s] = plan_subconference(up[s], n, contributors, source=s)
    return plans


def achievable_rate_formula(n: int, q: int) -> Fraction:
    """Unit-upload group rate ``1 - 1/n + 1/n^2 + q/n^2`` with ``q`` in-group helpers."""
    if n < 1 or not 0 <= q <= n - 1:
        raise ValueError(f"need n >= 1 and 0 <= q <= n-1, got n={n}, q={q}")
    return 1 - Fraction(1, n) + Fraction(1, n * n) + Fraction(q, n * n)


def corollary_lower_bound(n: int) -> Fraction:
    return 1 - Fraction(1, n) + Fraction(1, n * n)


def lemma_identity_check(u, n: int, in_cap, out_cap) -> bool:
    """Compare both sides of ``v - u = ((n-1)/n)(delta - u)`` exactly."""
    u, in_cap, out_cap = Fraction(u), Fraction(in_cap), Fraction(out_cap)
    if n < 2:
        raise ValueError("identity needs n >= 2")
    lhs = (u + in_cap + out_cap) / n - out_cap / (n * n) - u
    delta = in_cap / (n - 1) + out_cap / n
    rhs = Fraction(n - 1, n) * (delta - u)
    return lhs == rhs


class ViolationKind(enum.Enum):
    SOURCE_OVER_BUDGET = "SourceOverBudget"
    RELAY_OVER_CAPACITY = "RelayOverCapacity"
    USER_OVER_UPLINK = "UserOverUplink"
    INGRESS_SHORT = "IngressShort"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    witness: tuple[int, ...]
    amount: Fraction

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "witness": list(self.witness),
                "amount": format_rational(self.amount)}


@dataclass(frozen=True)
class FeasibilityReport:
    per_user_egress: dict[int, Fraction]
    per_viewer_ingress: dict[tuple[int, int], Fraction]
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations

    def kinds(self) -> set[ViolationKind]:
        return {v.kind for v in self.violations}


def verify_plan(scenario: Scenario, plans: Mapping[int, SubPlan]) -> FeasibilityReport:
    """Aggregate every user's egress over all its roles and check each viewer's ingress.

    Relay duties are charged against the relaying user's uplink; the fanout of a
    relay is derived from the scenario (``n - 1`` for viewers, ``n`` otherwise),
    never taken from the plan.
    """
    subs = scenario.sub_conferences
    missing = sorted(set(subs) - set(plans))
    unknown = sorted(set(plans) - set(subs))
    if missing or unknown:
        raise ValueError(f"plans do not match sub-conferences: missing {missing}, unknown {unknown}")
    up = scenario.uploads()
    egress = {uid: Fraction(0) for uid in up}
    ingress: dict[tuple[int, int], Fraction] = {}
    violations: list[Violation] = []

    for s, plan in sorted(plans.items()):
        g = subs[s].viewers
        n = len(g)
        sent = sum(plan.relay_rates.values(), Fraction(0)) + n * plan.direct_rate
        excess = max(plan.budget - up[s], sent - plan.budget)
        if excess > 0:
            violations.append(Violation(ViolationKind.SOURCE_OVER_BUDGET, (s,), excess))
        egress[s] += sent
        for j, r in sorted(plan.relay_rates.items()):
            if j == s or j not in up:
                raise ValueError(f"sub-conference {s}: invalid relay user {j}")
            fanout = n - 1 if j in g else n
            out = fanout * r
            if out > up[j]:
                violations.append(Violation(ViolationKind.RELAY_OVER_CAPACITY, (j, s), out - up[j]))
            egress[j] += out
        delivered = sum(plan.relay_rates.values(), Fraction(0)) + plan.direct_rate
        for viewer in sorted(g):
            ingress[(viewer, s)] = delivered
            if delivered < plan.achieved_rate:
                violations.append(Violation(ViolationKind.INGRESS_SHORT, (viewer, s),
                                            plan.achieved_rate - delivered))

    for uid, e in egress.items():
        if e > up[uid]:
            violations.append(Violation(ViolationKind.USER_OVER_UPLINK, (uid,), e - up[uid]))
    return FeasibilityReport(egress, ingress, tuple(violations))


def plans_to_dict(plans: Mapping[int, SubPlan], mode: str) -> dict:
    return {"mode": mode, "subplans": [plans[s].to_dict() for s in sorted(plans)]}


def dump_plans(plans: Mapping[int, SubPlan], mode: str) -> str:
    return json.dumps(plans_to_dict(plans, mode), indent=2) + "\n"


_PLAN_FIELDS = {"mode", "subplans"}
_SUBPLAN_FIELDS = {"source", "budget", "relays", "direct", "rate"}


def load_plans(text: str, scenario: Scenario) -> tuple[str, dict[int, SubPlan]]:
    """Parse a plan file.  Group sizes come from ``scenario``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) != _PLAN_FIELDS:
        raise ValueError(f"plan file must be an object with fields {sorted(_PLAN_FIELDS)}")
    mode = data["mode"]
    if mode not in ("theorem3", "capacity"):
        raise ValueError(f"unknown mode {mode!r}")
    plans = {}
    for idx, sp in enumerate(data["subplans"]):
        if not isinstance(sp, dict) or set(sp) != _SUBPLAN_FIELDS:
            raise ValueError(f"subplans[{idx}] must have fields {sorted(_SUBPLAN_FIELDS)}")
        s = sp["source"]
        if s not in scenario.sub_conferences:
            raise ValueError(f"subplans[{idx}]: source {s} has no sub-conference")
        if s in plans:
            raise ValueError(f"subplans[{idx}]: duplicate source {s}")
        relays = {}
        for r in sp["relays"]:
            rate = parse_rational(r["rate"])
            if rate < 0:
                raise ValueError(f"subplans[{idx}]: negative relay rate for user {r['user']}")
            relays[r["user"]] = rate
        direct = parse_rational(sp["direct"])
        if direct < 0:
            raise ValueError(f"subplans[{idx}]: negative direct rate")
        plans[s] = SubPlan(s, scenario.sub_conferences[s].size, parse_rational(sp["budget"]),
                           relays, direct, parse_rational(sp["rate"]))
    return mode, plans
