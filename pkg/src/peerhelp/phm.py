"""Peer-Help Module: assigning idle users as helpers to sub-conferences (k = 1).

Construction:

* ``Q_i = G_i & U_S`` are the idle viewers of sub-conference ``i``.
* If ``|Q_i| < |G_i|`` all of ``Q_i`` help their own group.
* If ``|Q_i| = |G_i|`` (every viewer idle) the largest id is exported to a
  pool ``W`` and the rest help locally.
* Deficient groups (ascending source id) then take ``|G_i| - 1 - |Q_i|``
  users from ``W`` (ascending user id).

The result has ``|P_i| = |G_i| - 1`` for every group, which is only possible
because the idle count equals ``sum(|G_i| - 1)`` when ``k = 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .model import Scenario


@dataclass(frozen=True)
class ConstructionTrace:
    exported: tuple[tuple[int, int], ...] = ()
    w_set: frozenset[int] = frozenset()
    assignments: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "exported": [list(p) for p in self.exported],
            "wSet": sorted(self.w_set),
            "assignments": [list(p) for p in self.assignments],
        }


@dataclass(frozen=True)
class PHM:
    help_sets: dict[int, frozenset[int]]
    q_sets: dict[int, frozenset[int]]
    trace: ConstructionTrace = field(default_factory=ConstructionTrace)

    def to_dict(self) -> dict:
        return {
            "helpSets": {str(s): sorted(p) for s, p in sorted(self.help_sets.items())},
            "qSets": {str(s): sorted(q) for s, q in sorted(self.q_sets.items())},
            "trace": self.trace.to_dict(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def replace_help_sets(self, help_sets: dict[int, set[int] | frozenset[int]]) -> "PHM":
        return PHM({s: frozenset(p) for s, p in help_sets.items()}, self.q_sets, self.trace)


def _require_k1(scenario: Scenario) -> None:
    if scenario.k != 1:
        raise ValueError(f"PHM is defined for k=1 scenarios only, got k={scenario.k}")


def build_phm(scenario: Scenario) -> PHM:
    _require_k1(scenario)
    idle = scenario.idle_set
    subs = scenario.sub_conferences
    q_sets = {s: g.viewers & idle for s, g in subs.items()}

    help_sets: dict[int, set[int]] = {}
    exported = []
    for s, g in subs.items():
        q = q_sets[s]
        if len(q) == len(g.viewers):
            out = max(q)
            exported.append((s, out))
            help_sets[s] = set(q - {out})
        else:
            help_sets[s] = set(q)

    pool = sorted(u for _, u in exported)
    assignments = []
    pos = 0
    for s in sorted(subs):
        g, q = subs[s], q_sets[s]
        if len(q) == len(g.viewers):
            continue
        need = len(g.viewers) - 1 - len(q)
        for u in pool[pos:pos + need]:
            help_sets[s].add(u)
            assignments.append((u, s))
        pos += need
    # The counting identity guarantees the pool is consumed exactly.
    assert pos == len(pool), (pos, len(pool))

    trace = ConstructionTrace(tuple(exported), frozenset(pool), tuple(assignments))
    return PHM({s: frozenset(p) for s, p in help_sets.items()},
               {s: frozenset(q) for s, q in q_sets.items()}, trace)


@dataclass(frozen=True)
class ConditionResult:
    number: int
    description: str
    passed: bool
    witnesses: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PHMReport:
    conditions: tuple[ConditionResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[int]:
        return [c.number for c in self.conditions if not c.passed]

    def condition(self, number: int) -> ConditionResult:
        return self.conditions[number - 1]


def verify_phm(scenario: Scenario, phm: PHM) -> PHMReport:
    """Check the six partition conditions against the scenario.

    ``Q_i`` is recomputed from the scenario; the ``q_sets`` carried by the PHM
    are not trusted.  Each failing condition carries the offending elements.
    """
    _require_k1(scenario)
    subs = scenario.sub_conferences
    idle = scenario.idle_set
    P = {s: frozenset(phm.help_sets.get(s, ())) for s in subs}
    stray = sorted(set(phm.help_sets) - set(subs))
    Q = {s: g.viewers & idle for s, g in subs.items()}
    full = [s for s in subs if len(Q[s]) == len(subs[s].viewers)]
    deficient = [s for s in subs if len(Q[s]) < len(subs[s].viewers)]

    bad_sizes = {s: (len(P[s]), len(g.viewers) - 1)
                 for s, g in subs.items() if len(P[s]) != len(g.viewers) - 1}
    c1 = ConditionResult(1, "|P_i| = |G_i| - 1", not bad_sizes, {"sizes": bad_sizes})

    union = frozenset().union(*P.values()) if P else frozenset()
    stray_members = frozenset().union(*(phm.help_sets[s] for s in stray)) if stray else frozenset()
    union |= stray_members
    missing, extra = idle - union, union - idle
    c2 = ConditionResult(2, "union of P_i equals the idle set", not missing and not extra,
                         {"missing": sorted(missing), "extra": sorted(extra),
                          "unknownSources": stray})

    owners: dict[int, list[int]] = {}
    for s, p in list(P.items()) + [(s, frozenset(phm.help_sets[s])) for s in stray]:
        for u in p:
            owners.setdefault(u, []).append(s)
    shared = {u: sorted(ss) for u, ss in owners.items() if len(ss) > 1}
    c3 = ConditionResult(3, "help sets pairwise disjoint", not shared, {"shared": shared})

    not_local = {s: sorted(Q[s] - P[s]) for s in deficient if not Q[s] <= P[s]}
    c4 = ConditionResult(4, "Q_i subset of P_i when |Q_i| < |G_i|", not not_local,
                         {"unassigned": not_local})

    not_proper = [s for s in full if not P[s] < Q[s]]
    c5 = ConditionResult(5, "P_i proper subset of Q_i when |Q_i| = |G_i|", not not_proper,
                         {"sources": not_proper})

    imported = frozenset().union(*(P[s] - Q[s] for s in deficient)) if deficient else frozenset()
    exported = frozenset().union(*(Q[s] - P[s] for s in full)) if full else frozenset()
    c6 = ConditionResult(6, "imported helpers equal exported idle viewers",
                         imported == exported,
                         {"importedOnly": sorted(imported - exported),
                          "exportedOnly": sorted(exported - imported)})
    return PHMReport((c1, c2, c3, c4, c5, c6))
