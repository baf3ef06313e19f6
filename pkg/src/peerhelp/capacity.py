"""Planning every video at one global rate ``c`` with busy viewers helping.

A busy user spends ``c`` of its unit uplink on its own video and offers the
spare ``1 - c`` as a relay to the other viewers of the video it watches.  A
group of ``n`` viewers with ``q`` in-group helpers then sustains the rate

    1 - 1/n + 1/(2n - 1 - q)

which is smallest, 5/6, for ``n = 2, q = 0``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .model import Scenario, format_rational
from .phm import PHM
from .rateplan import (Contributor, Role, SubPlan, achievable_rate_formula,
                       plan_subconference)

DEFAULT_TARGET = Fraction(5, 6)
CHAINED_REFERENCE = Fraction(1, 2)


def _check_shape(n: int, q: int) -> None:
    if n < 1 or not 0 <= q <= n - 1:
        raise ValueError(f"need n >= 1 and 0 <= q <= n-1, got n={n}, q={q}")


@dataclass(frozen=True)
class FixedPointResult:
    n: int
    q: int
    rate: Fraction


def deliverable_rate(w, n: int, q: int) -> Fraction:
    """Rate a unit-upload group can receive when the source spends ``w``.

    ``q`` in-group idle helpers, ``n - 1 - q`` outside helpers, and the
    ``n - q`` busy viewers each relaying their spare ``1 - w``.
    """
    w = Fraction(w)
    _check_shape(n, q)
    return (w + (1 - w) * (n - q) + (n - 1)) / n - Fraction(n - 1 - q, n * n)


def fixed_point_rate(n: int, q: int) -> FixedPointResult:
    _check_shape(n, q)
    return FixedPointResult(n, q, 1 - Fraction(1, n) + Fraction(1, 2 * n - 1 - q))


def _require_unit_uploads(scenario: Scenario) -> None:
    odd = [u.id for u in scenario.users if u.upload != 1]
    if odd:
        raise ValueError(f"capacity mode needs unit uploads; users {odd} differ")


def plan_capacity(scenario: Scenario, phm: PHM, c=DEFAULT_TARGET) -> dict[int, SubPlan]:
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError(f"target rate must lie in (0, 1], got {c}")
    if scenario.k != 1:
        raise ValueError("capacity planning is defined for k=1 scenarios only")
    _require_unit_uploads(scenario)
    idle = scenario.idle_set
    plans = {}
    for s, g in scenario.sub_conferences.items():
        n = g.size
        helpers = phm.help_sets.get(s, frozenset())
        contributors = []
        for j in sorted(helpers | (g.viewers - idle if n > 1 else frozenset())):
            if j in helpers:
                role = Role.IN_HELPER if j in g.viewers else Role.OUT_HELPER
                contributors.append(Contributor.for_group(j, role, 1, n))
            else:
                contributors.append(Contributor.for_group(j, Role.BUSY_VIEWER, 1 - c, n))
        plans[s] = plan_subconference(c, n, contributors, source=s)
    return plans


@dataclass(frozen=True)
class BoundsRow:
    n: int
    q: int
    corollary_rate: Fraction
    fixed_point_rate: Fraction


@dataclass(frozen=True)
class BoundsTable:
    rows: tuple[BoundsRow, ...]
    corollary_min: Fraction
    corollary_argmin: tuple[tuple[int, int], ...]
    fixed_point_min: Fraction
    fixed_point_argmin: tuple[tuple[int, int], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "q", "corollary_rate", "fixed_point_rate"])
        for r in self.rows:
            w.writerow([r.n, r.q, format_rational(r.corollary_rate),
                        format_rational(r.fixed_point_rate)])
        return buf.getvalue()


def capacity_lower_bound_sweep(n_max: int) -> BoundsTable:
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    rows = tuple(
        BoundsRow(n, q, achievable_rate_formula(n, q), fixed_point_rate(n, q).rate)
        for n in range(1, n_max + 1) for q in range(n)
    )
    cmin = min(r.corollary_rate for r in rows)
    fmin = min(r.fixed_point_rate for r in rows)
    return BoundsTable(
        rows,
        cmin, tuple((r.n, r.q) for r in rows if r.corollary_rate == cmin),
        fmin, tuple((r.n, r.q) for r in rows if r.fixed_point_rate == fmin),
    )
