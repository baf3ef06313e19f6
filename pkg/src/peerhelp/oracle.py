"""Exact optimum of the depth-2 distribution class, computed two independent ways.

Variables: ``x_j`` (rate of the substream relayed by helper ``j``) and ``x_0``
(direct substream).  Maximize ``sum(x_j) + x_0`` subject to

    sum(x_j) + n * x_0 <= budget
    fanout_j * x_j     <= cap_j        (fanout n-1 in-group, n outside)
    x >= 0

:func:`optimal_depth2_rate` solves it greedily, :func:`vertex_enumeration_rate`
by visiting every vertex of the polytope.  Neither touches the planner.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .model import format_rational, parse_rational
from .rateplan import Contributor, Role, plan_subconference


@dataclass(frozen=True)
class OracleConfig:
    budget: Fraction
    n: int
    in_caps: tuple[Fraction, ...] = ()
    out_caps: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "budget", Fraction(self.budget))
        object.__setattr__(self, "in_caps", tuple(Fraction(c) for c in self.in_caps))
        object.__setattr__(self, "out_caps", tuple(Fraction(c) for c in self.out_caps))
        if self.budget <= 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if self.n < 1:
            raise ValueError(f"group size must be >= 1, got {self.n}")
        if self.n == 1 and self.in_caps:
            raise ValueError("a single-viewer group has no in-group relays")
        if any(c < 0 for c in self.in_caps + self.out_caps):
            raise ValueError("helper capacities must be non-negative")

    def fanouts(self) -> list[int]:
        return [self.n - 1] * len(self.in_caps) + [self.n] * len(self.out_caps)

    def caps(self) -> list[Fraction]:
        return list(self.in_caps) + list(self.out_caps)

    def to_dict(self) -> dict:
        return {"budget": format_rational(self.budget), "n": self.n,
                "inCaps": [format_rational(c) for c in self.in_caps],
                "outCaps": [format_rational(c) for c in self.out_caps]}

    @classmethod
    def from_dict(cls, data) -> "OracleConfig":
        fields = {"budget", "n", "inCaps", "outCaps"}
        if not isinstance(data, dict) or not set(data) <= fields or not {"budget", "n"} <= set(data):
            raise ValueError(f"oracle config must be an object with fields {sorted(fields)}")
        return cls(parse_rational(data["budget"]), data["n"],
                   tuple(parse_rational(c) for c in data.get("inCaps", [])),
                   tuple(parse_rational(c) for c in data.get("outCaps", [])))

    @classmethod
    def loads(cls, text: str) -> "OracleConfig":
        return cls.from_dict(json.loads(text))


def optimal_depth2_rate(config: OracleConfig) -> Fraction:
    """Greedy saturation.

    A unit of rate costs one unit of source bandwidth through any helper and
    ``n`` units on the direct substream, so helpers are filled first (in any
    order, they all cost the same) and the remainder goes direct.
    """
    remaining = config.budget
    rate = Fraction(0)
    for cap, fanout in zip(config.caps(), config.fanouts()):
        x = min(cap / fanout, remaining)
        rate += x
        remaining -= x
        if remaining == 0:
            return rate
    return rate + remaining / config.n


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan on a square system; ``None`` if singular."""
    m = len(rows)
    a = [row[:] + [b] for row, b in zip(rows, rhs)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def vertex_enumeration_rate(config: OracleConfig) -> Fraction:
    caps, fanouts = config.caps(), config.fanouts()
    h = len(caps)
    dim = h + 1  # x_1..x_h, x_0
    A: list[list[Fraction]] = [[Fraction(1)] * h + [Fraction(config.n)]]
    b: list[Fraction] = [config.budget]
    for j in range(h):
        row = [Fraction(0)] * dim
        row[j] = Fraction(fanouts[j])
        A.append(row)
        b.append(caps[j])
    for j in range(dim):
        row = [Fraction(0)] * dim
        row[j] = Fraction(-1)
        A.append(row)
        b.append(Fraction(0))

    best = None
    for subset in itertools.combinations(range(len(A)), dim):
        x = _solve([A[i] for i in subset], [b[i] for i in subset])
        if x is None:
            continue
        if all(sum(a * v for a, v in zip(row, x)) <= bi for row, bi in zip(A, b)):
            val = sum(x)
            if best is None or val > best:
                best = val
    assert best is not None  # the origin is always a vertex
    return best


def planner_rate(config: OracleConfig) -> Fraction:
    contributors = ([Contributor(i, Role.IN_HELPER, c, config.n - 1)
                     for i, c in enumerate(config.in_caps, start=1)]
                    + [Contributor(len(config.in_caps) + i, Role.OUT_HELPER, c, config.n)
                       for i, c in enumerate(config.out_caps, start=1)])
    return plan_subconference(config.budget, config.n, contributors).achieved_rate


@dataclass(frozen=True)
class Comparison:
    config: OracleConfig
    oracle_rate: Fraction
    planner_rate: Fraction

    @property
    def equal(self) -> bool:
        return self.oracle_rate == self.planner_rate


def compare_with_planner(config: OracleConfig) -> Comparison:
    return Comparison(config, optimal_depth2_rate(config), planner_rate(config))


def exhaustive_unit_configs(n_max: int = 5, max_helpers: int = 4) -> list[OracleConfig]:
    """Budget 1, unit caps, every in/out split of up to ``max_helpers`` helpers."""
    out = []
    for n in range(1, n_max + 1):
        for total in range(max_helpers + 1):
            for n_in in range(total + 1):
                if n == 1 and n_in:
                    continue
                out.append(OracleConfig(Fraction(1), n, (Fraction(1),) * n_in,
                                        (Fraction(1),) * (total - n_in)))
    return out


def random_config(rng: random.Random, n_max: int = 6, max_helpers: int = 4,
                  max_den: int = 12) -> OracleConfig:
    def frac(lo: int = 0) -> Fraction:
        den = rng.randint(1, max_den)
        return Fraction(rng.randint(lo, 2 * den), den)

    n = rng.randint(1, n_max)
    total = rng.randint(0, max_helpers)
    n_in = 0 if n == 1 else rng.randint(0, total)
    return OracleConfig(frac(lo=1), n, tuple(frac() for _ in range(n_in)),
                        tuple(frac() for _ in range(total - n_in)))
