"""Conference scenarios: users, watch relations, sub-conferences and idle users.

A scenario of a C(N, k) conference is the snapshot of who watches whom.  Every
user watches exactly ``k`` videos produced by other users; the viewers of
video ``i`` form the sub-conference ``G_i``.  Users nobody watches are idle.

All bandwidth quantities are :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class ScenarioError(ValueError):
    """Invalid scenario input.  ``user_id`` names the offending user, if any."""

    def __init__(self, message: str, user_id: int | None = None):
        self.user_id = user_id
        if user_id is not None:
            message = f"user {user_id}: {message}"
        super().__init__(message)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or an integer string into an exact Fraction.

    Decimal notation (``"0.5"``, ``"1e3"``) is refused so that nothing inexact
    ever enters a computation.  Python ints are accepted as-is.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num, den = m.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def format_decimal(x: Fraction) -> str:
    """Six significant digits, for human-facing output only."""
    return f"{float(x):.6g}"


@dataclass(frozen=True)
class UserProfile:
    id: int
    watches: frozenset[int]
    upload: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "watches", frozenset(self.watches))
        object.__setattr__(self, "upload", Fraction(self.upload))


@dataclass(frozen=True)
class SubConference:
    source: int
    viewers: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.viewers)


@dataclass(frozen=True)
class IdentityReport:
    idle_count: int
    rhs: Fraction
    holds: bool


@dataclass(frozen=True)
class Scenario:
    """Validated, immutable scenario.  Build with :meth:`build` or :func:`parse_scenario`."""

    k: int
    users: tuple[UserProfile, ...]
    sub_conferences: Mapping[int, SubConference] = field(init=False, compare=False, repr=False)
    idle_set: frozenset[int] = field(init=False, compare=False, repr=False)
    busy_count: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        users = tuple(sorted(self.users, key=lambda u: u.id))
        object.__setattr__(self, "users", users)
        _validate(self.k, users)
        watchers: dict[int, set[int]] = {}
        for u in users:
            for t in u.watches:
                watchers.setdefault(t, set()).add(u.id)
        subs = {
            src: SubConference(src, frozenset(vs)) for src, vs in sorted(watchers.items())
        }
        object.__setattr__(self, "sub_conferences", subs)
        object.__setattr__(self, "idle_set", frozenset(u.id for u in users if u.id not in subs))
        object.__setattr__(self, "busy_count", len(subs))

    @classmethod
    def build(cls, k: int, watches: Mapping[int, Iterable[int]],
              uploads: Mapping[int, Fraction] | None = None) -> "Scenario":
        """Convenience constructor: ``watches`` maps user id to watched ids."""
        uploads = uploads or {}
        users = [UserProfile(uid, frozenset(ts), Fraction(uploads.get(uid, 1)))
                 for uid, ts in watches.items()]
        return cls(k, tuple(users))

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def ids(self) -> list[int]:
        return [u.id for u in self.users]

    def user(self, uid: int) -> UserProfile:
        for u in self.users:
            if u.id == uid:
                return u
        raise KeyError(uid)

    def uploads(self) -> dict[int, Fraction]:
        return {u.id: u.upload for u in self.users}

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "users": [
                {"id": u.id, "watches": sorted(u.watches), "upload": format_rational(u.upload)}
                for u in self.users
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _validate(k: int, users: tuple[UserProfile, ...]) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ScenarioError(f"k must be a positive integer, got {k!r}")
    if not users:
        raise ScenarioError("a scenario needs at least one user")
    seen: set[int] = set()
    for u in users:
        if not isinstance(u.id, int) or isinstance(u.id, bool) or u.id < 1:
            raise ScenarioError(f"user id must be a positive integer, got {u.id!r}")
        if u.id in seen:
            raise ScenarioError("duplicate id", u.id)
        seen.add(u.id)
    for u in users:
        if u.id in u.watches:
            raise ScenarioError("self-watch", u.id)
        unknown = sorted(t for t in u.watches if t not in seen)
        if unknown:
            raise ScenarioError(f"unknown watch target(s) {unknown}", u.id)
        if len(u.watches) != k:
            raise ScenarioError(f"watches {len(u.watches)} videos, expected k={k}", u.id)
        if u.upload <= 0:
            raise ScenarioError(f"upload must be positive, got {u.upload}", u.id)


_TOP_FIELDS = {"k", "users"}
_USER_FIELDS = {"id", "watches", "upload"}


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    extra = set(data) - _TOP_FIELDS
    if extra:
        raise ScenarioError(f"unknown field(s) {sorted(extra)}")
    missing = _TOP_FIELDS - set(data)
    if missing:
        raise ScenarioError(f"missing field(s) {sorted(missing)}")
    if not isinstance(data["users"], list):
        raise ScenarioError("'users' must be a list")
    users = []
    for idx, entry in enumerate(data["users"]):
        if not isinstance(entry, dict):
            raise ScenarioError(f"users[{idx}] must be an object")
        uid = entry.get("id")
        extra = set(entry) - _USER_FIELDS
        if extra:
            raise ScenarioError(f"unknown field(s) {sorted(extra)}", uid)
        if "id" not in entry or "watches" not in entry:
            raise ScenarioError(f"users[{idx}] needs 'id' and 'watches'", uid)
        watches = entry["watches"]
        if not isinstance(watches, list) or not all(
                isinstance(t, int) and not isinstance(t, bool) for t in watches):
            raise ScenarioError("'watches' must be a list of integer ids", uid)
        if len(set(watches)) != len(watches):
            raise ScenarioError("'watches' lists a target twice", uid)
        try:
            upload = parse_rational(entry.get("upload", "1"))
        except ValueError as exc:
            raise ScenarioError(f"bad upload: {exc}", uid) from None
        users.append(UserProfile(uid, frozenset(watches), upload))
    return Scenario(data["k"], tuple(users))


def parse_scenario(text: str) -> Scenario:
    """Parse and validate the JSON scenario format."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data)


def sub_conferences(scenario: Scenario) -> list[SubConference]:
    return list(scenario.sub_conferences.values())


def idle_set(scenario: Scenario) -> frozenset[int]:
    return scenario.idle_set


def check_idle_identity(scenario: Scenario) -> IdentityReport:
    """Check ``|U_S| = N - |S| = sum_i (|G_i|/k - 1)`` exactly.

    The idle count is obtained by counting users with no watcher; the right
    hand side only from group sizes, so the two sides are computed apart.
    """
    watched = set().union(*(u.watches for u in scenario.users))
    idle = sum(1 for u in scenario.users if u.id not in watched)
    rhs = sum((Fraction(len(g.viewers), scenario.k) - 1
               for g in scenario.sub_conferences.values()), Fraction(0))
    holds = idle == rhs == scenario.n - scenario.busy_count
    return IdentityReport(idle, rhs, holds)
