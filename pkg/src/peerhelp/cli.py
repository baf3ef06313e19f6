"""Command-line front end.

Exit codes: 0 success, 1 violations or mismatches found, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .capacity import CHAINED_REFERENCE, DEFAULT_TARGET, capacity_lower_bound_sweep
from .churn import ChurnConfig, plan_step, records_to_csv, records_to_jsonl, run_simulation
from .model import ScenarioError, format_decimal, format_rational, parse_rational, parse_scenario
from .oracle import OracleConfig, compare_with_planner, exhaustive_unit_configs, random_config
from .rateplan import corollary_lower_bound, dump_plans, load_plans, verify_plan

COROLLARY_BOUND = Fraction(3, 4)


class InputError(Exception):
    pass


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


def write_atomic(path: str | os.PathLike, text: str) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return str(path)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_scenario(path: str):
    try:
        return parse_scenario(_read(path))
    except ScenarioError as exc:
        raise InputError(f"{path}: {exc}") from None


def _rat(x: Fraction) -> str:
    return f"{format_rational(x)} ({format_decimal(x)})"


def _print_reference_lines(out) -> None:
    print(f"bound corollary {_rat(COROLLARY_BOUND)}", file=out)
    print(f"bound capacity {_rat(DEFAULT_TARGET)}", file=out)
    print(f"reference chained {_rat(CHAINED_REFERENCE)}", file=out)


def _print_violations(report, out) -> None:
    print(f"violations {len(report.violations)}", file=out)
    for v in report.violations:
        print(f"violation {v.kind.value} witness={','.join(map(str, v.witness))} "
              f"amount={format_rational(v.amount)}", file=out)


def cmd_plan(scenario_path: str, mode: str, target: Fraction | None, out_path: str | None,
             out=sys.stdout) -> CommandOutcome:
    scenario = _load_scenario(scenario_path)
    if scenario.k != 1:
        raise InputError(f"{scenario_path}: planning needs k=1, got k={scenario.k}")
    c = DEFAULT_TARGET if target is None else target
    try:
        state = plan_step(scenario, mode, c)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    artifacts = []
    if out_path:
        artifacts.append(write_atomic(out_path, dump_plans(state.plans, mode)))
    print(f"mode {mode}", file=out)
    if mode == "capacity":
        print(f"target {_rat(c)}", file=out)
    sub = scenario.sub_conferences
    for s, p in sorted(state.plans.items()):
        line = f"subconference {s} n={sub[s].size} rate={format_rational(p.achieved_rate)}"
        if mode == "theorem3" and all(u.upload == 1 for u in scenario.users):
            line += f" corollary_floor={format_rational(corollary_lower_bound(sub[s].size))}"
        print(line, file=out)
    print(f"min_rate {_rat(state.record.min_rate)}", file=out)
    _print_reference_lines(out)
    shortfalls = []
    if mode == "capacity":
        shortfalls = [s for s, p in sorted(state.plans.items()) if p.achieved_rate < c]
        print(f"shortfalls {len(shortfalls)}", file=out)
        for s in shortfalls:
            print(f"shortfall {s} rate={format_rational(state.plans[s].achieved_rate)} "
                  f"target={format_rational(c)}", file=out)
    _print_violations(state.report, out)
    bad = bool(state.report.violations or shortfalls)
    return CommandOutcome(1 if bad else 0, artifacts)


def cmd_verify(scenario_path: str, plan_path: str, out=sys.stdout) -> CommandOutcome:
    scenario = _load_scenario(scenario_path)
    try:
        mode, plans = load_plans(_read(plan_path), scenario)
        report = verify_plan(scenario, plans)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{plan_path}: {exc}") from None
    print(f"mode {mode}", file=out)
    print(f"min_rate {_rat(min(p.achieved_rate for p in plans.values()))}", file=out)
    _print_reference_lines(out)
    _print_violations(report, out)
    return CommandOutcome(1 if report.violations else 0)


def cmd_bounds(n_max: int, out_path: str | None, out=sys.stdout) -> CommandOutcome:
    try:
        table = capacity_lower_bound_sweep(n_max)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    artifacts = [write_atomic(out_path, table.to_csv())] if out_path else []
    print(f"rows {len(table.rows)}", file=out)
    print(f"min corollary_rate {_rat(table.corollary_min)} at "
          + " ".join(f"({n},{q})" for n, q in table.corollary_argmin), file=out)
    print(f"min fixed_point_rate {_rat(table.fixed_point_min)} at "
          + " ".join(f"({n},{q})" for n, q in table.fixed_point_argmin), file=out)
    _print_reference_lines(out)
    ok = table.corollary_min == COROLLARY_BOUND and table.fixed_point_min == DEFAULT_TARGET
    print(f"bounds_reproduced {'yes' if ok else 'no'}", file=out)
    return CommandOutcome(0 if ok else 1, artifacts)


def cmd_oracle(config_path: str | None, exhaustive: int | None, random_count: int,
               seed: int, out_path: str | None, out=sys.stdout) -> CommandOutcome:
    if config_path:
        try:
            configs = [OracleConfig.loads(_read(config_path))]
        except (ValueError, TypeError) as exc:
            raise InputError(f"{config_path}: {exc}") from None
    else:
        configs = exhaustive_unit_configs(exhaustive or 5)
        rng = random.Random(seed)
        configs += [random_config(rng) for _ in range(random_count)]
    results = [compare_with_planner(c) for c in configs]
    mismatches = [r for r in results if not r.equal]
    artifacts = []
    if out_path:
        payload = [{"config": r.config.to_dict(), "oracle": format_rational(r.oracle_rate),
                    "planner": format_rational(r.planner_rate), "equal": r.equal} for r in results]
        artifacts.append(write_atomic(out_path, json.dumps(payload, indent=2) + "\n"))
    if len(results) == 1:
        r = results[0]
        print(f"oracle_rate {_rat(r.oracle_rate)}", file=out)
        print(f"planner_rate {_rat(r.planner_rate)}", file=out)
    print(f"configs {len(results)}", file=out)
    print(f"mismatches {len(mismatches)}", file=out)
    for r in mismatches:
        print(f"mismatch {json.dumps(r.config.to_dict())} oracle={format_rational(r.oracle_rate)} "
              f"planner={format_rational(r.planner_rate)}", file=out)
    return CommandOutcome(1 if mismatches else 0, artifacts)


def cmd_simulate(config: ChurnConfig, out_path: str | None, fmt: str = "json",
                 out=sys.stdout) -> CommandOutcome:
    records = list(run_simulation(config))
    text = records_to_jsonl(records) if fmt == "json" else records_to_csv(records)
    artifacts = [write_atomic(out_path, text)] if out_path else []
    infeasible = [r.step for r in records if not r.feasible]
    run_min = min(r.min_rate for r in records)
    print(f"mode {config.mode}", file=out)
    print(f"steps {len(records)}", file=out)
    print(f"min_rate {_rat(run_min)}", file=out)
    _print_reference_lines(out)
    print(f"infeasible_steps {len(infeasible)}", file=out)
    shortfall = []
    if config.mode == "capacity":
        shortfall = [r.step for r in records if r.min_rate < config.capacity_target]
        print(f"shortfall_steps {len(shortfall)}", file=out)
    return CommandOutcome(1 if infeasible or shortfall else 0, artifacts)


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peerhelp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="build PHM and substream plans for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=["theorem3", "capacity"], default="theorem3")
    p.add_argument("--target", type=_rational_arg, default=None,
                   help="global rate for capacity mode, p/q (default 5/6)")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check a plan file against a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--plan", required=True)

    p = sub.add_parser("bounds", help="sweep group shapes and report rate minima")
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="compare the planner with the depth-2 optimum")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--config")
    g.add_argument("--exhaustive", type=int, metavar="N_MAX")
    p.add_argument("--random", type=int, default=200, dest="random_count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="run a watch-switch churn simulation")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--switches-per-step", type=int, default=1)
    p.add_argument("--mode", choices=["theorem3", "capacity"], default="theorem3")
    p.add_argument("--target", type=_rational_arg, default=DEFAULT_TARGET)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    return parser


def run(argv=None, out=sys.stdout) -> CommandOutcome:
    args = build_parser().parse_args(argv)
    if args.command == "plan":
        return cmd_plan(args.scenario, args.mode, args.target, args.out, out)
    if args.command == "verify":
        return cmd_verify(args.scenario, args.plan, out)
    if args.command == "bounds":
        return cmd_bounds(args.n_max, args.out, out)
    if args.command == "oracle":
        return cmd_oracle(args.config, args.exhaustive, args.random_count, args.seed, args.out, out)
    try:
        config = ChurnConfig(args.users, args.steps, args.seed, args.switches_per_step,
                             args.mode, args.target)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return cmd_simulate(config, args.out, args.format, out)


def main(argv=None) -> int:
    try:
        outcome = run(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
