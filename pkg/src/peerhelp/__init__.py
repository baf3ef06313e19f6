"""Peer-help planning for uplink-constrained p2p multipoint video conferences."""
from .capacity import (BoundsTable, FixedPointResult, capacity_lower_bound_sweep,
                       deliverable_rate, fixed_point_rate, plan_capacity)
from .churn import (ChurnConfig, MetricsRecord, apply_switch, generate_scenario,
                    run_simulation)
from .model import (IdentityReport, Scenario, ScenarioError, SubConference, UserProfile,
                    check_idle_identity, idle_set, parse_rational, parse_scenario,
                    sub_conferences)
from .oracle import OracleConfig, compare_with_planner, optimal_depth2_rate
from .phm import PHM, ConstructionTrace, build_phm, verify_phm
from .rateplan import (Contributor, FeasibilityReport, Role, SubPlan,
                       achievable_rate_formula, lemma_identity_check, plan_subconference,
                       plan_theorem3, threshold_delta, verify_plan)

__all__ = [
    "BoundsTable", "ChurnConfig", "ConstructionTrace", "Contributor", "FeasibilityReport",
    "FixedPointResult", "IdentityReport", "MetricsRecord", "OracleConfig", "PHM", "Role",
    "Scenario", "ScenarioError", "SubConference", "SubPlan", "UserProfile",
    "achievable_rate_formula", "apply_switch", "build_phm", "capacity_lower_bound_sweep",
    "check_idle_identity", "compare_with_planner", "deliverable_rate", "fixed_point_rate",
    "generate_scenario", "idle_set", "lemma_identity_check", "optimal_depth2_rate",
    "parse_rational", "parse_scenario", "plan_capacity", "plan_subconference",
    "plan_theorem3", "run_simulation", "sub_conferences", "threshold_delta", "verify_phm",
    "verify_plan",
]
