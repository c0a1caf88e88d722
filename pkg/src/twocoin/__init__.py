"""Exact simulator for discrete-time quantum walks driven by two coins.

Perfect state transfer and teleportation schedules on the line, cycles,
complete graphs with loops and circulant regular graphs, plus a dense
oracle that certifies them.
"""
from .errors import *  # noqa: F401,F403
from .hilbert import (
    GraphSpec,
    Outcome,
    WalkState,
    distance,
    fidelity_up_to_phase,
    inner_product,
    make_state,
    product_state,
    project_subsystem,
    random_vector,
)
from .operators import CoinOp, ShiftOp, StepSpec, apply_coin, apply_step, apply_steps, commutator_check, step
from .oracle import CertificationRecord, certify_schedule, dense_evolve, solve_recovery
from .teleport import (
    MeasurementBranch,
    TeleportPlan,
    plan_teleport_complete,
    plan_teleport_cycle,
    plan_teleport_line,
    plan_teleport_regular,
    run_teleport,
    sample_branch,
    teleport_complete,
    teleport_cycle,
    teleport_line,
    teleport_regular,
    totient_set,
)
from .transfer import (
    TransferPlan,
    TransferReport,
    periodicity_check,
    plan_complete,
    plan_cycle,
    plan_line,
    plan_regular,
    plan_revival,
    regular_feasible_set,
    route_from,
    run_transfer,
)

__version__ = "0.1.0"
