"""Perfect state transfer schedules on the line, cycles, complete and circulant graphs.

A schedule alternates coins: odd steps flip coin 1, even steps flip coin 2.
Every coin operator is the identity except at one or two tabulated steps.
Step indices are 1-based throughout so schedules read the same as the
coin-placement tables.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import oracle
from .errors import ArenaError, InfeasibleError, MethodError, TargetError
from .hilbert import (
    LINE,
    RESULT_TOL,
    GraphSpec,
    WalkState,
    fidelity_up_to_phase,
    product_state,
    random_vector,
)
from .operators import CoinOp, StepSpec, apply_coin, apply_steps, step

CASE_TAGS = (
    "L1_1",
    "L1_2",
    "L1_3",
    "L1_4",
    "C_M1",
    "C_M2_even",
    "C_M2_odd",
    "C_M3_even",
    "C_M3_odd",
    "C_M4",
    "KD_complete",
    "KD_regular",
    "revival",
)

# fixed payload used when a recovery has to be solved for rather than read off a table
_PROBE_SEED = 20170


@dataclass(frozen=True)
class TransferPlan:
    arena: GraphSpec
    target: int
    steps: tuple
    recovery: tuple
    case_tag: str
    start: int = 0
    certification: tuple = ()

    @property
    def coin_dims(self) -> tuple:
        d = self.arena.coin_dim
        return (d, d)

    @property
    def coin2_init(self) -> np.ndarray:
        e = np.zeros(self.arena.coin_dim, dtype=complex)
        e[0] = 1.0
        return e

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    def placements(self) -> list:
        """Non-identity coin operators as ``(step, coin, name)`` triples."""
        return [
            (i, st.coin, st.op.name)
            for i, st in enumerate(self.steps, start=1)
            if not st.op.is_identity
        ]


@dataclass(frozen=True, eq=False)
class TransferReport:
    plan: TransferPlan
    trace: list
    final: WalkState
    corrected: WalkState
    target_state: WalkState
    fidelity: float

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1 - RESULT_TOL


def build_schedule(arena: GraphSpec, n_steps: int, flips: dict) -> tuple:
    """Alternating-coin schedule with ``flips[i]`` applied at 1-based step ``i``.

    Entries beyond ``n_steps`` are ignored.
    """
    dim = arena.coin_dim
    out = []
    for i in range(1, n_steps + 1):
        coin = 1 if i % 2 else 2
        out.append(step(arena, coin, flips.get(i, CoinOp.identity(dim))))
    return tuple(out)


def _line_case(x: int):
    """(steps, flips, recovery, tag) for the line tables, flips keyed by step."""
    X = CoinOp.x()
    ax = abs(x)
    if x > 0 and x % 2 == 0:
        return 2 * ax, {ax + 1: X}, (X, CoinOp.identity(2)), "L1_1"
    if x > 0:
        return 2 * ax + 1, {ax + 2: X}, (X, CoinOp.identity(2)), "L1_2"
    if ax % 2 == 0:
        return 2 * ax, {2: X, ax + 1: X}, (X, X), "L1_3"
    return 2 * ax + 1, {2: X, ax + 2: X}, (X, X), "L1_4"


def plan_line(x: int) -> TransferPlan:
    """Move the coin-1 qubit from position 0 to ``x`` on the infinite line."""
    if x == 0:
        raise TargetError("transfer to the starting position is undefined; target must be nonzero")
    arena = GraphSpec.line()
    n, flips, rec, tag = _line_case(int(x))
    return TransferPlan(arena, int(x), build_schedule(arena, n, flips), rec, tag)


def _solved_plan(arena, x, n_steps, flips, tag, note) -> tuple:
    """Attach an oracle-solved recovery to a schedule and certify it.

    Returns ``(plan or None, record)``.
    """
    draft = TransferPlan(
        arena, x, build_schedule(arena, n_steps, flips),
        (CoinOp.identity(2), CoinOp.identity(2)), tag,
    )
    payload = random_vector(2, np.random.default_rng(_PROBE_SEED))
    system = oracle.build_system(draft)
    final = system.state(oracle.dense_evolve(draft, payload, system=system))
    try:
        pos, _, _ = oracle.split_product(final)
        if pos != x:
            raise InfeasibleError(f"walker ends at {pos}, not {x}")
        rec = oracle.solve_recovery(final, payload, draft.coin2_init)
    except InfeasibleError as exc:
        record = oracle.CertificationRecord(tag, False, 0.0, 1, [complex(z) for z in payload],
                                            f"{note}: {exc}")
        return None, record
    plan = replace(draft, recovery=rec)
    return plan, oracle.certify_schedule(plan, note=note)


def _method3_odd(arena: GraphSpec, d: int, x: int, extra: dict, tag: str) -> TransferPlan:
    # the tabulated placement (X on coin 2 at step x+1) tried at the tabulated
    # length d+1 first, then at length d-1
    records = []
    for n_steps in (d + 1, d - 1):
        flips = {x + 1: CoinOp.x(), **extra}
        note = f"X on coin 2 at step {x + 1}, {n_steps} steps"
        plan, rec = _solved_plan(arena, x, n_steps, flips, tag, note)
        records.append(rec)
        if plan is not None and rec.passed:
            return replace(plan, certification=tuple(records))
    raise InfeasibleError(f"no certified schedule for d={d}, x={x}: {[r.note for r in records]}")


def plan_cycle(d: int, x: int, method: int = 1) -> TransferPlan:
    """Transfer from vertex 0 to ``x`` on the ``d``-cycle using one of four routing methods.

    1. both amplitudes travel clockwise (line tables for ``x``),
    2. both travel anticlockwise (line tables for ``-(d - x)``),
    3. ``a`` clockwise and ``b`` anticlockwise (even ``d`` only),
    4. the mirror of method 3 (even ``d`` only).

    Methods 3 with odd ``x`` and 4 carry recoveries solved and certified by
    the dense oracle; their certification records are kept on the plan.
    """
    arena = GraphSpec.cycle(d)
    if not 0 < x <= d - 1:
        raise TargetError(f"target must be in 1..{d - 1}")
    if method not in (1, 2, 3, 4):
        raise MethodError("method must be 1, 2, 3 or 4")
    if method in (3, 4) and d % 2:
        raise MethodError("methods 3 and 4 need an even number of vertices")

    if method in (1, 2):
        n, flips, rec, _ = _line_case(x if method == 1 else -(d - x))
        if method == 1:
            tag = "C_M1"
        else:
            tag = "C_M2_even" if (d - x) % 2 == 0 else "C_M2_odd"
        return TransferPlan(arena, x, build_schedule(arena, n, flips), rec, tag)

    if method == 3:
        if x % 2 == 0:
            flips = {x + 2: CoinOp.x()}
            rec = (CoinOp.identity(2), CoinOp.x())
            return TransferPlan(arena, x, build_schedule(arena, d, flips), rec, "C_M3_even")
        return _method3_odd(arena, d, x, {}, "C_M3_odd")

    # method 4: flip coin 1 first so the two amplitudes swap travel directions
    extra = {1: CoinOp.x()}
    if x % 2 == 0:
        note = f"X on coin 1 at step 1 and on coin 2 at step {x + 2}, {d} steps"
        plan, rec = _solved_plan(arena, x, d, {x + 2: CoinOp.x(), **extra}, "C_M4", note)
        if plan is None or not rec.passed:
            raise InfeasibleError(f"method 4 schedule failed certification: {rec.note}")
        return replace(plan, certification=(rec,))
    return _method3_odd(arena, d, x, extra, "C_M4")


def _qudit_plan(arena: GraphSpec, size: int, x: int, tag: str) -> TransferPlan:
    if not 1 <= x <= size - 1:
        raise TargetError(f"target must be in 1..{size - 1}")
    dim = arena.coin_dim
    flips = {2 * size - 2 * x + 2: CoinOp.shift(dim)}
    rec = (CoinOp.identity(dim), CoinOp.shift_inv(dim))
    return TransferPlan(arena, x, build_schedule(arena, 2 * size, flips), rec, tag)


def plan_complete(d: int, x: int) -> TransferPlan:
    """Qudit transfer on the complete graph with loops: ``2d`` steps, one ``X_d`` on coin 2."""
    if d < 2:
        raise TargetError("need d >= 2")
    return _qudit_plan(GraphSpec.complete(d), d, x, "KD_complete")


def plan_regular(n: int, d: int, x: int) -> TransferPlan:
    """Qudit transfer on the circulant ``d``-regular graph with ``n`` vertices (``2n`` steps)."""
    if not n >= d >= 2:
        raise TargetError("need n >= d >= 2")
    return _qudit_plan(GraphSpec.circulant(n, d), n, x, "KD_regular")


def plan_revival(arena: GraphSpec, n_steps: int) -> TransferPlan:
    """All-identity schedule; the target is the starting vertex."""
    return TransferPlan(
        arena, 0, build_schedule(arena, n_steps, {}),
        (CoinOp.identity(arena.coin_dim), CoinOp.identity(arena.coin_dim)), "revival",
    )


def run_transfer(plan: TransferPlan, input_coin1) -> TransferReport:
    """Evolve ``|start> (x) input (x) |0>``, apply the recovery and score it."""
    payload = np.asarray(input_coin1, dtype=complex)
    init = product_state(plan.arena, plan.start, [payload, plan.coin2_init])
    final, trace = apply_steps(init, plan.steps, trace=True)
    u1, u2 = plan.recovery
    corrected = apply_coin(apply_coin(final, 1, u1), 2, u2)
    target = product_state(plan.arena, plan.target, [payload, plan.coin2_init])
    return TransferReport(plan, trace, final, corrected, target, fidelity_up_to_phase(corrected, target))


def periodicity_state(x: int, payload) -> tuple:
    """Run the even-positive line schedule then the even-negative one, no recoveries.

    Returns ``(initial_state, final_state)``.
    """
    if x <= 0 or x % 2:
        raise TargetError("periodicity is stated for positive even x")
    payload = np.asarray(payload, dtype=complex)
    init = product_state(GraphSpec.line(), 0, [payload, [1, 0]])
    mid = apply_steps(init, plan_line(x).steps)
    return init, apply_steps(mid, plan_line(-x).steps)


def periodicity_check(x: int, payload) -> float:
    """Fidelity between the initial state and the state after both schedules (``4x`` steps)."""
    init, final = periodicity_state(x, payload)
    return fidelity_up_to_phase(init, final)


def route_from(start: int, plan: TransferPlan, payload) -> TransferReport:
    """Run a line plan from position ``start``; the target shifts by the same amount."""
    if plan.arena.kind != LINE:
        raise ArenaError("routing from an arbitrary start is defined on the line")
    moved = replace(plan, start=plan.start + start, target=plan.target + start)
    return run_transfer(moved, payload)


def regular_feasible_set(n: int, d: int, trials: int = 8, seed: int = 0) -> dict:
    """Certify :func:`plan_regular` for every target ``x`` in ``1..n-1``."""
    return {
        x: oracle.certify_schedule(plan_regular(n, d, x), trials=trials, seed=seed)
        for x in range(1, n)
    }
