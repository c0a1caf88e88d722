"""Grid checks behind ``twocoin verify-all`` and the acceptance suite.

Every ``criterion_*`` function runs one exit criterion at its pinned
tolerance and returns a :class:`Criterion` with the measured numbers.
Random inputs come from fixed seeds, so repeated runs are identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .errors import CoprimalityError
from .hilbert import (
    ORACLE_TOL,
    RESULT_TOL,
    GraphSpec,
    distance,
    make_state,
    product_state,
    random_vector,
)
from .operators import CoinOp, apply_steps, commutator_check, step
from .teleport import (
    plan_teleport_complete,
    plan_teleport_cycle,
    plan_teleport_line,
    plan_teleport_regular,
    regular_support,
    run_teleport,
    totient_set,
)
from .transfer import (
    periodicity_check,
    plan_complete,
    plan_cycle,
    plan_line,
    plan_regular,
    plan_revival,
    regular_feasible_set,
    run_transfer,
)

LINE_TARGETS = [x for x in range(-8, 9) if x != 0]
PERIOD_TARGETS = (2, 4, 6)
CYCLE_SIZES = range(3, 11)
COMPLETE_SIZES = range(2, 9)
REGULAR_GRID = ((5, 3), (7, 3), (9, 3), (7, 4), (9, 4), (11, 5))
TELEPORT_LINE = (2, 4, 10)
TELEPORT_CYCLE = (4, 8, 12)
TELEPORT_COMPLETE = (2, 3, 5, 7)
TELEPORT_REGULAR = ((5, 3, 1), (9, 3, 2), (7, 3, 1), (11, 4, 3))
RANDOM_INPUTS = 20
COMMUTATOR_TRIALS = 100


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:>2}: {self.title}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed, "details": self.details}


def _ok(f: float) -> bool:
    return f >= 1 - RESULT_TOL


# -- itemized line states ------------------------------------------------


def _line_items(x: int, a: complex, b: complex) -> dict:
    """Intermediate states listed for the even line cases, keyed by step."""
    items: dict = {}
    if x > 0:
        items[1] = {(1, 0, 0): a, (-1, 1, 0): b}
        items[2] = {(2, 0, 0): a, (0, 1, 0): b}
        items[x - 1] = {(x - 1, 0, 0): a, (-1, 1, 0): b}
        items[x] = {(x, 0, 0): a, (0, 1, 0): b}
        items[x + 1] = {(x - 1, 1, 0): a, (1, 0, 0): b}
        items[x + 2] = {(x, 1, 0): a, (2, 0, 0): b}
        items[2 * x - 1] = {(x - 1, 1, 0): a, (x - 1, 0, 0): b}
        items[2 * x] = {(x, 1, 0): a, (x, 0, 0): b}
    else:
        m = -x
        items[1] = {(1, 0, 0): a, (-1, 1, 0): b}
        items[2] = {(0, 0, 1): a, (-2, 1, 1): b}
        if m - 1 >= 2:  # the listed form assumes coin 2 has already been flipped
            items[m - 1] = {(1, 0, 1): a, (1 - m, 1, 1): b}
        items[m] = {(0, 0, 1): a, (x, 1, 1): b}
        items[m + 1] = {(-1, 1, 1): a, (1 - m, 0, 1): b}
        items[m + 2] = {(-2, 1, 1): a, (x, 0, 1): b}
        items[2 * m - 1] = {(1 - m, 1, 1): a, (1 - m, 0, 1): b}
        items[2 * m] = {(x, 1, 1): a, (x, 0, 1): b}
    return items


def _merge(terms: dict) -> dict:
    out: dict = {}
    for k, v in terms.items():
        out[k] = out.get(k, 0) + v
    return out


def line_trace_gap(x: int, a: complex, b: complex) -> float:
    """Largest distance between the simulated trace and the listed states."""
    report = run_transfer(plan_line(x), [a, b])
    arena = GraphSpec.line()
    worst = 0.0
    for i, terms in _line_items(x, a, b).items():
        ref = make_state(arena, [2, 2], _merge(terms))
        worst = max(worst, distance(report.trace[i], ref))
    return worst


# -- criteria -----------------------------------------------------------------


def criterion_1_line(seed: int = 101) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for x in LINE_TARGETS:
        plan = plan_line(x)
        expected = 2 * abs(x) + (abs(x) % 2)
        fids = [run_transfer(plan, random_vector(2, rng)).fidelity for _ in range(RANDOM_INPUTS)]
        good = plan.n_steps == expected and all(_ok(f) for f in fids)
        ok &= good
        rows.append({"x": x, "case": plan.case_tag, "steps": plan.n_steps, "expected_steps": expected,
                     "min_fidelity": min(fids), "passed": good})
    gaps = {}
    for x in (2, 4, 6, 8, -2, -4, -6, -8):
        a, b = random_vector(2, rng)
        gaps[x] = line_trace_gap(x, a, b)
    ok &= all(g <= ORACLE_TOL for g in gaps.values())
    return Criterion(1, "line transfer, x in -8..8, step counts and listed traces", ok,
                     {"targets": rows, "trace_gap": {str(k): v for k, v in gaps.items()}})


def criterion_2_periodicity(seed: int = 102) -> Criterion:
    rng = np.random.default_rng(seed)
    rows = []
    for x in PERIOD_TARGETS:
        fids = [periodicity_check(x, random_vector(2, rng)) for _ in range(RANDOM_INPUTS)]
        rows.append({"x": x, "steps": 4 * x, "min_fidelity": min(fids)})
    ok = all(_ok(r["min_fidelity"]) for r in rows)
    return Criterion(2, "periodicity: even line case then its mirror returns the initial state", ok,
                     {"runs": rows})


def criterion_3_cycle(seed: int = 103, inputs: int = 5) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, certs, ok = [], [], True
    for d in CYCLE_SIZES:
        methods = (1, 2, 3, 4) if d % 2 == 0 else (1, 2)
        for method in methods:
            for x in range(1, d):
                plan = plan_cycle(d, x, method)
                fids = [run_transfer(plan, random_vector(2, rng)).fidelity for _ in range(inputs)]
                good = all(_ok(f) for f in fids)
                if method == 3 and x % 2 == 0:
                    good &= plan.n_steps == d
                if plan.certification:
                    good &= plan.certification[-1].passed
                    certs.append({"d": d, "x": x, "method": method,
                                  "records": [r.to_dict() for r in plan.certification]})
                ok &= good
                rows.append({"d": d, "x": x, "method": method, "case": plan.case_tag,
                             "steps": plan.n_steps, "min_fidelity": min(fids), "passed": good})
    return Criterion(3, "cycle transfer, methods 1-4", ok, {"runs": rows, "certifications": certs})


def criterion_4_complete(seed: int = 104) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for d in COMPLETE_SIZES:
        for x in range(1, d):
            plan = plan_complete(d, x)
            fids = [run_transfer(plan, random_vector(d, rng)).fidelity for _ in range(RANDOM_INPUTS)]
            good = plan.n_steps == 2 * d and all(_ok(f) for f in fids)
            ok &= good
            rows.append({"d": d, "x": x, "steps": plan.n_steps, "min_fidelity": min(fids), "passed": good})
        rev = plan_revival(GraphSpec.complete(d), 2 * d)
        fids = [run_transfer(rev, random_vector(d, rng)).fidelity for _ in range(RANDOM_INPUTS)]
        ok &= all(_ok(f) for f in fids)
        rows.append({"d": d, "x": 0, "revival": True, "steps": 2 * d, "min_fidelity": min(fids)})
    return Criterion(4, "complete-graph qudit transfer and revival", ok, {"runs": rows})


def criterion_5_regular(seed: int = 105) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for n, d in REGULAR_GRID:
        records = regular_feasible_set(n, d, seed=seed)
        feasible = [x for x, r in records.items() if r.passed]
        infeasible = [x for x, r in records.items() if not r.passed]
        fids = {x: run_transfer(plan_regular(n, d, x), random_vector(d, rng)).fidelity for x in feasible}
        ok &= all(_ok(f) for f in fids.values())
        rows.append({"n": n, "d": d, "feasible": feasible, "infeasible": infeasible,
                     "min_fidelity": min(fids.values()) if fids else None})
    return Criterion(5, "regular-graph transfer feasibility sets", ok, {"grid": rows})


def _teleport_row(report) -> dict:
    return {
        "branches": len(report.branches),
        "total_probability": report.total_probability,
        "min_fidelity": min(b.fidelity for b in report.branches),
    }


def criterion_6_teleport_line(seed: int = 106) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for n in TELEPORT_LINE:
        plan = plan_teleport_line(n)
        worst = None
        for _ in range(RANDOM_INPUTS):
            r = run_teleport(plan, random_vector(2, rng))
            ok &= r.passed
            row = _teleport_row(r)
            if worst is None or row["min_fidelity"] < worst["min_fidelity"]:
                worst = row
        rows.append({"n": n, **worst})
    return Criterion(6, "line teleportation, every branch", ok, {"runs": rows})


def criterion_7_teleport_cycle(seed: int = 107) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for d in TELEPORT_CYCLE:
        plan = plan_teleport_cycle(d)
        for _ in range(RANDOM_INPUTS):
            r = run_teleport(plan, random_vector(2, rng))
            by_pos: dict = {}
            for b in r.branches:
                by_pos[b.position_outcome] = by_pos.get(b.position_outcome, 0.0) + b.probability
            good = (
                r.passed
                and sorted(by_pos) == [0, d // 2]
                and all(abs(p - 0.5) <= RESULT_TOL for p in by_pos.values())
            )
            ok &= good
        rows.append({"d": d, "position_probabilities": {str(k): v for k, v in sorted(by_pos.items())},
                     **_teleport_row(r)})
    return Criterion(7, "cycle teleportation, outcomes {0, d/2} at 1/2 each", ok, {"runs": rows})


def criterion_8_teleport_complete(seed: int = 108) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for d in TELEPORT_COMPLETE:
        for t in range(1, 2 * d + 1):
            if math.gcd(t, d) != 1:
                try:
                    plan_teleport_complete(d, t)
                    rejected = False
                except CoprimalityError:
                    rejected = True
                ok &= rejected
                rows.append({"d": d, "t": t, "rejected": rejected})
                continue
            injective = len({(t * s) % d for s in range(d)}) == d
            r = run_teleport(plan_teleport_complete(d, t), random_vector(d, rng))
            good = injective and r.passed and len(r.branches) == d * d
            ok &= good
            rows.append({"d": d, "t": t, "injective": injective, **_teleport_row(r), "passed": good})
    return Criterion(8, "complete-graph teleportation for coprime t", ok, {"runs": rows})


def criterion_9_teleport_regular(seed: int = 109) -> Criterion:
    rng = np.random.default_rng(seed)
    rows, ok = [], True
    for n, d, t in TELEPORT_REGULAR:
        r = run_teleport(plan_teleport_regular(n, d, t), random_vector(d, rng))
        support = r.pre_measurement.positions()
        good = (
            len(support) == 2 * d - 1
            and sorted(support) == sorted(regular_support(n, d, t))
            and r.passed
        )
        ok &= good
        rows.append({"n": n, "d": d, "t": t, "support": support, **_teleport_row(r), "passed": good})
    totients = {"6": totient_set(6), "9": totient_set(9)}
    ok &= totients["6"] == [1, 5] and totients["9"] == [1, 2, 4, 5, 7, 8]
    return Criterion(9, "regular-graph teleportation", ok, {"runs": rows, "totient_sets": totients})


# -- engine soundness -------------------------------------------------------


@dataclass(frozen=True)
class _Composite:
    """Ad-hoc plan for schedules that are not a single transfer (e.g. periodicity)."""

    arena: GraphSpec
    steps: tuple
    coin_dims: tuple
    coin2_init: np.ndarray
    start: int = 0


def sparse_dense_gap(plan, payload) -> float:
    """Max entrywise gap between the sparse and dense traces of ``plan``."""
    payload = np.asarray(payload, dtype=complex)
    init = product_state(plan.arena, getattr(plan, "start", 0), [payload, plan.coin2_init])
    _, sparse = apply_steps(init, plan.steps, trace=True)
    system = oracle.build_system(plan)
    dense = oracle.dense_evolve(plan, payload, trace=True, system=system)
    return oracle.max_deviation(system, sparse, dense)


def all_protocol_plans():
    """Every plan exercised by criteria 1-9, with a label."""
    for x in LINE_TARGETS:
        yield f"line x={x}", plan_line(x)
    for x in PERIOD_TARGETS:
        steps = plan_line(x).steps + plan_line(-x).steps
        yield f"periodicity x={x}", _Composite(GraphSpec.line(), steps, (2, 2), np.array([1, 0], complex))
    for d in CYCLE_SIZES:
        for method in ((1, 2, 3, 4) if d % 2 == 0 else (1, 2)):
            for x in range(1, d):
                yield f"cycle d={d} x={x} m={method}", plan_cycle(d, x, method)
    for d in COMPLETE_SIZES:
        for x in range(1, d):
            yield f"complete d={d} x={x}", plan_complete(d, x)
        yield f"complete revival d={d}", plan_revival(GraphSpec.complete(d), 2 * d)
    for n, d in REGULAR_GRID:
        for x in range(1, n):
            yield f"regular n={n} d={d} x={x}", plan_regular(n, d, x)
    for n in TELEPORT_LINE:
        yield f"teleport line n={n}", plan_teleport_line(n)
    for d in TELEPORT_CYCLE:
        yield f"teleport cycle d={d}", plan_teleport_cycle(d)
    for d in TELEPORT_COMPLETE:
        for t in range(1, 2 * d + 1):
            if math.gcd(t, d) == 1:
                yield f"teleport complete d={d} t={t}", plan_teleport_complete(d, t)
    for n, d, t in TELEPORT_REGULAR:
        yield f"teleport regular n={n} d={d} t={t}", plan_teleport_regular(n, d, t)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


COMMUTATOR_ARENAS = (
    GraphSpec.line(),
    GraphSpec.cycle(5),
    GraphSpec.complete(4),
    GraphSpec.circulant(7, 3),
)


def random_two_coin_state(arena: GraphSpec, rng: np.random.Generator, terms: int = 6):
    d = arena.coin_dim
    span = arena.vertices if arena.finite else 7
    lo = 0 if arena.finite else -3
    pairs = []
    for _ in range(terms):
        label = (int(rng.integers(lo, lo + span)), int(rng.integers(d)), int(rng.integers(d)))
        pairs.append((label, complex(rng.standard_normal(), rng.standard_normal())))
    return make_state(arena, [d, d], pairs)


def commutator_trial(arena: GraphSpec, rng: np.random.Generator) -> float:
    d = arena.coin_dim
    state = random_two_coin_state(arena, rng)
    ops = [CoinOp.custom(random_unitary(d, rng)), CoinOp.identity(d), CoinOp.fourier(d),
           CoinOp.shift(d) if d > 2 else CoinOp.x()]
    s1 = step(arena, 1, ops[int(rng.integers(len(ops)))])
    s2 = step(arena, 2, ops[int(rng.integers(len(ops)))])
    return commutator_check(state, s1, s2)


def criterion_10_engine(seed: int = 110) -> Criterion:
    rng = np.random.default_rng(seed)
    worst_gap, worst_label, count = 0.0, None, 0
    for label, plan in all_protocol_plans():
        gap = sparse_dense_gap(plan, random_vector(plan.coin_dims[0], rng))
        count += 1
        if gap >= worst_gap:
            worst_gap, worst_label = gap, label
    comm = {}
    for arena in COMMUTATOR_ARENAS:
        comm[arena.describe()] = max(commutator_trial(arena, rng) for _ in range(COMMUTATOR_TRIALS))
    ok = worst_gap <= ORACLE_TOL and all(v <= RESULT_TOL for v in comm.values())
    return Criterion(10, "sparse engine matches dense oracle; distinct-coin steps commute", ok,
                     {"plans_checked": count, "max_sparse_dense_gap": worst_gap,
                      "worst_plan": worst_label, "max_commutator": comm})


CRITERIA = (
    criterion_1_line,
    criterion_2_periodicity,
    criterion_3_cycle,
    criterion_4_complete,
    criterion_5_regular,
    criterion_6_teleport_line,
    criterion_7_teleport_cycle,
    criterion_8_teleport_complete,
    criterion_9_teleport_regular,
    criterion_10_engine,
)


def verify_all() -> list:
    return [fn() for fn in CRITERIA]
