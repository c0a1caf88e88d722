"""Teleportation from coin 1 to coin 2 after a long two-coin walk.

Each protocol evolves ``|0> (x) payload (x) coin2_init`` with identity coins,
measures the position and coin 1, and applies a correction to coin 2 chosen
from the two measurement results.  Branches are enumerated exhaustively;
:func:`sample_branch` draws one of them for stochastic runs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArenaError, ContractError, CoprimalityError, ParityError
from .hilbert import (
    POSITION,
    RESULT_TOL,
    GraphSpec,
    WalkState,
    coin_vector,
    distance,
    product_state,
    project_subsystem,
    vector_fidelity,
)
from .operators import apply_steps
from .transfer import build_schedule

_S2 = 1 / math.sqrt(2)
_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PLUS_MINUS = [(1, np.array([_S2, _S2])), (-1, np.array([_S2, -_S2]))]


def totient_set(n: int) -> list:
    """Residues in ``1..n`` coprime to ``n``, ascending; its length is Euler's phi(n)."""
    if n < 1:
        raise ValueError("n must be positive")
    return [x for x in range(1, n + 1) if math.gcd(x, n) == 1]


def fourier_basis(d: int) -> list:
    """``(k, |k~>)`` pairs with ``|k~> = sum_m exp(2 pi i m k / d) |m> / sqrt(d)``."""
    m = np.arange(d)
    return [(k, np.exp(2j * np.pi * m * k / d) / math.sqrt(d)) for k in range(d)]


@dataclass(frozen=True, eq=False)
class TeleportPlan:
    protocol: str
    arena: GraphSpec
    half_steps: int
    total_steps: int
    coin2_init: np.ndarray
    position_basis: list  # (outcome label, {vertex: amplitude})
    coin1_basis: list  # (outcome label, dense vector)
    t: int = 1
    start: int = 0

    @property
    def coin_dims(self) -> tuple:
        d = self.arena.coin_dim
        return (d, d)

    @property
    def steps(self) -> tuple:
        return build_schedule(self.arena, self.total_steps, {})

    def correction(self, position_outcome: int, coin1_outcome: int) -> np.ndarray:
        return _CORRECTIONS[self.protocol](self, position_outcome, coin1_outcome)


@dataclass(frozen=True, eq=False)
class MeasurementBranch:
    position_outcome: int
    coin1_outcome: int
    probability: float
    post_coin2: np.ndarray
    correction: np.ndarray
    corrected: np.ndarray
    fidelity: float

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1 - RESULT_TOL


@dataclass(frozen=True, eq=False)
class TeleportReport:
    plan: TeleportPlan
    payload: np.ndarray
    trace: list
    pre_measurement: WalkState
    branches: list

    @property
    def total_probability(self) -> float:
        return sum(b.probability for b in self.branches)

    @property
    def passed(self) -> bool:
        return abs(self.total_probability - 1) <= RESULT_TOL and all(b.passed for b in self.branches)


# -- corrections -------------------------------------------------------------


def _qubit_correction(pos_mark: int, c1: int) -> np.ndarray:
    if pos_mark == 0:
        return _X if c1 == 1 else _Z @ _X
    return _I2 if pos_mark == c1 else _Z


def _line_correction(plan, pos, c1):
    return _qubit_correction(pos, c1)


def _cycle_correction(plan, pos, c1):
    # vertex 0 is marked 0 and the antipode d/2 is marked 1
    return _qubit_correction(0 if pos == 0 else 1, c1)


def weyl_correction(d: int, s: int, t_tilde: int) -> np.ndarray:
    """``sum_k exp(2 pi i k t~ / d) |k><(s - k) mod d|``."""
    u = np.zeros((d, d), dtype=complex)
    for k in range(d):
        u[k, (s - k) % d] = cmath.exp(2j * math.pi * k * t_tilde / d)
    return u


def _complete_correction(plan, pos, c1):
    d = plan.arena.vertices
    s = (pow(plan.t, -1, d) * pos) % d
    return weyl_correction(d, s, c1)


def regular_correction(d: int, outcome: int, t_tilde: int) -> np.ndarray:
    """Coin-2 correction for the circulant protocol.

    ``outcome`` is ``k`` (symmetric pair), ``d + k`` (antisymmetric pair) or
    ``d - 1`` (the unpaired middle label), ``k = 0..d-2``.
    """
    u = np.zeros((d, d), dtype=complex)
    w = [cmath.exp(2j * math.pi * t_tilde * m / d) for m in range(d)]
    if outcome == d - 1:
        for m in range(d):
            u[m, d - 1 - m] = w[m]
        return u
    k, sign = (outcome, 1) if outcome < d - 1 else (outcome - d, -1)
    for m in range(k + 1):
        u[m, k - m] = w[m]
    for m in range(k + 1, d):
        u[m, k + d - m] = sign * w[m]
    return u


def _regular_correction(plan, pos, c1):
    return regular_correction(plan.arena.degree, pos, c1)


_CORRECTIONS = {
    "line": _line_correction,
    "cycle": _cycle_correction,
    "complete": _complete_correction,
    "regular": _regular_correction,
}


# -- plans -------------------------------------------------------------------


def _uniform(d: int) -> np.ndarray:
    return np.full(d, 1 / math.sqrt(d), dtype=complex)


def plan_teleport_line(n: int) -> TeleportPlan:
    if n <= 0 or n % 2:
        raise ParityError("line teleportation needs an even, positive number of steps")
    basis = [
        (0, {0: 1.0}),
        (1, {-n: _S2, n: _S2}),
        (-1, {-n: _S2, n: -_S2}),
    ]
    return TeleportPlan("line", GraphSpec.line(), n // 2, n, _uniform(2), basis, _PLUS_MINUS)


def _cycle_form(d: int) -> bool:
    """Whether ``d/2`` identity steps on the ``d``-cycle end in the two-vertex form."""
    arena = GraphSpec.cycle(d)
    a, b = 0.6, 0.8j
    init = product_state(arena, 0, [[a, b], _uniform(2)])
    final = apply_steps(init, build_schedule(arena, d // 2, {}))
    h = d // 2
    expected = {
        (0, 0, 1): a * _S2, (0, 1, 0): b * _S2,
        (h, 0, 0): a * _S2, (h, 1, 1): b * _S2,
    }
    ref = WalkState(arena, (2, 2), expected)
    return distance(final, ref) <= RESULT_TOL


def plan_teleport_cycle(d: int) -> TeleportPlan:
    """``d/2`` steps on the ``d``-cycle; admissible ``d`` are those the two-vertex form holds for."""
    if d < 4 or d % 2:
        raise ParityError("cycle teleportation needs an even number of vertices, at least 4")
    if not _cycle_form(d):
        raise ParityError(
            f"d={d}: after d/2 steps the state does not split over vertices 0 and d/2 "
            "(needs d divisible by 4)"
        )
    basis = [(v, {v: 1.0}) for v in range(d)]
    return TeleportPlan("cycle", GraphSpec.cycle(d), d // 4, d // 2, _uniform(2), basis, _PLUS_MINUS)


def plan_teleport_complete(d: int, t: int) -> TeleportPlan:
    if t < 1:
        raise CoprimalityError("t must be a positive integer")
    if math.gcd(t, d) != 1:
        raise CoprimalityError(f"gcd(t,d) must be 1 (t={t}, d={d})")
    basis = [(v, {v: 1.0}) for v in range(d)]
    return TeleportPlan(
        "complete", GraphSpec.complete(d), t, 2 * t, _uniform(d), basis, fourier_basis(d), t=t
    )


def regular_support(n: int, d: int, t: int) -> list:
    """Vertices ``t * sigma mod n`` for ``sigma = 0..2d-2``, in order of ``sigma``."""
    return [(t * sigma) % n for sigma in range(2 * d - 1)]


def plan_teleport_regular(n: int, d: int, t: int) -> TeleportPlan:
    if n < 2 * d - 1:
        raise ArenaError(f"need n >= 2d-1 (n={n}, d={d}); smaller graphs cannot teleport with certainty")
    if t < 1 or (t % n) not in totient_set(n):
        raise CoprimalityError(f"t mod n must lie in A(n): gcd(t,n) must be 1 (t={t}, n={n})")
    lab = regular_support(n, d, t)
    if len(set(lab)) != len(lab):
        raise CoprimalityError("position labels collide; t is not admissible")
    basis = []
    for k in range(d - 1):
        basis.append((k, {lab[k]: _S2, lab[d + k]: _S2}))
        basis.append((d + k, {lab[k]: _S2, lab[d + k]: -_S2}))
    basis.append((d - 1, {lab[d - 1]: 1.0}))
    return TeleportPlan(
        "regular", GraphSpec.circulant(n, d), t, 2 * t, _uniform(d), basis, fourier_basis(d), t=t
    )


# -- execution ---------------------------------------------------------------


def run_teleport(plan: TeleportPlan, payload) -> TeleportReport:
    """Evolve, then enumerate every (position, coin 1) outcome with its correction."""
    payload = np.asarray(payload, dtype=complex)
    if payload.shape != (plan.arena.coin_dim,):
        raise ContractError(f"payload must have {plan.arena.coin_dim} amplitudes")
    payload = payload / np.linalg.norm(payload)
    init = product_state(plan.arena, plan.start, [payload, plan.coin2_init])
    pre, trace = apply_steps(init, plan.steps, trace=True)

    pos_labels = [lab for lab, _ in plan.position_basis]
    c1_labels = [lab for lab, _ in plan.coin1_basis]
    branches = []
    for pos_out in project_subsystem(pre, POSITION, [v for _, v in plan.position_basis]):
        for c1_out in project_subsystem(pos_out.state, 1, [v for _, v in plan.coin1_basis]):
            pos, c1 = pos_labels[pos_out.index], c1_labels[c1_out.index]
            post = coin_vector(c1_out.state, 2)
            u = plan.correction(pos, c1)
            corrected = u @ post
            branches.append(
                MeasurementBranch(
                    position_outcome=pos,
                    coin1_outcome=c1,
                    probability=pos_out.probability * c1_out.probability,
                    post_coin2=post,
                    correction=u,
                    corrected=corrected,
                    fidelity=vector_fidelity(corrected, payload),
                )
            )
    return TeleportReport(plan, payload, trace, pre, branches)


def teleport_line(n: int, payload) -> list:
    return run_teleport(plan_teleport_line(n), payload).branches


def teleport_cycle(d: int, payload) -> list:
    return run_teleport(plan_teleport_cycle(d), payload).branches


def teleport_complete(d: int, t: int, payload) -> list:
    return run_teleport(plan_teleport_complete(d, t), payload).branches


def teleport_regular(n: int, d: int, t: int, payload) -> list:
    return run_teleport(plan_teleport_regular(n, d, t), payload).branches


def sample_branch(branches: list, seed) -> MeasurementBranch:
    """Draw one branch with its probability; ``seed`` is an int or a numpy Generator."""
    if not branches:
        raise ContractError("no branches to sample from")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = np.array([b.probability for b in branches])
    cdf = np.cumsum(p / p.sum())
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return branches[min(idx, len(branches) - 1)]
