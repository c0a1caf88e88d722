"""Brute-force dense evolution used to certify schedules and cross-check the sparse engine.

Nothing here reuses the sparse shift code: every step matrix is assembled
from Kronecker products of an explicit position permutation and coin
projectors.  Line arenas are cut to the window ``[start-k-1, start+k+1]``
for a ``k``-step plan and closed cyclically so the matrices stay unitary;
the walker can never reach the seam, so the cut is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import InfeasibleError, SizeError
from .hilbert import LINE, CYCLE, GraphSpec, WalkState, from_amplitudes, vector_fidelity

MAX_DIM = 100_000
FIDELITY_TOL = 1e-10


def _coin(op) -> np.ndarray:
    d = op.dim
    if op.kind == "I":
        return np.eye(d)
    if op.kind == "X":
        return np.array([[0.0, 1.0], [1.0, 0.0]])
    if op.kind == "shift":
        return np.roll(np.eye(d), op.power, axis=0)
    if op.kind == "shift_inv":
        return np.roll(np.eye(d), -1, axis=0)
    if op.kind == "fourier":
        j = np.arange(d)
        return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
    if op.kind == "clock":
        return np.diag(np.exp(2j * np.pi * op.power * np.arange(d) / d))
    return np.asarray(op.matrix, dtype=complex)


def _proj(d: int, j: int) -> np.ndarray:
    p = np.zeros((d, d))
    p[j, j] = 1.0
    return p


@dataclass
class DenseSystem:
    """Flattened Hilbert space ``position (x) coin_1 (x) ... (x) coin_M``."""

    arena: GraphSpec
    positions: list
    coin_dims: tuple
    step_matrices: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.positions) * int(np.prod(self.coin_dims))

    def index(self, label) -> int:
        i = self.positions.index(label[0])
        for c, d in zip(label[1:], self.coin_dims):
            i = i * d + c
        return i

    def vector(self, state: WalkState) -> np.ndarray:
        v = np.zeros(self.dimension, dtype=complex)
        for lab, amp in state.amplitudes.items():
            v[self.index(lab)] = amp
        return v

    def state(self, vec: np.ndarray) -> WalkState:
        amps = {}
        for idx in np.flatnonzero(np.abs(vec) > 0):
            rem, labs = int(idx), []
            for d in reversed(self.coin_dims):
                rem, c = divmod(rem, d)
                labs.append(c)
            amps[(self.positions[rem], *reversed(labs))] = vec[idx]
        return from_amplitudes(self.arena, self.coin_dims, amps)

    def basis_vector(self, position: int) -> np.ndarray:
        e = np.zeros(len(self.positions))
        e[self.positions.index(position)] = 1.0
        return e

    def step_matrix(self, coin: int, op) -> np.ndarray:
        """``W_coin`` built as ``(sum_j S^{move(j)} (x) P_j) . (I (x) C)``."""
        npos = len(self.positions)
        s = np.roll(np.eye(npos), 1, axis=0)  # |x+1><x|, cyclic on the window
        dims = self.coin_dims
        eye = [np.eye(d) for d in dims]
        dm = dims[coin - 1]
        if self.arena.kind in (LINE, CYCLE):
            moves = {0: s, 1: s.T}
        else:
            moves = {j: np.linalg.matrix_power(s, j) for j in range(dm)}
        shift = 0
        for j in range(dm):
            factors = [moves[j]] + [(_proj(dm, j) if m == coin - 1 else eye[m]) for m in range(len(dims))]
            shift = shift + reduce(np.kron, factors)
        coin_factors = [np.eye(npos)] + [(_coin(op) if m == coin - 1 else eye[m]) for m in range(len(dims))]
        return shift @ reduce(np.kron, coin_factors)

    def local(self, ops) -> np.ndarray:
        """``I (x) U_1 (x) ... (x) U_M`` for dense coin matrices."""
        return reduce(np.kron, [np.eye(len(self.positions))] + [np.asarray(u) for u in ops])


def build_system(plan) -> DenseSystem:
    """Dense space and step matrices for any plan with ``arena``, ``coin_dims``, ``steps``."""
    arena = plan.arena
    steps = list(plan.steps)
    if arena.kind == LINE:
        k = len(steps)
        start = getattr(plan, "start", 0)
        positions = list(range(start - k - 1, start + k + 2))
    else:
        positions = list(range(arena.vertices))
    system = DenseSystem(arena, positions, tuple(plan.coin_dims))
    if system.dimension > MAX_DIM:
        raise SizeError(f"dense dimension {system.dimension} exceeds {MAX_DIM}")
    cache: dict = {}
    for st in steps:
        key = (st.coin, st.op.kind, st.op.power, id(st.op.matrix))
        if key not in cache:
            cache[key] = system.step_matrix(st.coin, st.op)
        system.step_matrices.append(cache[key])
    return system


def initial_vector(system: DenseSystem, plan, payload) -> np.ndarray:
    start = getattr(plan, "start", 0)
    coin2 = np.asarray(plan.coin2_init, dtype=complex)
    return reduce(np.kron, [system.basis_vector(start), np.asarray(payload, dtype=complex), coin2])


def dense_evolve(plan, payload, trace: bool = False, system: DenseSystem | None = None):
    """Evolve ``|start> (x) payload (x) coin2_init`` through the plan's steps.

    Returns the final dense vector, or the list of all ``len(steps) + 1``
    vectors when ``trace`` is set.
    """
    system = system or build_system(plan)
    v = initial_vector(system, plan, payload)
    out = [v]
    for m in system.step_matrices:
        v = m @ v
        out.append(v)
    return out if trace else v


# -- recovery ----------------------------------------------------------------


def _candidates(d: int):
    from .operators import CoinOp

    yield CoinOp.identity(d)
    if d == 2:
        yield CoinOp.x()
    else:
        for p in range(1, d):
            yield CoinOp.shift(d, p)
    for q in range(1, d):
        yield CoinOp.clock(d, q)
    for q in range(1, d):
        for p in range(1, d):
            x = _coin(CoinOp.x() if d == 2 else CoinOp.shift(d, p))
            yield CoinOp.custom(_coin(CoinOp.clock(d, q)) @ x)


def _general(v: np.ndarray, w: np.ndarray):
    from .operators import CoinOp

    d = len(v)
    # unitaries whose first columns are v and w up to phase
    qv, _ = np.linalg.qr(np.column_stack([v, np.eye(d)]))
    qw, _ = np.linalg.qr(np.column_stack([w, np.eye(d)]))
    return CoinOp.custom(qw @ qv.conj().T)


def _fix(v: np.ndarray, w: np.ndarray):
    for op in _candidates(len(v)):
        if vector_fidelity(_coin(op) @ v, w) >= 1 - FIDELITY_TOL:
            return op
    return _general(v, w)


def split_product(final: WalkState):
    """Decompose ``|x> (x) v_1 (x) v_2`` or raise :class:`InfeasibleError`."""
    if final.n_coins != 2:
        raise InfeasibleError("recovery search is defined for two coins")
    positions = final.positions()
    if len(positions) != 1:
        raise InfeasibleError(f"final state is spread over positions {positions}")
    d1, d2 = final.coin_dims
    m = np.zeros((d1, d2), dtype=complex)
    for (_, c1, c2), amp in final.amplitudes.items():
        m[c1, c2] = amp
    u, s, vh = np.linalg.svd(m)
    if len(s) > 1 and s[1] > FIDELITY_TOL:
        raise InfeasibleError("coins are entangled in the final state")
    return positions[0], u[:, 0] * s[0], vh[0]


def solve_recovery(final: WalkState, target_coin1, target_coin2):
    """Local unitaries ``(U_1, U_2)`` mapping the final coins onto the targets.

    The search prefers the identity, then coin shifts, then clock phases and
    their products, and only then a general unitary.
    """
    _, v1, v2 = split_product(final)
    w1 = np.asarray(target_coin1, dtype=complex)
    w2 = np.asarray(target_coin2, dtype=complex)
    return _fix(v1 / np.linalg.norm(v1), w1), _fix(v2, w2)


# -- certification -----------------------------------------------------------


@dataclass
class CertificationRecord:
    """Outcome of running a transfer plan on basis and random inputs."""

    tag: str
    passed: bool
    min_fidelity: float
    inputs_checked: int
    counterexample: list | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "passed": self.passed,
            "min_fidelity": self.min_fidelity,
            "inputs_checked": self.inputs_checked,
            "counterexample": None
            if self.counterexample is None
            else [[z.real, z.imag] for z in self.counterexample],
            "note": self.note,
        }


def transfer_fidelity(plan, payload, system: DenseSystem | None = None) -> float:
    """Dense fidelity of ``plan`` (including its recovery) for one payload."""
    system = system or build_system(plan)
    final = dense_evolve(plan, payload, system=system)
    u1, u2 = plan.recovery
    corrected = system.local([_coin(u1), _coin(u2)]) @ final
    target = reduce(
        np.kron,
        [system.basis_vector(plan.target), np.asarray(payload, dtype=complex), plan.coin2_init],
    )
    return float(abs(np.vdot(target, corrected)) ** 2)


def certify_schedule(plan, trials: int = 8, seed: int = 0, note: str = "") -> CertificationRecord:
    """Check a transfer plan on every basis input plus ``trials`` random inputs."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    from .hilbert import random_vector

    d = plan.coin_dims[0]
    rng = np.random.default_rng(seed)
    inputs = [np.eye(d)[k] for k in range(d)] + [random_vector(d, rng) for _ in range(trials)]
    system = build_system(plan)
    worst, bad = 1.0, None
    for vec in inputs:
        f = transfer_fidelity(plan, vec, system)
        if f < worst:
            worst = f
        if f < 1 - FIDELITY_TOL and bad is None:
            bad = [complex(z) for z in vec]
    return CertificationRecord(
        tag=getattr(plan, "case_tag", "?"),
        passed=bad is None,
        min_fidelity=max(0.0, min(1.0, worst)),
        inputs_checked=len(inputs),
        counterexample=bad,
        note=note,
    )


def max_deviation(system: DenseSystem, sparse_trace, dense_trace) -> float:
    """Largest entrywise gap between sparse and dense traces."""
    return max(
        float(np.max(np.abs(system.vector(s) - v))) for s, v in zip(sparse_trace, dense_trace)
    )


def norm_error(vec: np.ndarray) -> float:
    return abs(math.sqrt(float(np.vdot(vec, vec).real)) - 1.0)
