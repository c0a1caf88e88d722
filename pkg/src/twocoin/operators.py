"""Coin operators, coin-conditioned shifts and the multi-coin step ``W_m``.

One step flips coin ``m`` with its coin operator and then moves the walker
according to the (new) value of that coin; every other coin is untouched.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, SpaceMismatchError, UnitarityError
from .hilbert import (
    CIRCULANT,
    COMPLETE,
    CYCLE,
    LINE,
    RESULT_TOL,
    GraphSpec,
    WalkState,
    distance,
    from_amplitudes,
)

IDENTITY = "I"
PAULI_X = "X"
SHIFT = "shift"  # X_d^power : |j> -> |(j + power) mod d>
SHIFT_INV = "shift_inv"
FOURIER = "fourier"
CLOCK = "clock"  # Z_d^power : |j> -> w^(power j) |j>
CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class CoinOp:
    """A unitary acting on a single coin register."""

    kind: str
    dim: int
    power: int = 1
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == PAULI_X and self.dim != 2:
            raise SpaceMismatchError("Pauli X acts on a 2-dimensional coin")
        if self.kind == CUSTOM:
            if self.matrix is None:
                raise UnitarityError("custom coin needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (self.dim, self.dim):
                raise SpaceMismatchError(f"custom coin matrix must be {self.dim}x{self.dim}")
            if np.max(np.abs(m.conj().T @ m - np.eye(self.dim))) > RESULT_TOL:
                raise UnitarityError("custom coin matrix is not unitary")
            object.__setattr__(self, "matrix", m)
        elif self.kind not in (IDENTITY, PAULI_X, SHIFT, SHIFT_INV, FOURIER, CLOCK):
            raise ValueError(f"unknown coin kind {self.kind!r}")

    @classmethod
    def identity(cls, dim: int) -> CoinOp:
        return cls(IDENTITY, dim)

    @classmethod
    def x(cls) -> CoinOp:
        return cls(PAULI_X, 2)

    @classmethod
    def shift(cls, dim: int, power: int = 1) -> CoinOp:
        return cls(SHIFT, dim, power % dim)

    @classmethod
    def shift_inv(cls, dim: int) -> CoinOp:
        return cls(SHIFT_INV, dim)

    @classmethod
    def fourier(cls, dim: int) -> CoinOp:
        return cls(FOURIER, dim)

    @classmethod
    def clock(cls, dim: int, power: int = 1) -> CoinOp:
        return cls(CLOCK, dim, power % dim)

    @classmethod
    def custom(cls, m, name: str | None = None) -> CoinOp:
        m = np.asarray(m, dtype=complex)
        return cls(CUSTOM, m.shape[0], matrix=m)

    @property
    def is_identity(self) -> bool:
        return self.kind == IDENTITY or (self.kind in (SHIFT, CLOCK) and self.power == 0)

    @property
    def name(self) -> str:
        if self.kind == IDENTITY or self.is_identity:
            return "I"
        if self.kind == PAULI_X:
            return "X"
        if self.kind == SHIFT:
            if self.dim == 2:
                return "X"
            return "X_d" if self.power == 1 else f"X_d^{self.power}"
        if self.kind == SHIFT_INV:
            return "X_d^-1"
        if self.kind == FOURIER:
            return "F_d"
        if self.kind == CLOCK:
            if self.dim == 2:
                return "Z"
            return "Z_d" if self.power == 1 else f"Z_d^{self.power}"
        return "U"

    @cached_property
    def columns(self) -> tuple:
        """Nonzero entries per input value: ``columns[j] = ((i, U[i, j]), ...)``."""
        m = coin_matrix(self)
        return tuple(
            tuple((i, complex(m[i, j])) for i in range(self.dim) if abs(m[i, j]) > 0)
            for j in range(self.dim)
        )

    def __eq__(self, other):
        if not isinstance(other, CoinOp):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(coin_matrix(self), coin_matrix(other))

    __hash__ = None

    def __repr__(self):
        return f"CoinOp({self.name}, dim={self.dim})"


def coin_matrix(op: CoinOp) -> np.ndarray:
    """Explicit ``dim x dim`` unitary of a coin operator."""
    d = op.dim
    if op.kind == IDENTITY:
        return np.eye(d, dtype=complex)
    if op.kind == PAULI_X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if op.kind in (SHIFT, SHIFT_INV):
        p = op.power if op.kind == SHIFT else -1
        m = np.zeros((d, d), dtype=complex)
        for j in range(d):
            m[(j + p) % d, j] = 1
        return m
    if op.kind == FOURIER:
        w = cmath.exp(2j * math.pi / d)
        return np.array([[w ** (m * k) for k in range(d)] for m in range(d)]) / math.sqrt(d)
    if op.kind == CLOCK:
        w = cmath.exp(2j * math.pi / d)
        return np.diag([w ** (op.power * j) for j in range(d)])
    return op.matrix.copy()


@dataclass(frozen=True)
class ShiftOp:
    """Coin-conditioned move of the walker for one arena."""

    arena: GraphSpec

    def target(self, position: int, coin_value: int) -> int:
        a = self.arena
        if a.kind == LINE:
            return position + 1 if coin_value == 0 else position - 1
        if a.kind == CYCLE:
            return (position + (1 if coin_value == 0 else -1)) % a.vertices
        # complete graph with loops and circulant graphs share the rule (k + j) mod n
        return (position + coin_value) % a.vertices

    def source(self, position: int, coin_value: int) -> int:
        """Inverse of :meth:`target` for a fixed coin value."""
        a = self.arena
        if a.kind == LINE:
            return position - 1 if coin_value == 0 else position + 1
        if a.kind == CYCLE:
            return (position - (1 if coin_value == 0 else -1)) % a.vertices
        return (position - coin_value) % a.vertices


def shift_for(arena: GraphSpec) -> ShiftOp:
    return ShiftOp(arena)


@dataclass(frozen=True)
class StepSpec:
    """One walk step: flip coin ``coin`` (numbered from 1) with ``op``, then shift."""

    coin: int
    op: CoinOp
    shift: ShiftOp

    def __post_init__(self):
        if self.coin < 1:
            raise SpaceMismatchError("coins are numbered from 1")

    @property
    def label(self) -> str:
        return f"W{self.coin}[{self.op.name}]"


def step(arena: GraphSpec, coin: int, op: CoinOp | None = None) -> StepSpec:
    """Convenience constructor; identity coin when ``op`` is omitted."""
    return StepSpec(coin, op or CoinOp.identity(arena.coin_dim), shift_for(arena))


def _check_step(state: WalkState, st: StepSpec) -> None:
    if st.shift.arena != state.arena:
        raise SpaceMismatchError("step and state are on different arenas")
    if st.coin > state.n_coins:
        raise SpaceMismatchError(f"state has no coin {st.coin}")
    dim = state.coin_dims[st.coin - 1]
    if st.op.dim != dim:
        raise SpaceMismatchError(f"coin {st.coin} has dimension {dim}, operator has {st.op.dim}")
    if state.arena.kind in (LINE, CYCLE) and dim != 2:
        raise SpaceMismatchError("line and cycle shifts need 2-dimensional coins")
    if state.arena.finite and state.arena.kind in (COMPLETE, CIRCULANT) and dim > state.arena.vertices:
        raise SpaceMismatchError("coin dimension exceeds the number of vertices")


def apply_step(state: WalkState, st: StepSpec) -> WalkState:
    """Apply ``W_m = shift_m . (I (x) C_m)`` to every term of ``state``."""
    _check_step(state, st)
    slot = st.coin
    cols = st.op.columns
    move = st.shift.target
    out: dict = {}
    for lab, amp in state.amplitudes.items():
        for c_new, u in cols[lab[slot]]:
            new = list(lab)
            new[slot] = c_new
            new[0] = move(lab[0], c_new)
            key = tuple(new)
            out[key] = out.get(key, 0j) + u * amp
    return from_amplitudes(state.arena, state.coin_dims, out)


def apply_steps(state: WalkState, steps, trace: bool = False):
    """Run a schedule; with ``trace`` also return every intermediate state."""
    states = [state]
    for st in steps:
        state = apply_step(state, st)
        if trace:
            states.append(state)
    return (state, states) if trace else state


def apply_coin(state: WalkState, coin: int, op: CoinOp) -> WalkState:
    """Apply a local unitary to one coin without moving the walker."""
    dim = state.coin_dims[coin - 1]
    if op.dim != dim:
        raise SpaceMismatchError(f"coin {coin} has dimension {dim}, operator has {op.dim}")
    cols = op.columns
    out: dict = {}
    for lab, amp in state.amplitudes.items():
        for c_new, u in cols[lab[coin]]:
            key = lab[:coin] + (c_new,) + lab[coin + 1 :]
            out[key] = out.get(key, 0j) + u * amp
    return from_amplitudes(state.arena, state.coin_dims, out)


def unshift(state: WalkState, st: StepSpec) -> WalkState:
    """Inverse of the shift part of ``st`` (no coin operation)."""
    back = st.shift.source
    slot = st.coin
    out = {}
    for lab, amp in state.amplitudes.items():
        out[(back(lab[0], lab[slot]),) + lab[1:]] = amp
    return from_amplitudes(state.arena, state.coin_dims, out)


def commutator_check(state: WalkState, s1: StepSpec, s2: StepSpec) -> float:
    """Norm of ``(W_2 W_1 - W_1 W_2)|state>`` for steps on different coins."""
    if s1.coin == s2.coin:
        raise ContractError("commutation is only claimed for steps on different coins")
    a = apply_step(apply_step(state, s1), s2)
    b = apply_step(apply_step(state, s2), s1)
    return distance(a, b)


__all__ = [
    "CoinOp",
    "ShiftOp",
    "StepSpec",
    "apply_coin",
    "apply_step",
    "apply_steps",
    "coin_matrix",
    "commutator_check",
    "shift_for",
    "step",
    "unshift",
]
