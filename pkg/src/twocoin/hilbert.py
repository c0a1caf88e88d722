"""Sparse pure states of a walker carrying one or more coin registers.

A basis label is a flat tuple ``(position, coin_1, ..., coin_M)``; a
:class:`WalkState` maps labels to complex amplitudes and never stores an
amplitude whose modulus is below :data:`PRUNE`.  Positions on the line are
arbitrary signed integers, so no truncation is ever needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    ArenaError,
    BasisError,
    ContractError,
    CoverageError,
    LabelError,
    SpaceMismatchError,
    ZeroStateError,
)

PRUNE = 1e-14
RESULT_TOL = 1e-10
ORACLE_TOL = 1e-12

LINE = "line"
CYCLE = "cycle"
COMPLETE = "complete"
CIRCULANT = "circulant"

Label = tuple  # (position, coin_1, ..., coin_M)


@dataclass(frozen=True)
class GraphSpec:
    """The arena a walker lives on.

    ``vertices`` is ``None`` for the unbounded line.  ``degree`` is only
    meaningful for circulant arenas, where vertex ``k`` connects to
    ``(k + j) mod n`` for ``j = 0..degree-1``.
    """

    kind: str
    vertices: int | None = None
    degree: int | None = None

    def __post_init__(self):
        if self.kind == LINE:
            if self.vertices is not None:
                raise ArenaError("the line is unbounded; vertices must be None")
        elif self.kind == CYCLE:
            if self.vertices is None or self.vertices < 3:
                raise ArenaError("a cycle needs at least 3 vertices")
        elif self.kind == COMPLETE:
            if self.vertices is None or self.vertices < 2:
                raise ArenaError("complete graph with loops needs at least 2 vertices")
        elif self.kind == CIRCULANT:
            if self.vertices is None or self.degree is None:
                raise ArenaError("circulant arena needs vertices and degree")
            if not 2 <= self.degree <= self.vertices:
                raise ArenaError("circulant arena requires 2 <= degree <= vertices")
        else:
            raise ArenaError(f"unknown arena kind {self.kind!r}")

    @classmethod
    def line(cls) -> GraphSpec:
        return cls(LINE)

    @classmethod
    def cycle(cls, d: int) -> GraphSpec:
        return cls(CYCLE, d)

    @classmethod
    def complete(cls, d: int) -> GraphSpec:
        return cls(COMPLETE, d)

    @classmethod
    def circulant(cls, n: int, d: int) -> GraphSpec:
        return cls(CIRCULANT, n, d)

    @property
    def finite(self) -> bool:
        return self.kind != LINE

    @property
    def coin_dim(self) -> int:
        """Dimension of a coin steering this arena's shift."""
        if self.kind in (LINE, CYCLE):
            return 2
        if self.kind == COMPLETE:
            return self.vertices
        return self.degree

    def describe(self) -> str:
        if self.kind == LINE:
            return "line"
        if self.kind == CIRCULANT:
            return f"circulant(n={self.vertices}, d={self.degree})"
        return f"{self.kind}({self.vertices})"


def _as_label(label, n_coins: int) -> Label:
    # accepts (pos, c1, c2, ...) or (pos, [c1, c2, ...])
    if len(label) == 2 and isinstance(label[1], (list, tuple, np.ndarray)):
        flat = (label[0], *label[1])
    else:
        flat = tuple(label)
    if len(flat) != n_coins + 1:
        raise LabelError(f"label {label!r} does not have {n_coins} coin entries")
    try:
        return tuple(int(v) for v in flat)
    except (TypeError, ValueError) as exc:
        raise LabelError(f"label {label!r} has non-integer entries") from exc


def check_label(label: Label, arena: GraphSpec, coin_dims: Sequence[int]) -> None:
    pos, coins = label[0], label[1:]
    if arena.finite and not 0 <= pos < arena.vertices:
        raise LabelError(f"position {pos} outside 0..{arena.vertices - 1}")
    for m, (c, dim) in enumerate(zip(coins, coin_dims), start=1):
        if not 0 <= c < dim:
            raise LabelError(f"coin {m} value {c} outside 0..{dim - 1}")


@dataclass(frozen=True, eq=False)
class WalkState:
    """Immutable sparse amplitude map over (position, coin_1, ..., coin_M)."""

    arena: GraphSpec
    coin_dims: tuple
    amplitudes: Mapping[Label, complex] = field(default_factory=dict)

    @property
    def n_coins(self) -> int:
        return len(self.coin_dims)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def support(self) -> list:
        return sorted(self.amplitudes)

    def positions(self) -> list:
        return sorted({lab[0] for lab in self.amplitudes})

    def __getitem__(self, label) -> complex:
        return self.amplitudes.get(_as_label(label, self.n_coins), 0j)

    def __len__(self) -> int:
        return len(self.amplitudes)

    def scaled(self, factor: complex) -> WalkState:
        return from_amplitudes(
            self.arena, self.coin_dims, {k: factor * v for k, v in self.amplitudes.items()}
        )

    def __repr__(self) -> str:
        terms = " + ".join(f"({v:.4g})|{k}>" for k, v in sorted(self.amplitudes.items())[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"WalkState[{self.arena.describe()}]({terms}{more})"


def from_amplitudes(arena: GraphSpec, coin_dims, amps: Mapping[Label, complex]) -> WalkState:
    """Wrap an amplitude dict without normalizing; only prunes dust."""
    kept = {k: complex(v) for k, v in amps.items() if abs(v) >= PRUNE}
    return WalkState(arena, tuple(coin_dims), kept)


def make_state(arena: GraphSpec, coin_dims: Sequence[int], terms) -> WalkState:
    """Build a normalized state from ``(label, amplitude)`` terms.

    ``terms`` may be a mapping or an iterable of pairs; duplicate labels are
    summed before normalizing.

    >>> s = make_state(GraphSpec.line(), [2, 2], [((0, [0, 0]), 2), ((0, [0, 0]), 0)])
    >>> s[(0, 0, 0)]
    (1+0j)
    """
    coin_dims = tuple(int(c) for c in coin_dims)
    if any(c < 1 for c in coin_dims):
        raise LabelError("coin dimensions must be positive")
    pairs = terms.items() if isinstance(terms, Mapping) else list(terms)
    if not pairs:
        raise ZeroStateError("no terms given")
    acc: dict = {}
    for label, amp in pairs:
        key = _as_label(label, len(coin_dims))
        check_label(key, arena, coin_dims)
        acc[key] = acc.get(key, 0j) + complex(amp)
    norm = math.sqrt(sum(abs(v) ** 2 for v in acc.values()))
    if norm == 0.0:
        raise ZeroStateError("all amplitudes are zero")
    return from_amplitudes(arena, coin_dims, {k: v / norm for k, v in acc.items()})


def product_state(arena: GraphSpec, position: int, coin_vectors: Sequence) -> WalkState:
    """``|position> (x) v_1 (x) ... (x) v_M`` for dense coin vectors."""
    vecs = [np.asarray(v, dtype=complex) for v in coin_vectors]
    dims = [len(v) for v in vecs]
    terms = {}
    for idx in np.ndindex(*dims):
        amp = np.prod([v[i] for v, i in zip(vecs, idx)])
        if amp != 0:
            terms[(position, *idx)] = amp
    return make_state(arena, dims, terms)


def _same_space(u: WalkState, v: WalkState) -> None:
    if u.arena != v.arena or u.coin_dims != v.coin_dims:
        raise SpaceMismatchError(
            f"states live on different spaces: {u.arena.describe()} {u.coin_dims} "
            f"vs {v.arena.describe()} {v.coin_dims}"
        )


def inner_product(u: WalkState, v: WalkState) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    _same_space(u, v)
    small, large = (u, v) if len(u) <= len(v) else (v, u)
    total = 0j
    for k, a in small.amplitudes.items():
        b = large.amplitudes.get(k)
        if b is not None:
            total += a.conjugate() * b if small is u else b.conjugate() * a
    return total


def fidelity_up_to_phase(u: WalkState, v: WalkState) -> float:
    """|<u|v>|^2, which is 1 exactly when the states agree up to a global phase."""
    return min(1.0, abs(inner_product(u, v)) ** 2)


def distance(u: WalkState, v: WalkState) -> float:
    """Euclidean norm of ``u - v`` (phase-sensitive)."""
    _same_space(u, v)
    keys = set(u.amplitudes) | set(v.amplitudes)
    return math.sqrt(
        sum(abs(u.amplitudes.get(k, 0j) - v.amplitudes.get(k, 0j)) ** 2 for k in keys)
    )


# -- measurement -------------------------------------------------------------

POSITION = "position"

BasisVector = Union[Mapping[int, complex], Sequence[complex], np.ndarray]


class Outcome(NamedTuple):
    """One projective outcome: basis index, its probability and the collapsed state."""

    index: int
    probability: float
    state: WalkState


def _slot(subsystem, n_coins: int) -> int:
    if subsystem == POSITION:
        return 0
    if isinstance(subsystem, int) and 1 <= subsystem <= n_coins:
        return subsystem
    raise LabelError(f"unknown subsystem {subsystem!r}; use 'position' or a coin number 1..{n_coins}")


def _as_map(vec: BasisVector) -> dict:
    if isinstance(vec, Mapping):
        return {int(k): complex(v) for k, v in vec.items() if v != 0}
    return {i: complex(v) for i, v in enumerate(np.asarray(vec).ravel()) if v != 0}


def project_subsystem(state: WalkState, subsystem, basis: Sequence[BasisVector]) -> list:
    """Measure one subsystem of ``state`` in an orthonormal basis.

    Parameters
    ----------
    state : WalkState
    subsystem : "position" or int
        Coins are numbered from 1.
    basis : sequence of vectors
        Each vector is either a mapping value -> amplitude or a dense array
        indexed by value.  The basis may be partial as long as the part of
        the state outside its span carries no amplitude.

    Returns
    -------
    list of Outcome
        Zero-probability outcomes are omitted; each ``Outcome.state`` is the
        normalized collapsed state ``e_i (x) phi_i``.
    """
    slot = _slot(subsystem, state.n_coins)
    vecs = [_as_map(v) for v in basis]
    keys = sorted(set().union(*vecs)) if vecs else []
    gram = np.array(
        [[sum(a.get(k, 0j).conjugate() * b.get(k, 0j) for k in keys) for b in vecs] for a in vecs]
    )
    if vecs and np.max(np.abs(gram - np.eye(len(vecs)))) > RESULT_TOL:
        raise BasisError("measurement basis is not orthonormal")

    # group amplitudes by the labels of the unmeasured subsystems
    rest: dict = {}
    for lab, amp in state.amplitudes.items():
        other = lab[:slot] + lab[slot + 1 :]
        rest.setdefault(other, {})[lab[slot]] = amp

    outcomes = []
    total = 0.0
    for i, e in enumerate(vecs):
        phi = {}
        for other, column in rest.items():
            c = sum(e.get(v, 0j).conjugate() * a for v, a in column.items())
            if abs(c) >= PRUNE:
                phi[other] = c
        p = sum(abs(c) ** 2 for c in phi.values())
        total += p
        if p < 1e-20:
            continue
        scale = 1.0 / math.sqrt(p)
        post = {}
        for other, c in phi.items():
            for v, ev in e.items():
                post[other[:slot] + (v,) + other[slot:]] = ev * c * scale
        outcomes.append(Outcome(i, p, from_amplitudes(state.arena, state.coin_dims, post)))
    if abs(total - 1.0) > RESULT_TOL:
        raise CoverageError(
            f"basis captures probability {total:.12g}; the state has weight outside its span"
        )
    return outcomes


def coin_vector(state: WalkState, coin: int) -> np.ndarray:
    """Dense vector of one coin when ``state`` factorizes across that coin.

    The relative phases of the returned vector are those of the state; the
    overall phase is taken from the largest-norm slice.
    """
    slot = _slot(coin, state.n_coins)
    dim = state.coin_dims[slot - 1]
    rows: dict = {}
    for lab, amp in state.amplitudes.items():
        other = lab[:slot] + lab[slot + 1 :]
        rows.setdefault(other, np.zeros(dim, dtype=complex))[lab[slot]] = amp
    if not rows:
        raise ZeroStateError("empty state")
    mat = np.array(list(rows.values()))
    sv = np.linalg.svd(mat, compute_uv=False)
    if len(sv) > 1 and sv[1] > RESULT_TOL:
        raise ContractError(f"coin {coin} is entangled with the rest of the system")
    best = mat[np.argmax(np.linalg.norm(mat, axis=1))]
    return best / np.linalg.norm(best)


def vector_fidelity(u, v) -> float:
    """|<u|v>|^2 for normalized dense vectors."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return float(min(1.0, abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real)))


def random_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex vector from 2*dim standard normals."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def labels_sorted(states: Iterable[WalkState]) -> list:
    return sorted({lab for s in states for lab in s.amplitudes})
