import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocoin.errors import ContractError, SpaceMismatchError, UnitarityError
from twocoin.hilbert import GraphSpec, distance, make_state, product_state
from twocoin.operators import (
    CoinOp,
    apply_coin,
    apply_step,
    apply_steps,
    coin_matrix,
    commutator_check,
    shift_for,
    step,
    unshift,
)
from twocoin.verify import COMMUTATOR_ARENAS, random_two_coin_state, random_unitary

from conftest import qubits

LINE = GraphSpec.line()


def test_named_matrices():
    assert np.array_equal(coin_matrix(CoinOp.x()), [[0, 1], [1, 0]])
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.allclose(coin_matrix(CoinOp.fourier(2)), h)
    assert np.array_equal(coin_matrix(CoinOp.shift(3)) @ [1, 0, 0], [0, 1, 0])
    assert np.allclose(coin_matrix(CoinOp.shift_inv(4)) @ coin_matrix(CoinOp.shift(4)), np.eye(4))
    assert CoinOp.shift(2) == CoinOp.x()
    assert CoinOp.shift(5, 5).is_identity


def test_custom_must_be_unitary():
    with pytest.raises(UnitarityError):
        CoinOp.custom([[1, 1], [0, 1]])
    with pytest.raises(SpaceMismatchError):
        CoinOp("X", 3)


def test_shift_targets():
    assert shift_for(LINE).target(5, 1) == 4
    assert shift_for(GraphSpec.complete(5)).target(3, 4) == 2
    assert shift_for(GraphSpec.circulant(9, 4)).target(7, 3) == 1
    assert shift_for(GraphSpec.cycle(4)).target(3, 0) == 0


@pytest.mark.parametrize("arena", COMMUTATOR_ARENAS, ids=lambda a: a.describe())
def test_shift_source_inverts_target(arena):
    sh = shift_for(arena)
    span = range(arena.vertices) if arena.finite else range(-5, 6)
    for pos in span:
        for c in range(arena.coin_dim):
            assert sh.source(sh.target(pos, c), c) == pos


def test_first_line_step():
    a, b = 0.6, 0.8j
    s = make_state(LINE, [2, 2], {(0, 0, 0): a, (0, 1, 0): b})
    out = apply_step(s, step(LINE, 1))
    ref = make_state(LINE, [2, 2], {(1, 0, 0): a, (-1, 1, 0): b})
    assert distance(out, ref) < 1e-12


def test_identity_step_on_zero_coin_advances_everyone():
    s = make_state(LINE, [2, 2], {(0, 1, 0): 1, (4, 0, 0): 1j})
    out = apply_step(s, step(LINE, 2))
    assert out.positions() == [1, 5]


def test_complete_two_identity_steps():
    d = 3
    a = np.array([0.6, 0.0, 0.8])
    s = product_state(GraphSpec.complete(d), 0, [a, [1, 0, 0]])
    out = apply_steps(s, [step(s.arena, 1), step(s.arena, 2)])
    for k in range(d):
        assert out[(k, k, 0)] == pytest.approx(a[k])


def test_commutator_same_coin_rejected():
    s = make_state(LINE, [2, 2], {(0, 0, 0): 1})
    with pytest.raises(ContractError):
        commutator_check(s, step(LINE, 1), step(LINE, 1))


def test_commutator_complete_shift():
    rng = np.random.default_rng(3)
    arena = GraphSpec.complete(4)
    s = random_two_coin_state(arena, rng)
    assert commutator_check(s, step(arena, 1, CoinOp.shift(4)), step(arena, 2)) < 1e-10


@pytest.mark.parametrize("arena", COMMUTATOR_ARENAS, ids=lambda a: a.describe())
@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_distinct_coin_steps_commute(arena, seed):
    rng = np.random.default_rng(seed)
    d = arena.coin_dim
    s = random_two_coin_state(arena, rng)
    u1, u2 = CoinOp.custom(random_unitary(d, rng)), CoinOp.custom(random_unitary(d, rng))
    assert commutator_check(s, step(arena, 1, u1), step(arena, 2, u2)) < 1e-10


@pytest.mark.parametrize("arena", COMMUTATOR_ARENAS, ids=lambda a: a.describe())
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_steps_preserve_norm(arena, seed):
    rng = np.random.default_rng(seed)
    s = random_two_coin_state(arena, rng)
    u = CoinOp.custom(random_unitary(arena.coin_dim, rng))
    out = apply_steps(s, [step(arena, 1, u), step(arena, 2, CoinOp.fourier(arena.coin_dim))] * 3)
    assert out.norm() == pytest.approx(1, abs=1e-12)


@given(qubits())
def test_unshift_undoes_shift(v):
    s = product_state(GraphSpec.cycle(5), 2, [v, [0.6, 0.8]])
    st_ = step(s.arena, 2)
    assert distance(unshift(apply_step(s, st_), st_), s) < 1e-12


def test_apply_coin_and_mismatch():
    s = product_state(LINE, 0, [[1, 0], [1, 0]])
    out = apply_coin(s, 2, CoinOp.x())
    assert out[(0, 0, 1)] == 1
    with pytest.raises(SpaceMismatchError):
        apply_step(s, step(GraphSpec.cycle(4), 1))
    with pytest.raises(SpaceMismatchError):
        apply_coin(s, 1, CoinOp.identity(3))
