import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocoin import oracle
from twocoin.errors import InfeasibleError, SizeError
from twocoin.hilbert import GraphSpec, make_state, product_state, random_vector
from twocoin.operators import CoinOp, apply_steps, coin_matrix, step
from twocoin.transfer import build_schedule, plan_complete, plan_cycle, plan_line, plan_regular
from twocoin.verify import random_unitary, sparse_dense_gap

from conftest import qubits


def test_coin_matrices_agree_with_engine():
    # the oracle builds its own matrices; they must match the engine's
    for op in (CoinOp.x(), CoinOp.shift(5, 2), CoinOp.shift_inv(3), CoinOp.fourier(4), CoinOp.clock(3, 2)):
        assert np.allclose(oracle._coin(op), coin_matrix(op), atol=1e-14)


@given(qubits())
def test_dense_matches_sparse_line(v):
    assert sparse_dense_gap(plan_line(2), v) < 1e-12


def test_complete_final_on_target():
    plan = plan_complete(3, 2)
    sysm = oracle.build_system(plan)
    final = sysm.state(oracle.dense_evolve(plan, [0.6, 0.8, 0], system=sysm))
    assert final.positions() == [2]


def test_step_matrices_unitary(rng):
    plan = plan_cycle(6, 3, 3)
    for m in oracle.build_system(plan).step_matrices:
        assert np.allclose(m.conj().T @ m, np.eye(len(m)), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_custom_coin_norm_preserved(seed):
    rng = np.random.default_rng(seed)
    arena = GraphSpec.complete(3)
    steps = (step(arena, 1, CoinOp.custom(random_unitary(3, rng))), step(arena, 2))

    class Plan:
        pass

    p = Plan()
    p.arena, p.steps, p.coin_dims, p.coin2_init = arena, steps, (3, 3), np.array([1, 0, 0], complex)
    v = oracle.dense_evolve(p, random_vector(3, rng))
    assert oracle.norm_error(v) < 1e-12


def test_recovery_case_line_even():
    a, b = 0.6, 0.8j
    plan = plan_line(2)
    final = apply_steps(product_state(plan.arena, 0, [[a, b], [1, 0]]), plan.steps)
    u1, u2 = oracle.solve_recovery(final, [a, b], [1, 0])
    assert (u1.name, u2.name) == ("X", "I")


def test_recovery_already_correct():
    s = product_state(GraphSpec.line(), 4, [[0.6, 0.8], [1, 0]])
    u1, u2 = oracle.solve_recovery(s, [0.6, 0.8], [1, 0])
    assert u1.is_identity and u2.is_identity


def test_recovery_general_unitary():
    s = product_state(GraphSpec.line(), 0, [[0.6, 0.8j], [1, 0]])
    u1, _ = oracle.solve_recovery(s, [1, 0], [1, 0])
    assert abs((coin_matrix(u1) @ [0.6, 0.8j])[0]) == pytest.approx(1)


def test_recovery_needs_product():
    spread = make_state(GraphSpec.line(), [2, 2], {(0, 0, 0): 1, (2, 0, 0): 1})
    with pytest.raises(InfeasibleError):
        oracle.split_product(spread)
    bell = make_state(GraphSpec.line(), [2, 2], {(0, 0, 0): 1, (0, 1, 1): 1})
    with pytest.raises(InfeasibleError):
        oracle.split_product(bell)


def test_odd_cycle_recovery_certified():
    plan = plan_cycle(8, 3, 3)
    first, last = plan.certification[0], plan.certification[-1]
    # the tabulated d+1 length leaves the walker spread; d-1 steps certifies
    assert not first.passed and "9 steps" in first.note
    assert last.passed and plan.n_steps == 7


def test_certify_pass_and_negative_control():
    plan = plan_complete(4, 3)
    assert oracle.certify_schedule(plan).passed
    bad = plan.__class__(**{**plan.__dict__, "steps": build_schedule(plan.arena, 8, {2: CoinOp.shift(4)})})
    rec = oracle.certify_schedule(bad)
    assert not rec.passed and rec.counterexample is not None


def test_regular_feasibility_map():
    recs = {x: oracle.certify_schedule(plan_regular(7, 3, x)) for x in range(1, 7)}
    assert all(r.passed for r in recs.values())


def test_size_guard(monkeypatch):
    monkeypatch.setattr(oracle, "MAX_DIM", 10)
    with pytest.raises(SizeError):
        oracle.build_system(plan_line(3))
