import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twocoin.errors import (
    ArenaError,
    BasisError,
    ContractError,
    CoverageError,
    LabelError,
    SpaceMismatchError,
    ZeroStateError,
)
from twocoin.hilbert import (
    POSITION,
    GraphSpec,
    coin_vector,
    distance,
    fidelity_up_to_phase,
    inner_product,
    make_state,
    product_state,
    project_subsystem,
)
from twocoin.teleport import plan_teleport_complete, run_teleport

from conftest import qubits

LINE = GraphSpec.line()
S2 = 1 / math.sqrt(2)


def test_initial_line_state():
    a, b = 0.6, 0.8j
    s = make_state(LINE, [2, 2], [((0, [0, 0]), a), ((0, [1, 0]), b)])
    assert s[(0, 0, 0)] == pytest.approx(a)
    assert s[(0, 1, 0)] == pytest.approx(b)
    assert len(s) == 2


def test_cycle_basis_state():
    s = make_state(GraphSpec.cycle(4), [2, 2], [((0, [0, 0]), 1)])
    assert s.support() == [(0, 0, 0)]
    assert s.norm() == pytest.approx(1)


def test_duplicates_merge_then_normalize():
    s = make_state(LINE, [2, 2], [((0, [0, 0]), 2), ((0, [0, 0]), 0)])
    assert s[(0, 0, 0)] == 1


def test_make_state_errors():
    with pytest.raises(ZeroStateError):
        make_state(LINE, [2, 2], {(0, 0, 0): 0})
    with pytest.raises(ZeroStateError):
        make_state(LINE, [2, 2], {})
    with pytest.raises(LabelError):
        make_state(LINE, [2, 2], {(0, 2, 0): 1})
    with pytest.raises(LabelError):
        make_state(GraphSpec.cycle(4), [2, 2], {(4, 0, 0): 1})
    with pytest.raises(LabelError):
        make_state(LINE, [2, 2], {(0, 0): 1})


def test_arena_validation():
    with pytest.raises(ArenaError):
        GraphSpec.cycle(2)
    with pytest.raises(ArenaError):
        GraphSpec.circulant(3, 4)
    assert GraphSpec.circulant(9, 4).coin_dim == 4
    assert GraphSpec.complete(5).coin_dim == 5


def test_inner_products():
    u = make_state(LINE, [2, 2], {(0, 0, 0): 1})
    v = make_state(LINE, [2, 2], {(0, 1, 0): 1})
    assert inner_product(u, v) == 0
    assert inner_product(u, u) == pytest.approx(1)
    assert fidelity_up_to_phase(u, v) == 0
    with pytest.raises(SpaceMismatchError):
        inner_product(u, make_state(GraphSpec.cycle(4), [2, 2], {(0, 0, 0): 1}))


@given(qubits(), st.floats(0, 2 * math.pi))
def test_fidelity_phase_invariant(v, theta):
    u = product_state(LINE, 3, [v, [0.6, 0.8]])
    assert inner_product(u, u).real == pytest.approx(1, abs=1e-12)
    assert fidelity_up_to_phase(u, u.scaled(cmath.exp(1j * theta))) == pytest.approx(1, abs=1e-12)


def test_line_teleport_position_measurement():
    # the n=2 line-teleport state before measurement
    a, b = 0.6, 0.8j
    terms = {
        (0, 0, 1): a * 0.5, (0, 1, 0): b * 0.5,
        (-2, 1, 1): b * 0.5, (2, 0, 0): a * 0.5,
    }
    s = make_state(LINE, [2, 2], terms)
    basis = [{0: 1}, {-2: S2, 2: S2}, {-2: S2, 2: -S2}]
    outs = project_subsystem(s, POSITION, basis)
    first = outs[0]
    assert first.index == 0 and first.probability == pytest.approx(0.5)
    ref = make_state(LINE, [2, 2], {(0, 0, 1): a, (0, 1, 0): b})
    assert distance(first.state, ref) < 1e-12
    assert sum(o.probability for o in outs) == pytest.approx(1)


def test_basis_state_single_outcome():
    s = make_state(LINE, [2, 2], {(0, 1, 0): 1})
    outs = project_subsystem(s, 1, [[1, 0], [0, 1]])
    assert [(o.index, o.probability) for o in outs] == [(1, 1.0)]


def test_complete_teleport_position_outcomes():
    rep = run_teleport(plan_teleport_complete(3, 1), [0.6, 0.8, 0])
    outs = project_subsystem(rep.pre_measurement, POSITION, [{0: 1}, {1: 1}, {2: 1}])
    assert [o.probability for o in outs] == pytest.approx([1 / 3] * 3, abs=1e-12)


def test_projection_errors():
    s = make_state(LINE, [2, 2], {(0, 0, 0): 1, (1, 0, 0): 1})
    with pytest.raises(BasisError):
        project_subsystem(s, POSITION, [{0: 1}, {0: 1}])
    with pytest.raises(CoverageError):
        project_subsystem(s, POSITION, [{0: 1}])
    with pytest.raises(LabelError):
        project_subsystem(s, 3, [[1, 0]])


@settings(max_examples=50)
@given(qubits(), qubits())
def test_measurement_recombines(v1, v2):
    # post-states weighted by sqrt(p) and the basis overlap rebuild the original state
    s = make_state(GraphSpec.cycle(5), [2, 2],
                   {(0, 0, 0): v1[0], (0, 1, 0): v1[1], (3, 0, 1): v2[0], (3, 1, 1): v2[1]})
    basis = [np.array([S2, S2]), np.array([S2, -S2])]
    outs = project_subsystem(s, 1, basis)
    assert sum(o.probability for o in outs) == pytest.approx(1, abs=1e-12)
    acc: dict = {}
    for o in outs:
        for k, v in o.state.amplitudes.items():
            acc[k] = acc.get(k, 0) + math.sqrt(o.probability) * v
    rebuilt = make_state(s.arena, s.coin_dims, acc)
    assert distance(rebuilt, s) < 1e-10


def test_coin_vector():
    s = product_state(LINE, 2, [[0.6, 0.8], [S2, 1j * S2]])
    assert abs(np.vdot(coin_vector(s, 2), [S2, 1j * S2])) == pytest.approx(1)
    bell = make_state(LINE, [2, 2], {(0, 0, 0): 1, (0, 1, 1): 1})
    with pytest.raises(ContractError):
        coin_vector(bell, 1)
