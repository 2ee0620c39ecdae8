import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicat.errors import ClosureOverflow, NonUnitaryGenerator, UnknownGroupName
from multicat.groups import (
    BUILTIN_NAMES,
    H,
    I2,
    S,
    X,
    Z,
    FiniteUnitaryGroup,
    builtin_group,
    close_group,
    design_residual,
    frame_potential,
    is_unitary_1_design,
    phase_gate,
)

# Frozen orders. <H, S> has centre {exp(i pi k/4)}: 24 * 8 = 192.
ORDERS = {"pauli8": 8, "pauli_ixiz": 8, "pauli16": 16, "clifford96": 192}


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_orders(name):
    assert builtin_group(name).order == ORDERS[name]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_structure(name):
    res = builtin_group(name).structure_residuals()
    assert all(v < 1e-9 for v in res.values()), res


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtins_are_designs(name):
    g = builtin_group(name)
    ok, resid = is_unitary_1_design(g)
    assert ok and resid < 1e-9
    assert abs(frame_potential(g) - 1) < 1e-9


def test_membership_facts():
    assert builtin_group("pauli8").contains(-I2)
    assert builtin_group("pauli16").contains(1j * I2)
    assert builtin_group("clifford96").contains(S)
    assert not builtin_group("pauli8").contains(S)
    assert not builtin_group("pauli_ixiz").contains(X)
    cl = builtin_group("clifford96")
    assert cl.contains(np.exp(1j * np.pi / 4) * I2)


def test_basis_is_identity_then_x():
    b = builtin_group("pauli8").basis_states()
    assert np.allclose(b, np.eye(2))


@pytest.mark.parametrize("gens,expected", [([I2], 1.0), ([Z], 0.5)])
def test_non_designs(gens, expected):
    g = close_group(gens)
    ok, resid = is_unitary_1_design(g)
    assert not ok
    assert resid >= 0.4
    assert resid == pytest.approx(expected)
    assert abs(frame_potential(g) - 1) > 1e-9


def test_closure_overflow():
    with pytest.raises(ClosureOverflow):
        close_group([H, S], max_order=50)


def test_non_unitary_generator():
    with pytest.raises(NonUnitaryGenerator):
        close_group([np.array([[1, 1], [0, 1]])])


def test_unknown_name():
    with pytest.raises(UnknownGroupName):
        builtin_group("clifford48")


def test_roundtrip_dict():
    g = builtin_group("pauli16")
    h = FiniteUnitaryGroup.from_dict(json.loads(json.dumps(g.to_dict())))
    assert h.order == g.order
    assert np.allclose(h.elements, g.elements)
    assert h.basis_elements == g.basis_elements


def test_phase_gate_membership():
    cl = builtin_group("clifford96")
    assert cl.contains(phase_gate(1j))
    assert cl.contains(phase_gate(-1))
    assert not cl.contains(phase_gate(np.exp(1j * np.pi / 4)))


angles = st.floats(0, 2 * np.pi, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(angles, angles, angles)
def test_conjugated_pauli_still_design(a, b, c):
    # V G V^dag is a 1-design whenever G is
    u = (
        np.array([[np.exp(1j * a), 0], [0, 1]])
        @ np.array([[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]])
        @ np.array([[1, 0], [0, np.exp(1j * c)]])
    )
    g = close_group([u @ X @ u.conj().T, u @ Z @ u.conj().T])
    assert g.order == 8
    assert design_residual(g) < 1e-9
    assert abs(frame_potential(g) - 1) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12))
def test_cyclic_groups_are_not_designs(n):
    g = close_group([phase_gate(np.exp(2j * np.pi / n))])
    assert g.order == n
    ok, _ = is_unitary_1_design(g)
    assert not ok
    assert (abs(frame_potential(g) - 1) < 1e-9) == ok
