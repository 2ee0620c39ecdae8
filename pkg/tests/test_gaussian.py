import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicat.errors import DimensionMismatch, InvalidModePair, NonUnitaryGenerator
from multicat.fock import FockSpace, coherent
from multicat.gaussian import (
    crot,
    crot_coherent_expansion,
    homomorphism_check,
    lift,
    symmetric_power_blocks,
)
from multicat.groups import H, I2, S, X, builtin_group, close_group

SP = FockSpace(2, 21)


def test_identity_lift():
    L = lift(I2, FockSpace(2, 6))
    assert np.allclose(L.fock_rep.matrix, np.eye(49))
    assert L.exact_sectors.all()


def test_swap():
    a, b = 0.7 + 0.2j, -0.4j
    out = lift(X, SP).apply(coherent(SP, [a, b]))
    assert np.allclose(out.amplitudes, coherent(SP, [b, a]).amplitudes, atol=1e-12)


def test_phase_gate_on_coherent():
    a, b = 1.0, 0.5 + 0.5j
    out = lift(S, SP).apply(coherent(SP, [a, b]))
    assert np.allclose(out.amplitudes, coherent(SP, [a, 1j * b]).amplitudes, atol=1e-12)


def test_hadamard_on_coherent():
    # |U alpha> convention, exact in the fully retained sectors
    a, b = 0.6, 0.3j
    sp = FockSpace(2, 30)
    out = lift(H, sp).apply(coherent(sp, [a, b]))
    ref = coherent(sp, H @ np.array([a, b]))
    assert np.linalg.norm(out.amplitudes - ref.amplitudes) < 1e-10


def test_single_photon_block_is_u():
    u = H @ S
    blocks = list(symmetric_power_blocks(u, 1))
    # basis of sector 1 is ((0, 1), (1, 0)); a_i^dag -> sum_j u[j, i] a_j^dag
    assert np.allclose(blocks[1][2], u[::-1, ::-1])


def test_dimension_and_unitarity_checks():
    with pytest.raises(DimensionMismatch):
        lift(np.eye(3), SP)
    with pytest.raises(NonUnitaryGenerator):
        lift(np.array([[1, 1], [0, 1]]), SP)


def test_truncated_sectors_flagged():
    sp = FockSpace(2, 5)
    L = lift(H, sp)
    assert L.exact_sectors[:6].all()
    assert not L.exact_sectors[6:].any()
    # monomial unitaries stay exact everywhere
    assert lift(X, sp).exact_sectors.all()
    assert lift(S, sp).exact_sectors.all()


@pytest.mark.parametrize("name", ["pauli8", "clifford96"])
def test_homomorphism(name):
    assert homomorphism_check(builtin_group(name), FockSpace(2, 20)) < 1e-9


def test_homomorphism_trivial():
    assert homomorphism_check(close_group([I2]), FockSpace(2, 5)) == 0


def test_crot_trivial_root_and_phase():
    sp = FockSpace(2, 15)
    v = coherent(sp, [0.3, 0.1j]).amplitudes
    assert np.allclose(crot(sp, 0, 1, 1).apply_array(v), v)
    state = sp.basis((1, 3))
    out = crot(sp, 0, 1, 4).apply(state)
    assert out.amplitudes[sp.index((1, 3))] == pytest.approx(-1j)


def test_crot_cat_expansion():
    a, b = 1.2, 0.8j
    sp = FockSpace(2, 25)
    lhs = crot(sp, 0, 1, 2).apply(coherent(sp, [a, b]))
    rhs = crot_coherent_expansion(sp, a, b, 2)
    assert np.linalg.norm(lhs.amplitudes - rhs.amplitudes) < 1e-10


def test_crot_invalid_modes():
    with pytest.raises(InvalidModePair):
        crot(SP, 1, 1, 2)
    with pytest.raises(InvalidModePair):
        crot(SP, 0, 2, 2)


angle = st.floats(0, 2 * np.pi, allow_nan=False)


@settings(max_examples=20, deadline=None)
@given(angle, angle, angle)
def test_random_beamsplitter_is_unitary_and_covariant(t, p, q):
    u = np.array([[np.cos(t), -np.exp(-1j * p) * np.sin(t)], [np.exp(1j * p) * np.sin(t), np.cos(t)]])
    u = u @ np.diag([1, np.exp(1j * q)])
    sp = FockSpace(2, 24)
    L = lift(u, sp)
    assert max(L.block_unitarity()[: sp.cutoff + 1]) < 1e-10
    a = np.array([0.5, -0.3 + 0.2j])
    out = L.apply(coherent(sp, a))
    assert np.linalg.norm(out.amplitudes - coherent(sp, u @ a).amplitudes) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.integers(0, 4), st.integers(0, 4))
def test_crot_diagonal_phase(m, n1, n2):
    sp = FockSpace(2, 4)
    out = crot(sp, 1, 0, m).apply(sp.basis((n1, n2)))
    assert out.amplitudes[sp.index((n1, n2))] == pytest.approx(np.exp(2j * np.pi * n1 * n2 / m))
