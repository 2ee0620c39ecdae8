import numpy as np
import pytest

from multicat.errors import PhaseGateNotInGroup, SpaceMismatch
from multicat.fock import FockOperator, FockSpace
from multicat.gates import (
    crot_logical,
    crot_logical_contracted,
    logical_gate_matrix,
    phase_aligned_deviation,
    single_qubit_gate,
    verify_cp_omega,
)
from multicat.gaussian import lift
from multicat.groups import Z


def test_identity_gate(small_pauli):
    L, leak = logical_gate_matrix(small_pauli, FockOperator.identity(small_pauli.space))
    assert np.allclose(L, np.eye(2))
    assert leak < 1e-9


def test_z_gate(small_pauli):
    L, _ = logical_gate_matrix(small_pauli, lift(Z, small_pauli.space).fock_rep)
    assert phase_aligned_deviation(L, np.diag([1, -1])) < 1e-9


@pytest.mark.parametrize("gate", ["X", "Z", "H", "S"])
def test_clifford_single_qubit(small_clifford, gate):
    r = single_qubit_gate(small_clifford, gate)
    assert r["deviation"] < 1e-9 and r["leakage"] < 1e-9


def test_gate_not_in_group(small_pauli):
    with pytest.raises(PhaseGateNotInGroup):
        single_qubit_gate(small_pauli, "H")


def test_cz_pauli(small_pauli):
    r = verify_cp_omega(small_pauli, 2)
    assert r["pass"]
    assert r["leakage"] < 1e-7


@pytest.mark.parametrize("m,target", [(2, np.diag([1, 1, 1, -1])), (4, np.diag([1, 1, 1, 1j]))])
def test_clifford_controlled_phases(small_clifford, m, target):
    r = verify_cp_omega(small_clifford, m)
    assert r["deviation"] < 1e-6 and r["leakage"] < 1e-7
    assert phase_aligned_deviation(r["matrix"], target) < 1e-6


def test_pauli_refuses_cs(small_pauli):
    with pytest.raises(PhaseGateNotInGroup):
        verify_cp_omega(small_pauli, 4)


def test_contraction_cross_check(small_pauli):
    L, _ = crot_logical(small_pauli, 2)
    assert np.max(np.abs(L - crot_logical_contracted(small_pauli, 2))) < 1e-12


def test_space_mismatch(small_pauli):
    with pytest.raises(SpaceMismatch):
        logical_gate_matrix(small_pauli, FockOperator.identity(FockSpace(2, 3)))
