"""Logical action of physical gates on a code: single-qubit lifts and CROT."""

from __future__ import annotations

import numpy as np

from .codes import BosonicCode
from .errors import PhaseGateNotInGroup, SpaceMismatch
from .fock import FockSpace, tensor
from .gaussian import crot, lift
from .groups import ELEMENT_TOL, H, I2, S, X, Z, phase_gate

NAMED_GATES = {"I": I2, "X": X, "Z": Z, "H": H, "S": S}
CP_TOL = 1e-6


def doubled_basis(code: BosonicCode) -> list:
    """``|i>|j>`` on four modes, ordered ``(0,0), (0,1), (1,0), (1,1)``."""
    return [tensor(a, b) for a in code.codewords for b in code.codewords]


def _matrix_and_leakage(basis_vecs, apply_fn):
    mat = np.array(basis_vecs)
    images = np.array([apply_fn(v) for v in basis_vecs])
    L = mat.conj() @ images.T
    leakage = float(np.max(1 - np.sum(np.abs(L) ** 2, axis=0)))
    return L, leakage


def logical_gate_matrix(code: BosonicCode, V, two_qubit: bool = False):
    """Matrix ``L[a, b] = <a|V|b>`` on the logical basis, plus leakage.

    ``V`` needs an ``apply_array`` method. With ``two_qubit=True`` it acts on
    the four-mode space holding two copies of the code.
    """
    if two_qubit:
        basis = [v.amplitudes for v in doubled_basis(code)]
        expected = FockSpace(2 * code.space.modes, code.space.cutoff)
    else:
        basis = [w.amplitudes for w in code.codewords]
        expected = code.space
    if getattr(V, "space", expected) != expected:
        raise SpaceMismatch(f"operator lives on {V.space}, code basis on {expected}")
    return _matrix_and_leakage(basis, V.apply_array)


def phase_aligned_deviation(L: np.ndarray, target: np.ndarray) -> float:
    """``min_phi max|L - e^{i phi} target|`` with ``phi`` from the Frobenius fit."""
    overlap = np.vdot(target, L)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(L - phase * target)))


def single_qubit_gate(code: BosonicCode, gate) -> dict:
    """Logical action of ``lift(g)`` for a group element ``g``."""
    g = NAMED_GATES[gate] if isinstance(gate, str) else np.asarray(gate, dtype=complex)
    if not code.group.contains(g):
        raise PhaseGateNotInGroup(f"gate {gate!r} is not an element of {code.group.name}")
    basis = code.group.basis_states()
    target = basis.conj() @ g @ basis.T
    L, leak = logical_gate_matrix(code, lift(g, code.space).fock_rep)
    dev = phase_aligned_deviation(L, target)
    return {"gate": gate if isinstance(gate, str) else "custom", "deviation": dev, "leakage": leak, "matrix": L}


def crot_logical(code: BosonicCode, m_root: int):
    """Two-qubit logical matrix of ``omega^(n_2 n_4)`` on two copies of the code."""
    space4 = FockSpace(2 * code.space.modes, code.space.cutoff)
    gate = crot(space4, code.space.modes - 1, 2 * code.space.modes - 1, m_root)
    return logical_gate_matrix(code, gate, two_qubit=True)


def crot_logical_contracted(code: BosonicCode, m_root: int) -> np.ndarray:
    """Same matrix as :func:`crot_logical` by contracting over mode occupations.

    ``<ij|W|kl> = sum_{n,n'} omega^(n n') M_ik(n) M_jl(n')`` where
    ``M_ik(n) = sum_{n1} conj(c_i(n1, n)) c_k(n1, n)``; no four-mode vector
    is formed.
    """
    words = np.array([w.tensor() for w in code.codewords])
    M = np.einsum("iab,kab->ikb", words.conj(), words)
    n = np.arange(code.space.levels)
    phase = np.exp(2j * np.pi * (np.multiply.outer(n, n) % m_root) / m_root)
    L = np.einsum("ikb,jlc,bc->ijkl", M, M, phase)
    d = code.d
    return L.reshape(d * d, d * d)


def verify_cp_omega(code: BosonicCode, m_root: int) -> dict:
    """Deviation of the CROT logical action from ``diag(1, 1, 1, omega)``.

    Raises :class:`PhaseGateNotInGroup` unless ``diag(1, omega)`` is in the group.
    """
    omega = np.exp(2j * np.pi / m_root)
    if not code.group.contains(phase_gate(omega), tol=ELEMENT_TOL):
        raise PhaseGateNotInGroup(f"diag(1, exp(2i pi/{m_root})) is not in {code.group.name}")
    L, leak = crot_logical(code, m_root)
    target = np.diag([1, 1, 1, omega])
    dev = phase_aligned_deviation(L, target)
    return {
        "gate": f"CP(2pi/{m_root})",
        "deviation": dev,
        "leakage": leak,
        "pass": bool(dev < CP_TOL),
        "matrix": L,
    }
