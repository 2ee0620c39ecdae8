"""Finite subgroups of U(d): closure, membership and the 1-design test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ClosureOverflow, MulticatError, NonUnitaryGenerator, UnknownGroupName

UNITARY_TOL = 1e-10
ELEMENT_TOL = 1e-9
DESIGN_TOL = 1e-9
DEFAULT_MAX_ORDER = 1024

_SQ = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = _SQ * np.array([[1, 1], [1, -1]], dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)

BUILTIN_NAMES = ("pauli8", "pauli_ixiz", "pauli16", "clifford96")


def unitarity_residual(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Return ``u`` as a complex square array, raising if it is not unitary."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NonUnitaryGenerator(f"expected a square matrix, got shape {u.shape}")
    res = unitarity_residual(u)
    if res >= tol:
        raise NonUnitaryGenerator(f"U^dag U deviates from identity by {res:.3e}")
    return u


@dataclass(frozen=True)
class FiniteUnitaryGroup:
    """An explicitly enumerated finite group of ``dim x dim`` unitaries.

    Attributes
    ----------
    elements : ndarray, shape (order, dim, dim)
        Group elements; ``elements[0]`` is the identity.
    generators : tuple of int
        Indices of the generating set inside ``elements``.
    basis_elements : tuple of int
        Indices of ``g_0, ..., g_{d-1}`` such that ``g_i |0>`` is an
        orthonormal basis; ``g_0`` is the identity.
    """

    dim: int
    elements: np.ndarray
    generators: tuple
    basis_elements: tuple
    name: str = "custom"
    _flat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "_flat", els.reshape(len(els), -1))

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, u, tol: float = ELEMENT_TOL) -> int | None:
        """Index of the element equal to ``u`` entrywise within ``tol``, or None."""
        flat = np.asarray(u, dtype=complex).reshape(-1)
        dev = np.max(np.abs(self._flat - flat), axis=1)
        k = int(np.argmin(dev))
        return k if dev[k] < tol else None

    def contains(self, u, tol: float = ELEMENT_TOL) -> bool:
        return self.index_of(u, tol) is not None

    def basis_states(self) -> np.ndarray:
        """Rows are the logical basis vectors ``g_i |0>``."""
        if len(self.basis_elements) != self.dim:
            raise MulticatError(f"group {self.name!r} does not map |0> onto every basis state")
        return np.array([self.elements[k][:, 0] for k in self.basis_elements])

    def structure_residuals(self) -> dict:
        """Closure, inverse and identity defects, plus basis orthonormality."""
        els = self.elements
        closure = 0.0
        for g in els:
            prods = np.einsum("ij,njk->nik", g, els).reshape(len(els), -1)
            dev = np.max(np.abs(prods[:, None, :] - self._flat[None, :, :]), axis=2)
            closure = max(closure, float(np.max(np.min(dev, axis=1))))
        inv = 0.0
        for g in els:
            ginv = g.conj().T
            dev = np.max(np.abs(self._flat - ginv.reshape(-1)), axis=1)
            inv = max(inv, float(np.min(dev)))
        ident = float(np.max(np.abs(els[0] - np.eye(self.dim))))
        if len(self.basis_elements) == self.dim:
            b = self.basis_states()
            ortho = float(np.max(np.abs(b.conj() @ b.T - np.eye(self.dim))))
        else:
            ortho = float("nan")
        return {"closure": closure, "inverse": inv, "identity": ident, "basis": ortho}

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "elements": [
                [[[float(z.real), float(z.imag)] for z in row] for row in g] for g in self.elements
            ],
            "generators": list(self.generators),
            "basis_elements": list(self.basis_elements),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteUnitaryGroup":
        arr = np.array(data["elements"], dtype=float)
        els = arr[..., 0] + 1j * arr[..., 1]
        return cls(
            dim=int(data["dim"]),
            elements=els,
            generators=tuple(data.get("generators", ())),
            basis_elements=tuple(data["basis_elements"]),
            name=data.get("name", "custom"),
        )


def _find_basis(elements: np.ndarray, dim: int) -> tuple:
    # Prefer g with g|0> = |i> exactly, then up to a phase.
    basis = [0]
    for i in range(1, dim):
        target = np.zeros(dim, dtype=complex)
        target[i] = 1
        cols = elements[:, :, 0]
        exact = np.max(np.abs(cols - target), axis=1)
        k = int(np.argmin(exact))
        if exact[k] >= ELEMENT_TOL:
            mag = np.abs(cols[:, i])
            k = int(np.argmax(mag))
            if abs(mag[k] - 1) >= ELEMENT_TOL:
                # not transitive on the basis; no logical basis from |0>
                return ()
        basis.append(k)
    return tuple(basis)


def close_group(
    generators: Sequence,
    max_order: int = DEFAULT_MAX_ORDER,
    name: str = "custom",
    basis_elements: Iterable | None = None,
) -> FiniteUnitaryGroup:
    """Enumerate the group generated by ``generators``.

    Two matrices are identified when all entries agree within 1e-9.
    Raises :class:`ClosureOverflow` once more than ``max_order`` distinct
    elements have been found.

    ``basis_elements`` may be given as matrices or indices; by default the
    first element sending ``|0>`` to ``|i>`` is used for each ``i``. It is
    left empty when no such element exists for some ``i``.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    gens = [check_unitary(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    dim = gens[0].shape[0]
    if any(g.shape != (dim, dim) for g in gens):
        raise ValueError("generators must share one dimension")

    elements = [np.eye(dim, dtype=complex)]
    flat = np.eye(dim, dtype=complex).reshape(1, -1)

    def lookup(u):
        dev = np.max(np.abs(flat - u.reshape(-1)), axis=1)
        k = int(np.argmin(dev))
        return k if dev[k] < ELEMENT_TOL else None

    gen_idx = []
    frontier = [0]
    # Seed with the generators so their indices are stable.
    for g in gens:
        k = lookup(g)
        if k is None:
            elements.append(g)
            flat = np.vstack([flat, g.reshape(1, -1)])
            k = len(elements) - 1
            frontier.append(k)
            if len(elements) > max_order:
                raise ClosureOverflow(f"group order exceeds max_order={max_order}")
        gen_idx.append(k)

    while frontier:
        nxt = []
        for k in frontier:
            for g in gens:
                prod = elements[k] @ g
                if lookup(prod) is None:
                    elements.append(prod)
                    flat = np.vstack([flat, prod.reshape(1, -1)])
                    nxt.append(len(elements) - 1)
                    if len(elements) > max_order:
                        raise ClosureOverflow(f"group order exceeds max_order={max_order}")
        frontier = nxt

    els = np.array(elements)
    if basis_elements is None:
        basis = _find_basis(els, dim)
    else:
        basis = []
        for b in basis_elements:
            if np.ndim(b) == 0:
                basis.append(int(b))
            else:
                k = lookup(np.asarray(b, dtype=complex))
                if k is None:
                    raise MulticatError("basis element is not in the group")
                basis.append(k)
        basis = tuple(basis)
        if basis[0] != 0:
            raise MulticatError("g_0 must be the identity")
    return FiniteUnitaryGroup(dim, els, tuple(gen_idx), basis, name)


def design_residual(group: FiniteUnitaryGroup) -> float:
    """Max-entry deviation of the group twirl from the swap operator over d.

    Computes ``(1/|G|) sum_g g (x) g^dag - (1/d) sum_ij |i><j| (x) |j><i|``.
    """
    d = group.dim
    els = group.elements
    avg = np.einsum("nab,ncd->acbd", els, np.conj(np.transpose(els, (0, 2, 1)))).reshape(d * d, d * d)
    avg /= len(els)
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[i * d + j, j * d + i] = 1
    return float(np.max(np.abs(avg - swap / d)))


def is_unitary_1_design(group: FiniteUnitaryGroup) -> tuple[bool, float]:
    res = design_residual(group)
    return res < DESIGN_TOL, res


def frame_potential(group: FiniteUnitaryGroup) -> float:
    """First frame potential ``(1/|G|) sum_g |tr g|^2``; equals 1 iff 1-design."""
    tr = np.trace(group.elements, axis1=1, axis2=2)
    return float(np.mean(np.abs(tr) ** 2))


def builtin_group(name: str) -> FiniteUnitaryGroup:
    if name == "pauli8":
        return close_group([X, Z], name=name, basis_elements=[I2, X])
    if name == "pauli_ixiz":
        # X is not in <iX, iZ>; XZ sends |0> to |1> with no phase.
        return close_group([1j * X, 1j * Z], name=name, basis_elements=[I2, X @ Z])
    if name == "pauli16":
        return close_group([1j * I2, X, Z], name=name, basis_elements=[I2, X])
    if name == "clifford96":
        return close_group([H, S], name=name, basis_elements=[I2, X])
    raise UnknownGroupName(f"unknown group {name!r}; choose from {', '.join(BUILTIN_NAMES)}")


def phase_gate(omega: complex) -> np.ndarray:
    return np.array([[1, 0], [0, omega]], dtype=complex)
