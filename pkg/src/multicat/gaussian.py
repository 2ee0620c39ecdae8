"""Passive linear-optical unitaries on a truncated Fock space, and CROT.

``lift(U)`` is the Fock representation of a mode-space unitary ``U`` with
the convention ``lift(U)|alpha> = |U alpha>`` for coherent states, i.e.
``a_i^dag -> sum_j U[j, i] a_j^dag``. Each total-photon-number sector is
the symmetric tensor power of ``U``; it is built column by column by
applying rotated creation operators, which keeps every step a bounded
linear map and avoids the cancellation of a closed-form binomial sum.

Sectors with total photon number above the per-mode cutoff are only
partially retained. There the lift is the compression of the exact
operator onto the retained states, which is unitary only when ``U`` is
monomial (a permuted diagonal).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, InvalidModePair, SpaceMismatch
from .fock import FockOperator, FockSpace, FockStateVector
from .groups import FiniteUnitaryGroup, check_unitary

UNITARY_BLOCK_TOL = 1e-10


@lru_cache(maxsize=None)
def _compositions(n: int, modes: int) -> tuple:
    """All occupation tuples of ``modes`` modes with total ``n``, lexicographic."""
    if modes == 1:
        return ((n,),)
    out = []
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, modes - 1):
            out.append((first,) + rest)
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _sector_tables(n: int, modes: int):
    """Creation matrices from sector ``n-1`` into sector ``n`` and column recipes."""
    basis = _compositions(n, modes)
    prev_basis = _compositions(n - 1, modes)
    pos = {s: k for k, s in enumerate(basis)}
    prev_pos = {s: k for k, s in enumerate(prev_basis)}
    create = np.zeros((modes, len(basis), len(prev_basis)))
    for t, k in prev_pos.items():
        for j in range(modes):
            up = list(t)
            up[j] += 1
            create[j, pos[tuple(up)], k] = np.sqrt(t[j] + 1)
    # Each column s is reached from s - e_i, i = first occupied mode.
    recipes = []
    for i in range(modes):
        cols, parents, scale = [], [], []
        for c, s in enumerate(basis):
            first = next(k for k, v in enumerate(s) if v > 0)
            if first != i:
                continue
            parent = list(s)
            parent[i] -= 1
            cols.append(c)
            parents.append(prev_pos[tuple(parent)])
            scale.append(1 / np.sqrt(s[i]))
        recipes.append((np.array(cols, dtype=np.intp), np.array(parents, dtype=np.intp), np.array(scale)))
    return basis, create, recipes


def symmetric_power_blocks(u: np.ndarray, max_total: int):
    """Yield ``(n, basis, block)`` for each total photon number up to ``max_total``.

    ``block[r, c] = <basis[r]| lift(u) |basis[c]>`` over the complete
    (untruncated) sector of total photon number ``n``.
    """
    m = u.shape[0]
    prev = np.ones((1, 1), dtype=complex)
    yield 0, _compositions(0, m), prev
    for n in range(1, max_total + 1):
        basis, create, recipes = _sector_tables(n, m)
        block = np.empty((len(basis), len(basis)), dtype=complex)
        for i, (cols, parents, scale) in enumerate(recipes):
            if len(cols) == 0:
                continue
            rotated = np.tensordot(u[:, i], create, axes=(0, 0))
            block[:, cols] = (rotated @ prev[:, parents]) * scale
        yield n, basis, block
        prev = block


@dataclass(frozen=True, eq=False)
class PassiveUnitary:
    """Fock representation of a passive (linear-optical) unitary.

    Attributes
    ----------
    base : ndarray
        Mode-space unitary ``U``.
    fock_rep : FockOperator
        Block-diagonal operator, one block per total photon number.
    exact_sectors : ndarray of bool
        ``exact_sectors[n]`` is True when sector ``n`` is fully retained or
        the compression is still unitary on it.
    """

    base: np.ndarray
    fock_rep: FockOperator
    exact_sectors: np.ndarray

    @property
    def space(self) -> FockSpace:
        return self.fock_rep.space

    def apply(self, state: FockStateVector) -> FockStateVector:
        return self.fock_rep.apply(state)

    def block_unitarity(self) -> np.ndarray:
        """Max-entry deviation of ``B^dag B`` from identity per sector."""
        out = []
        for _, mat in self.fock_rep.blocks:
            out.append(np.max(np.abs(mat.conj().T @ mat - np.eye(len(mat)))))
        return np.array(out)


def lift(u, space: FockSpace) -> PassiveUnitary:
    u = check_unitary(u)
    if u.shape[0] != space.modes:
        raise DimensionMismatch(f"{u.shape[0]}x{u.shape[0]} unitary on {space.modes} modes")
    occ_index = {tuple(o): k for k, o in enumerate(space.occupations.tolist())}
    blocks = []
    exact = []
    max_total = space.modes * space.cutoff
    for n, basis, block in symmetric_power_blocks(u, max_total):
        keep = [k for k, s in enumerate(basis) if max(s) <= space.cutoff]
        idx = np.array([occ_index[basis[k]] for k in keep], dtype=np.intp)
        sub = block[np.ix_(keep, keep)] if len(keep) < len(basis) else block
        blocks.append((idx, sub))
        ok = len(keep) == len(basis) or (
            np.max(np.abs(sub.conj().T @ sub - np.eye(len(keep)))) < UNITARY_BLOCK_TOL
        )
        exact.append(bool(ok))
    return PassiveUnitary(u, FockOperator(space, blocks=blocks), np.array(exact))


def exact_sector_mask(lifts) -> np.ndarray:
    """Sectors on which every given lift is exactly unitary."""
    mask = None
    for p in lifts:
        mask = p.exact_sectors.copy() if mask is None else mask & p.exact_sectors
    return mask


def homomorphism_check(group: FiniteUnitaryGroup, space: FockSpace) -> float:
    """Max entrywise ``|lift(gh) - lift(g) lift(h)|`` over generator pairs.

    Evaluated on the sectors where the lifts are exact (see module notes).
    """
    gens = [group.elements[k] for k in group.generators]
    if not gens:
        return 0.0
    lifted = {k: lift(group.elements[k], space) for k in group.generators}
    worst = 0.0
    for a in group.generators:
        for b in group.generators:
            prod = lift(group.elements[a] @ group.elements[b], space)
            mask = exact_sector_mask([lifted[a], lifted[b], prod])
            for n, ((_, pa), (_, pb), (_, pab)) in enumerate(
                zip(lifted[a].fock_rep.blocks, lifted[b].fock_rep.blocks, prod.fock_rep.blocks)
            ):
                if mask[n] and len(pab):
                    worst = max(worst, float(np.max(np.abs(pab - pa @ pb))))
    return worst


class Crot:
    """Controlled rotation ``omega^(n_i n_j)`` with ``omega = exp(2 pi i / m_root)``.

    Applied lazily as a diagonal phase on state vectors; never materialized.
    """

    def __init__(self, space: FockSpace, mode_i: int, mode_j: int, m_root: int):
        if mode_i == mode_j or not (0 <= mode_i < space.modes and 0 <= mode_j < space.modes):
            raise InvalidModePair(f"modes ({mode_i}, {mode_j}) on a {space.modes}-mode space")
        if m_root < 1:
            raise ValueError("m_root must be >= 1")
        self.space = space
        self.modes = (mode_i, mode_j)
        self.m_root = m_root
        self.omega = np.exp(2j * np.pi / m_root)

    def phases(self) -> np.ndarray:
        n = np.arange(self.space.levels)
        exponent = np.multiply.outer(n, n) % self.m_root
        table = np.exp(2j * np.pi * exponent / self.m_root)
        shape = [1] * self.space.modes
        i, j = self.modes
        shape[i] = shape[j] = self.space.levels
        if i < j:
            return table.reshape(shape)
        return table.T.reshape(shape)

    def apply_array(self, vec: np.ndarray) -> np.ndarray:
        t = vec.reshape(self.space.shape) * self.phases()
        return t.reshape(-1)

    def apply(self, state: FockStateVector) -> FockStateVector:
        if state.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {state.space}")
        return FockStateVector(self.space, self.apply_array(state.amplitudes))


def crot(space: FockSpace, mode_i: int, mode_j: int, m_root: int) -> Crot:
    return Crot(space, mode_i, mode_j, m_root)


def crot_coherent_expansion(space: FockSpace, alpha: complex, beta: complex, m_root: int) -> FockStateVector:
    """``(1/m) sum_{p,q} omega^(-pq) |omega^p alpha>|omega^q beta>`` on a two-mode space."""
    from .fock import coherent

    omega = np.exp(2j * np.pi / m_root)
    out = np.zeros(space.dim, dtype=complex)
    for p, q in itertools.product(range(m_root), repeat=2):
        out += omega ** (-p * q) * coherent(space, [omega**p * alpha, omega**q * beta]).amplitudes
    return FockStateVector(space, out / m_root)
