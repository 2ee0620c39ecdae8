"""Truncated multimode Fock space: states, coherent and cat states, operators.

The basis of an ``m``-mode space with per-mode cutoff ``N`` is the set of
occupation tuples ``(n_1, ..., n_m)`` with ``0 <= n_i <= N``, ordered
row-major (the last mode varies fastest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import CutoffTooSmall, DegenerateState, SpaceMismatch

DEGENERATE_NORM = 1e-12


def cutoff_rule(amplitude: float) -> int:
    """Smallest per-mode cutoff admitted for a coherent amplitude of this modulus."""
    a = abs(amplitude)
    return max(1, math.ceil(a * a + 8 * a + 12 - 1e-12))


def default_cutoff(*amplitudes) -> int:
    return cutoff_rule(max((abs(a) for a in amplitudes), default=0.0))


@dataclass(frozen=True)
class FockSpace:
    modes: int
    cutoff: int

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("need at least one mode")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")

    @property
    def levels(self) -> int:
        return self.cutoff + 1

    @property
    def shape(self) -> tuple:
        return (self.levels,) * self.modes

    @property
    def dim(self) -> int:
        return self.levels**self.modes

    @cached_property
    def occupations(self) -> np.ndarray:
        """Array of shape (dim, modes) listing the occupation tuple of each basis index."""
        grids = np.indices(self.shape).reshape(self.modes, -1)
        return grids.T.copy()

    @cached_property
    def total(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    def index(self, occupation: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(occupation), self.shape))

    def basis(self, occupation: Sequence[int]) -> "FockStateVector":
        amps = np.zeros(self.dim, dtype=complex)
        amps[self.index(occupation)] = 1
        return FockStateVector(self, amps)

    def cutoff_shell(self) -> np.ndarray:
        """Boolean mask of basis states with some mode at the cutoff."""
        return np.any(self.occupations == self.cutoff, axis=1)


@dataclass(frozen=True, eq=False)
class FockStateVector:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.space.dim:
            raise SpaceMismatch(f"{amps.shape[0]} amplitudes for a space of dim {self.space.dim}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockStateVector":
        if self.norm < DEGENERATE_NORM:
            raise DegenerateState(f"cannot normalize a state of norm {self.norm:.3e}")
        return FockStateVector(self.space, self.amplitudes / self.norm)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per mode."""
        return self.amplitudes.reshape(self.space.shape)

    def shell_probability(self) -> float:
        """Probability weight on the cutoff shell (truncation health)."""
        mask = self.space.cutoff_shell()
        return float(np.sum(np.abs(self.amplitudes[mask]) ** 2) / max(self.norm**2, 1e-300))

    def _check(self, other):
        if not isinstance(other, FockStateVector):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FockStateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other):
        other = self._check(other)
        return FockStateVector(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar):
        return FockStateVector(self.space, self.amplitudes * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return FockStateVector(self.space, self.amplitudes / scalar)

    def __neg__(self):
        return FockStateVector(self.space, -self.amplitudes)


def _coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = np.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * alpha / np.sqrt(n)
    return c / np.linalg.norm(c)


def _outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = vectors[0]
    for v in vectors[1:]:
        out = np.multiply.outer(out, v)
    return out.reshape(-1)


def _check_cutoff(alpha: complex, cutoff: int):
    a = abs(alpha)
    if a * a + 8 * a + 12 > cutoff + 1e-9:
        raise CutoffTooSmall(
            f"|alpha|={a:.4g} needs cutoff >= {cutoff_rule(a)}, got {cutoff}"
        )


def coherent(space: FockSpace, mode_amplitudes) -> FockStateVector:
    """Normalized truncated product coherent state ``|alpha_1, ..., alpha_m>``."""
    amps = np.atleast_1d(np.asarray(mode_amplitudes, dtype=complex))
    if amps.shape != (space.modes,):
        raise SpaceMismatch(f"expected {space.modes} amplitudes, got {amps.shape}")
    for a in amps:
        _check_cutoff(a, space.cutoff)
    return FockStateVector(space, _outer([_coherent_amplitudes(a, space.cutoff) for a in amps]))


def _single_mode_embed(space: FockSpace, mode: int, vec: np.ndarray) -> FockStateVector:
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode {mode} out of range for {space.modes} modes")
    vac = np.zeros(space.levels, dtype=complex)
    vac[0] = 1
    parts = [vec if k == mode else vac for k in range(space.modes)]
    return FockStateVector(space, _outer(parts))


def _cat(space, mode, amplitude, k, components, normalize):
    _check_cutoff(amplitude, space.cutoff)
    root = np.exp(2j * np.pi / components)
    vec = np.zeros(space.levels, dtype=complex)
    for l in range(components):
        vec += root ** (-k * l) * _coherent_amplitudes(amplitude * root**l, space.cutoff)
    n = np.arange(space.levels)
    vec[(n - k) % components != 0] = 0
    norm = np.linalg.norm(vec)
    if norm < DEGENERATE_NORM:
        raise DegenerateState(f"cat state with amplitude {amplitude} and index {k} vanishes")
    if normalize:
        vec = vec / norm
    return _single_mode_embed(space, mode, vec)


def cat2(space: FockSpace, alpha: complex, k: int, mode: int = 0, normalize: bool = True) -> FockStateVector:
    """Two-component cat ``|alpha> + (-1)^k |-alpha>`` on one mode (others in vacuum).

    Only Fock states ``n = k (mod 2)`` carry amplitude; the others are set
    to exactly zero.
    """
    if k not in (0, 1):
        raise ValueError("parity k must be 0 or 1")
    return _cat(space, mode, complex(alpha), k, 2, normalize)


def cat4(space: FockSpace, gamma: complex, k: int, mode: int = 0, normalize: bool = True) -> FockStateVector:
    """Four-component cat ``sum_l (-i)^(k l) |i^l gamma>``, supported on ``n = k (mod 4)``."""
    if k not in (0, 1, 2, 3):
        raise ValueError("k must be in 0..3")
    return _cat(space, mode, complex(gamma), k, 4, normalize)


def tensor(*states: FockStateVector) -> FockStateVector:
    """Tensor product; the result has ``sum(modes)`` modes and a common cutoff."""
    cutoffs = {s.space.cutoff for s in states}
    if len(cutoffs) != 1:
        raise SpaceMismatch("tensor factors must share one cutoff")
    space = FockSpace(sum(s.space.modes for s in states), cutoffs.pop())
    return FockStateVector(space, _outer([s.amplitudes for s in states]))


def inner(x: FockStateVector, y: FockStateVector) -> complex:
    """``<x|y>``, antilinear in ``x``."""
    if x.space != y.space:
        raise SpaceMismatch(f"{x.space} vs {y.space}")
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def fidelity(x: FockStateVector, y: FockStateVector) -> float:
    """``|<x|y>|^2 / (<x|x><y|y>)``."""
    return abs(inner(x, y)) ** 2 / (x.norm**2 * y.norm**2)


class FockOperator:
    """Linear operator on a :class:`FockSpace`.

    Storage is one of

    * ``dense``: full ``dim x dim`` matrix,
    * ``diag``: diagonal vector,
    * ``kron``: one ``levels x levels`` matrix per mode (``None`` for identity),
    * ``blocks``: list of ``(indices, matrix)`` pairs, acting as zero outside
      the listed indices.

    Only ``dense`` materializes a full matrix; ``matrix`` builds one on demand.
    """

    def __init__(self, space: FockSpace, *, dense=None, diag=None, factors=None, blocks=None):
        given = [x is not None for x in (dense, diag, factors, blocks)]
        if sum(given) != 1:
            raise ValueError("give exactly one storage form")
        self.space = space
        self.dense = None if dense is None else np.asarray(dense, dtype=complex)
        self.diag = None if diag is None else np.asarray(diag, dtype=complex)
        self.factors = None if factors is None else list(factors)
        self.blocks = None if blocks is None else list(blocks)
        if self.dense is not None and self.dense.shape != (space.dim, space.dim):
            raise SpaceMismatch("dense matrix shape does not match the space")
        if self.factors is not None and len(self.factors) != space.modes:
            raise SpaceMismatch("need one factor per mode")

    @property
    def kind(self) -> str:
        for name in ("dense", "diag", "factors", "blocks"):
            if getattr(self, name) is not None:
                return "kron" if name == "factors" else name
        raise AssertionError

    @classmethod
    def identity(cls, space: FockSpace) -> "FockOperator":
        return cls(space, diag=np.ones(space.dim))

    def apply(self, state: FockStateVector) -> FockStateVector:
        if state.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {state.space}")
        return FockStateVector(self.space, self.apply_array(state.amplitudes))

    def apply_array(self, vec: np.ndarray) -> np.ndarray:
        if self.dense is not None:
            return self.dense @ vec
        if self.diag is not None:
            return self.diag * vec
        if self.factors is not None:
            t = vec.reshape(self.space.shape)
            for m, f in enumerate(self.factors):
                if f is not None:
                    t = np.moveaxis(np.tensordot(f, t, axes=([1], [m])), 0, m)
            return t.reshape(-1)
        out = np.zeros(self.space.dim, dtype=complex)
        for idx, mat in self.blocks:
            out[idx] = mat @ vec[idx]
        return out

    @property
    def matrix(self) -> np.ndarray:
        if self.dense is not None:
            return self.dense
        if self.diag is not None:
            return np.diag(self.diag)
        if self.factors is not None:
            out = np.ones((1, 1), dtype=complex)
            for f in self.factors:
                out = np.kron(out, np.eye(self.space.levels) if f is None else f)
            return out
        out = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        for idx, mat in self.blocks:
            out[np.ix_(idx, idx)] = mat
        return out

    def dagger(self) -> "FockOperator":
        if self.dense is not None:
            return FockOperator(self.space, dense=self.dense.conj().T)
        if self.diag is not None:
            return FockOperator(self.space, diag=self.diag.conj())
        if self.factors is not None:
            return FockOperator(
                self.space, factors=[None if f is None else f.conj().T for f in self.factors]
            )
        return FockOperator(self.space, blocks=[(i, m.conj().T) for i, m in self.blocks])

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if not isinstance(other, FockOperator):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")
        if self.diag is not None and other.diag is not None:
            return FockOperator(self.space, diag=self.diag * other.diag)
        if self.factors is not None and other.factors is not None:
            prod = []
            for f, g in zip(self.factors, other.factors):
                if f is None:
                    prod.append(g)
                elif g is None:
                    prod.append(f)
                else:
                    prod.append(f @ g)
            return FockOperator(self.space, factors=prod)
        if self.blocks is not None and other.blocks is not None and _same_blocks(self, other):
            return FockOperator(
                self.space, blocks=[(i, a @ b) for (i, a), (_, b) in zip(self.blocks, other.blocks)]
            )
        return FockOperator(self.space, dense=self.matrix @ other.matrix)

    def __mul__(self, scalar) -> "FockOperator":
        if self.dense is not None:
            return FockOperator(self.space, dense=self.dense * scalar)
        if self.diag is not None:
            return FockOperator(self.space, diag=self.diag * scalar)
        if self.factors is not None:
            facs = list(self.factors)
            first = facs[0] if facs[0] is not None else np.eye(self.space.levels)
            facs[0] = first * scalar
            return FockOperator(self.space, factors=facs)
        return FockOperator(self.space, blocks=[(i, m * scalar) for i, m in self.blocks])

    __rmul__ = __mul__

    def __add__(self, other: "FockOperator") -> "FockOperator":
        if not isinstance(other, FockOperator):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space} vs {other.space}")
        if self.diag is not None and other.diag is not None:
            return FockOperator(self.space, diag=self.diag + other.diag)
        if self.blocks is not None and other.blocks is not None and _same_blocks(self, other):
            return FockOperator(
                self.space, blocks=[(i, a + b) for (i, a), (_, b) in zip(self.blocks, other.blocks)]
            )
        return FockOperator(self.space, dense=self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self + other * -1


def _same_blocks(a: FockOperator, b: FockOperator) -> bool:
    if len(a.blocks) != len(b.blocks):
        return False
    return all(np.array_equal(i, j) for (i, _), (j, _) in zip(a.blocks, b.blocks))


def _single_mode(space: FockSpace, mode: int, mat: np.ndarray) -> FockOperator:
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode {mode} out of range for {space.modes} modes")
    facs = [None] * space.modes
    facs[mode] = mat
    return FockOperator(space, factors=facs)


def annihilation_matrix(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)


def annihilation(space: FockSpace, mode: int) -> FockOperator:
    return _single_mode(space, mode, annihilation_matrix(space.levels))


def creation(space: FockSpace, mode: int) -> FockOperator:
    return _single_mode(space, mode, annihilation_matrix(space.levels).T.copy())


def number_op(space: FockSpace, mode: int) -> FockOperator:
    if not 0 <= mode < space.modes:
        raise ValueError(f"mode {mode} out of range for {space.modes} modes")
    return FockOperator(space, diag=space.occupations[:, mode].astype(complex))


def diagonal_phase(space: FockSpace, f: Callable) -> FockOperator:
    """``diag(f(n_1, ..., n_m))``; ``f`` receives one integer array per mode."""
    occ = space.occupations
    vals = np.broadcast_to(np.asarray(f(*occ.T), dtype=complex), (space.dim,))
    return FockOperator(space, diag=vals.copy())


def apply(op: FockOperator, state: FockStateVector) -> FockStateVector:
    """Apply ``op`` to ``state`` without renormalizing."""
    return op.apply(state)
