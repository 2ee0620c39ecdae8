"""Qubit codes from transversal representations ``g -> g^{(x) m}``, and a Haar check.

``haar_projector_estimate`` averages ``2 conj(g_00) lift(g)|m, n>`` over
Haar-random SU(2). The continuous-group version of the projector only
survives on the single-photon sector of two modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .codes import ANNIHILATION_THRESHOLD, fix_phase
from .errors import DimensionMismatch, ProjectorAnnihilatesInput
from .groups import FiniteUnitaryGroup

MAX_COPIES = 12
BATCH = 100_000


def _check(group: FiniteUnitaryGroup, m: int):
    if group.dim != 2:
        raise DimensionMismatch("transversal codes are built from qubit groups")
    if not 1 <= m <= MAX_COPIES:
        raise ValueError(f"copies must lie in [1, {MAX_COPIES}]")


def apply_transversal(g: np.ndarray, vec: np.ndarray, m: int) -> np.ndarray:
    """``g^{(x) m} vec`` without forming the ``2^m x 2^m`` matrix."""
    t = vec.reshape((2,) * m)
    for q in range(m):
        t = np.moveaxis(np.tensordot(g, t, axes=(1, q)), 0, q)
    return t.reshape(-1)


def _kron_power(g: np.ndarray, m: int) -> np.ndarray:
    out = g
    for _ in range(m - 1):
        out = np.kron(out, g)
    return out


@dataclass(frozen=True, eq=False)
class TransversalProjector:
    matrix: np.ndarray
    norm: float
    idempotence_residual: float
    copies: int

    @property
    def nonzero(self) -> bool:
        return self.norm > 1e-10


def transversal_projector(group: FiniteUnitaryGroup, m: int) -> TransversalProjector:
    """``(2/|G|) sum_g conj(g_00) g^{(x) m}`` with its Frobenius norm.

    The idempotence residual (max entry of ``P^2 - P``) is NaN when ``P`` vanishes.
    """
    P = component_projector(group, m, 0)
    norm = float(np.linalg.norm(P))
    resid = float(np.max(np.abs(P @ P - P))) if norm > 1e-10 else float("nan")
    return TransversalProjector(P, norm, resid, m)


def component_projector(group: FiniteUnitaryGroup, m: int, k: int) -> np.ndarray:
    """``(2/|G|) sum_g conj(g_k0) g^{(x) m}``; ``k = 0`` is the projector itself."""
    _check(group, m)
    weights = 2 * np.conj(group.elements[:, k, 0]) / group.order
    P = np.zeros((2**m, 2**m), dtype=complex)
    for w, g in zip(weights, group.elements):
        if abs(w) > 0:
            P += w * _kron_power(g, m)
    return P


def equivariance_residual(group: FiniteUnitaryGroup, m: int) -> float:
    """Max entry of ``h^{(x) m} P_0 - sum_k h_k0 P_k`` over the generators ``h``.

    ``P_0`` does not commute with the representation; it intertwines it
    with the components ``P_k`` in this way.
    """
    comps = [component_projector(group, m, k) for k in range(2)]
    worst = 0.0
    for idx in group.generators:
        h = group.elements[idx]
        lhs = _kron_power(h, m) @ comps[0]
        rhs = h[0, 0] * comps[0] + h[1, 0] * comps[1]
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass(frozen=True, eq=False)
class TransversalCode:
    group: FiniteUnitaryGroup
    copies: int
    codewords: np.ndarray
    seed_state: np.ndarray
    seed_label: str
    projector_norm: float

    def covariance_residual(self) -> float:
        """``max |<i|g^{(x) m}|j> - <e_i|g|e_j>|`` over all group elements."""
        basis = self.group.basis_states()
        worst = 0.0
        for g in self.group.elements:
            images = np.array([apply_transversal(g, w, self.copies) for w in self.codewords])
            phys = self.codewords.conj() @ images.T
            logical = basis.conj() @ g @ basis.T
            worst = max(worst, float(np.max(np.abs(phys - logical))))
        return worst


def _project(group: FiniteUnitaryGroup, m: int, phi: np.ndarray) -> np.ndarray:
    weights = 2 * np.conj(group.elements[:, 0, 0]) / group.order
    out = np.zeros_like(phi, dtype=complex)
    for w, g in zip(weights, group.elements):
        if abs(w) > 0:
            out += w * apply_transversal(g, phi, m)
    return out


def random_product_state(m: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    out = q[0]
    for v in q[1:]:
        out = np.kron(out, v)
    return out


def transversal_code(group: FiniteUnitaryGroup, m: int, phi=None, seed: int = 0) -> TransversalCode:
    """Codewords ``|0bar> ~ P phi`` and ``|ibar> = g_i^{(x) m}|0bar>``.

    With ``phi=None`` the seed is ``|0...0>``, replaced by a seeded random
    product state when the projector annihilates it; ``seed_label`` records
    which one was used. An explicit ``phi`` with ``P phi = 0`` raises
    :class:`ProjectorAnnihilatesInput`.
    """
    _check(group, m)
    if phi is None:
        phi = np.zeros(2**m, dtype=complex)
        phi[0] = 1
        label = "zero"
        v = _project(group, m, phi)
        if np.linalg.norm(v) <= ANNIHILATION_THRESHOLD:
            phi = random_product_state(m, seed)
            label = f"random_product(seed={seed})"
            v = _project(group, m, phi)
    else:
        phi = np.asarray(phi, dtype=complex).reshape(-1)
        if phi.size != 2**m:
            raise DimensionMismatch(f"seed has {phi.size} amplitudes, expected {2**m}")
        label = "custom"
        v = _project(group, m, phi)
    pnorm = float(np.linalg.norm(v))
    if pnorm <= ANNIHILATION_THRESHOLD:
        raise ProjectorAnnihilatesInput(f"||P phi|| = {pnorm:.3e} for {m} copies")
    zero = fix_phase(v / pnorm)
    words = np.array([apply_transversal(group.elements[k], zero, m) for k in group.basis_elements])
    return TransversalCode(group, m, words, phi, label, pnorm)


# ------------------------------------------------------------------ Haar


def haar_su2(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` Haar-random SU(2) matrices from uniform unit quaternions."""
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a = q[:, 0] + 1j * q[:, 1]
    b = q[:, 2] + 1j * q[:, 3]
    g = np.empty((n, 2, 2), dtype=complex)
    g[:, 0, 0] = a
    g[:, 0, 1] = -b.conj()
    g[:, 1, 0] = b
    g[:, 1, 1] = a.conj()
    return g


def _lifted_fock(g: np.ndarray, m: int, n: int) -> np.ndarray:
    """Amplitudes of ``lift(g)|m, n>`` on ``|k, m+n-k>``, ``k = 0..m+n``, per sample.

    ``|m, n> -> (g00 a^dag + g10 b^dag)^m (g01 a^dag + g11 b^dag)^n |0> / sqrt(m! n!)``.
    """
    total = m + n
    # coeffs[:, k] multiplies a^dag^k b^dag^(deg-k)
    coeffs = np.ones((len(g), 1), dtype=complex)
    for col, power in ((0, m), (1, n)):
        for _ in range(power):
            nxt = np.zeros((len(g), coeffs.shape[1] + 1), dtype=complex)
            nxt[:, 1:] += coeffs * g[:, 0, col, None]
            nxt[:, :-1] += coeffs * g[:, 1, col, None]
            coeffs = nxt
    k = np.arange(total + 1)
    norm = np.sqrt([factorial(int(i)) * factorial(int(total - i)) for i in k]) / np.sqrt(factorial(m) * factorial(n))
    return coeffs * norm


def haar_exact(m: int, n: int) -> np.ndarray:
    """Exact Haar average on ``|k, m+n-k>``: ``|1,0>`` maps to itself, everything else to 0."""
    out = np.zeros(m + n + 1, dtype=complex)
    if (m, n) == (1, 0):
        out[1] = 1
    return out


@dataclass(frozen=True)
class HaarEstimate:
    photons: tuple
    samples: int
    seed: int
    mean: np.ndarray
    norm: float
    stderr: float
    exact_norm: float

    @property
    def z_score(self) -> float:
        """Distance from the exact average in units of the standard error."""
        return float(np.linalg.norm(self.mean - haar_exact(*self.photons)) / self.stderr)

    def to_dict(self) -> dict:
        m, n = self.photons
        return {"m": m, "n": n, "samples": self.samples, "seed": self.seed, "norm": self.norm,
                "stderr": self.stderr, "exact_norm": self.exact_norm, "z_score": self.z_score}


def haar_projector_estimate(photons, samples: int = 1_000_000, seed: int = 0,
                            batch: int = BATCH) -> HaarEstimate:
    """Monte-Carlo estimate of ``E_g[2 conj(g_00) lift(g)|m, n>]`` over Haar SU(2).

    ``stderr`` is ``sqrt(sum_k Var_k / samples)`` over the output components,
    so the norm of a zero-mean estimate is of order ``stderr``. Batches use
    independent generators spawned from ``seed``.
    """
    m, n = (int(x) for x in photons)
    if m < 0 or n < 0 or m + n > 4:
        raise ValueError("photon numbers must be >= 0 with m + n <= 4")
    if samples < 2:
        raise ValueError("need at least two samples")
    sizes = [batch] * (samples // batch) + ([samples % batch] if samples % batch else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    s1 = np.zeros(m + n + 1, dtype=complex)
    s2 = np.zeros(m + n + 1)
    for size, child in zip(sizes, children):
        g = haar_su2(np.random.default_rng(child), size)
        vals = 2 * np.conj(g[:, 0, 0])[:, None] * _lifted_fock(g, m, n)
        s1 += vals.sum(axis=0)
        s2 += (np.abs(vals) ** 2).sum(axis=0)
    mean = s1 / samples
    var = (s2 / samples - np.abs(mean) ** 2) * samples / (samples - 1)
    stderr = float(np.sqrt(np.sum(var) / samples))
    return HaarEstimate((m, n), samples, seed, mean, float(np.linalg.norm(mean)), stderr,
                        float(np.linalg.norm(haar_exact(m, n))))
