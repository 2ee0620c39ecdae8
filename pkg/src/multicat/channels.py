"""Two-mode pure-loss channel and Knill-Laflamme diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .codes import BosonicCode, coherent_code
from .errors import SpaceMismatch, TailTooLarge
from .fock import FockOperator, FockSpace

TAIL_LIMIT = 1e-8
DEFAULT_PMAX = 8


def loss_factor(gamma: float, p: int, levels: int) -> np.ndarray:
    """Single-mode factor ``(g/(1-g))^(p/2) a^p/sqrt(p!) (1-g)^(n/2)``.

    Entry ``[n-p, n]`` equals ``sqrt(C(n, p) g^p (1-g)^(n-p))``.
    """
    mat = np.zeros((levels, levels), dtype=complex)
    if gamma == 0:
        if p == 0:
            mat[np.diag_indices(levels)] = 1
        return mat
    n = np.arange(p, levels)
    logw = (
        gammaln(n + 1) - gammaln(p + 1) - gammaln(n - p + 1)
        + p * math.log(gamma) + (n - p) * math.log1p(-gamma)
    )
    mat[n - p, n] = np.exp(0.5 * logw)
    return mat


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Truncated family ``E_{p1,p2}``, ``p1 + p2 <= pmax``, of the pure-loss channel."""

    gamma: float
    pmax: int
    space: FockSpace
    labels: tuple
    operators: tuple
    tail_bound: float

    def __len__(self):
        return len(self.operators)

    def completeness_diagonal(self) -> np.ndarray:
        """Diagonal of ``sum E^dag E`` (the sum is diagonal for pure loss)."""
        total = np.zeros(self.space.dim)
        for op in self.operators:
            diags = [np.ones(self.space.levels) if f is None else np.sum(np.abs(f) ** 2, axis=0)
                     for f in op.factors]
            out = diags[0]
            for dgl in diags[1:]:
                out = np.multiply.outer(out, dgl)
            total += out.reshape(-1)
        return total

    def safe_mask(self) -> np.ndarray:
        return self.space.total <= self.space.cutoff - self.pmax

    def damaged(self, vectors: np.ndarray) -> np.ndarray:
        """``E_c v`` for every operator and vector; shape ``(n_kraus, n_vec, dim)``."""
        vectors = np.atleast_2d(vectors)
        return np.array([[op.apply_array(v) for v in vectors] for op in self.operators])

    def apply_to_density(self, rho: np.ndarray) -> np.ndarray:
        """``sum_c E_c rho E_c^dag`` on the full space (small spaces only)."""
        out = np.zeros_like(rho, dtype=complex)
        for op in self.operators:
            m = op.matrix
            out += m @ rho @ m.conj().T
        return out


def kraus(gamma: float, pmax: int = DEFAULT_PMAX, space: FockSpace | None = None,
          check: bool = True) -> KrausSet:
    """Pure-loss Kraus operators on a two-mode space.

    ``tail_bound`` is the largest completeness deficit ``1 - <n|sum E^dag E|n>``
    over Fock states with total photon number ``<= cutoff - pmax``.
    Raises :class:`TailTooLarge` when it is ``>= 1e-8`` (and ``check`` is set).
    """
    if not 0 <= gamma < 1:
        raise ValueError("loss rate must lie in [0, 1)")
    if pmax < 0:
        raise ValueError("pmax must be >= 0")
    if space is None:
        raise ValueError("a FockSpace is required")
    if space.modes != 2:
        raise SpaceMismatch("the pure-loss Kraus family is defined on two modes")
    levels = space.levels
    labels, ops = [], []
    pairs = [(0, 0)] if gamma == 0 else [(p1, s - p1) for s in range(pmax + 1) for p1 in range(s, -1, -1)]
    for p1, p2 in pairs:
        f1 = loss_factor(gamma, p1, levels)
        f2 = loss_factor(gamma, p2, levels)
        labels.append((p1, p2))
        ops.append(FockOperator(space, factors=[f1, f2]))
    ks = KrausSet(gamma, pmax, space, tuple(labels), tuple(ops), 0.0)
    safe = ks.safe_mask()
    deficit = np.abs(1 - ks.completeness_diagonal()[safe]) if safe.any() else np.array([np.inf])
    tail = float(np.max(deficit))
    ks = KrausSet(gamma, pmax, space, tuple(labels), tuple(ops), tail)
    if check and tail >= TAIL_LIMIT:
        raise TailTooLarge(
            f"completeness deficit {tail:.3e} >= {TAIL_LIMIT:g} (gamma={gamma}, pmax={pmax}, "
            f"cutoff={space.cutoff}); raise pmax or the cutoff"
        )
    return ks


def attenuation_residual(alpha: complex, gamma: float, p: int, cutoff: int) -> float:
    """``|| a^p (1-g)^(n/2)|alpha> - (mu alpha)^p e^(-g|alpha|^2/2) |mu alpha> ||``.

    Compared on levels ``n <= cutoff - p``, where the truncated ``a^p`` is exact.
    """
    from .fock import annihilation_matrix, coherent

    one = FockSpace(1, cutoff)
    mu = math.sqrt(1 - gamma)
    a = annihilation_matrix(one.levels)
    damp = np.diag((1 - gamma) ** (np.arange(one.levels) / 2))
    lhs = np.linalg.matrix_power(a, p) @ damp @ coherent(one, [alpha]).amplitudes
    rhs = (mu * alpha) ** p * np.exp(-gamma * abs(alpha) ** 2 / 2) * coherent(one, [mu * alpha]).amplitudes
    keep = one.levels - p
    return float(np.linalg.norm((lhs - rhs)[:keep]))


@dataclass(frozen=True, eq=False)
class KLReport:
    """Gram matrix ``<k|E_c^dag E_c'|l>`` with rows/cols indexed ``c * d + k``.

    Scores follow the pairwise analysis of the conditions:

    * ``off_diagonal``: ``max |<k|E_c^dag E_c'|l>|`` over all Kraus pairs, ``k != l``;
    * ``diagonal``: ``max |<k|E_c^dag E_c|k> - <0|E_c^dag E_c|0>|`` over single
      Kraus operators;
    * ``diagonal_cross``: the same mismatch over distinct pairs ``c != c'``,
      reported separately and not part of ``score``.
    """

    matrix: np.ndarray
    labels: tuple
    d: int
    off_diagonal: float
    diagonal: float
    diagonal_cross: float

    @property
    def score(self) -> float:
        return max(self.off_diagonal, self.diagonal)

    def block(self, c: int, c2: int) -> np.ndarray:
        d = self.d
        return self.matrix[c * d:(c + 1) * d, c2 * d:(c2 + 1) * d]

    def rows(self):
        """Yield ``(p, q, k, l, entry)`` for every Kraus pair and codeword pair."""
        for c, p in enumerate(self.labels):
            for c2, q in enumerate(self.labels):
                blk = self.block(c, c2)
                for k in range(self.d):
                    for l in range(self.d):
                        yield p, q, k, l, complex(blk[k, l])


def kl_matrix(code: BosonicCode, K: KrausSet) -> KLReport:
    if K.space != code.space:
        raise SpaceMismatch(f"Kraus set on {K.space}, code on {code.space}")
    d = code.d
    damaged = K.damaged(code.codeword_matrix())
    flat = damaged.reshape(-1, code.space.dim)
    gram = flat.conj() @ flat.T
    gram = (gram + gram.conj().T) / 2
    blocks = gram.reshape(len(K), d, len(K), d).transpose(0, 2, 1, 3)
    same = np.eye(len(K), dtype=bool)
    off = diag = cross = 0.0
    for i in range(d):
        for j in range(d):
            if i != j:
                off = max(off, float(np.max(np.abs(blocks[:, :, i, j]))))
        if i > 0:
            mismatch = np.abs(blocks[:, :, i, i] - blocks[:, :, 0, 0])
            diag = max(diag, float(np.max(mismatch[same])))
            if len(K) > 1:
                cross = max(cross, float(np.max(mismatch[~same])))
    return KLReport(gram, K.labels, d, off, diag, cross)


FAMILY_GROUP = {"pauli": "pauli8", "clifford": "clifford96"}


def kl_theta_scan(family: str, alpha: float, thetas, gamma: float, pmax: int = DEFAULT_PMAX,
                  cutoff: int | None = None) -> dict:
    """KL scores of the code seeded by ``|alpha>|alpha e^{i theta}>`` on a grid of angles."""
    group = FAMILY_GROUP.get(family, family)
    rows = []
    for theta in thetas:
        code = coherent_code(group, alpha, alpha * np.exp(1j * theta), cutoff)
        rep = kl_matrix(code, kraus(gamma, pmax, code.space))
        rows.append({"theta": float(theta), "off_diagonal": rep.off_diagonal,
                     "diagonal": rep.diagonal, "diagonal_cross": rep.diagonal_cross,
                     "score": rep.score})
    scores = np.array([r["score"] for r in rows])
    return {
        "family": family,
        "alpha": alpha,
        "gamma": gamma,
        "rows": rows,
        "argmax": rows[int(np.argmax(scores))]["theta"],
        "argmin": rows[int(np.argmin(scores))]["theta"],
    }
