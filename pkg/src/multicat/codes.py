"""Group-covariant codes: projector, encoder, closed forms and code-level checks.

Given a finite 1-design ``G`` of ``d x d`` unitaries and a homomorphism
``rho`` into unitaries on a physical space, the projector

    Pi_G = (d/|G|) sum_g <0|g^dag|0> rho(g)

maps any seed state ``|Phi>`` onto a logical ``|0>``; the remaining
codewords are ``rho(g_i)|0bar>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import NotOneDesign, ProjectorAnnihilatesInput, SpaceMismatch
from .fock import (
    FockOperator,
    FockSpace,
    FockStateVector,
    annihilation_matrix,
    cat2,
    cat4,
    coherent,
    cutoff_rule,
    diagonal_phase,
    fidelity,
    tensor,
)
from .gaussian import PassiveUnitary, exact_sector_mask, lift
from .groups import FiniteUnitaryGroup, builtin_group, is_unitary_1_design

ANNIHILATION_THRESHOLD = 1e-8

FAMILY_PERIOD = {"pauli": 2, "clifford": 4}


# ---------------------------------------------------------------- lifts


def _group_key(group: FiniteUnitaryGroup):
    return (group.name, group.dim, group.order, np.round(group.elements, 12).tobytes())


class GroupRepresentation:
    """All lifts ``rho(g)`` of a group on one Fock space, computed once."""

    def __init__(self, group: FiniteUnitaryGroup, space: FockSpace):
        if space.modes != group.dim:
            raise SpaceMismatch(f"{group.dim}-dimensional group on {space.modes} modes")
        self.group = group
        self.space = space
        self.lifts: list[PassiveUnitary] = [lift(g, space) for g in group.elements]
        sectors = exact_sector_mask(self.lifts)
        self.exact_sectors = sectors
        self.exact_mask = sectors[space.total]

    def __getitem__(self, k) -> PassiveUnitary:
        return self.lifts[k]


_rep_cache: dict = {}


def representation(group: FiniteUnitaryGroup, space: FockSpace) -> GroupRepresentation:
    key = (_group_key(group), space)
    rep = _rep_cache.get(key)
    if rep is None:
        # Lifts of large groups are heavy; keep only the most recent one.
        _rep_cache.clear()
        rep = _rep_cache[key] = GroupRepresentation(group, space)
    return rep


def constellation_amplitude(group: FiniteUnitaryGroup, amplitudes) -> float:
    """Largest single-mode amplitude among the coherent states ``|g alpha>``."""
    vec = np.asarray(amplitudes, dtype=complex)
    return float(np.max(np.abs(np.einsum("nij,j->ni", group.elements, vec))))


def default_code_cutoff(group: FiniteUnitaryGroup, alpha: complex, beta: complex) -> int:
    return cutoff_rule(constellation_amplitude(group, [alpha, beta]))


# ------------------------------------------------------------ projector


def _projector_weights(group: FiniteUnitaryGroup) -> np.ndarray:
    return group.dim / group.order * np.conj(group.elements[:, 0, 0])


def _require_design(group: FiniteUnitaryGroup):
    ok, res = is_unitary_1_design(group)
    if not ok:
        raise NotOneDesign(f"group {group.name!r} is not a unitary 1-design (residual {res:.3e})")


def projector(group: FiniteUnitaryGroup, space: FockSpace) -> FockOperator:
    """``Pi_G`` as a block-diagonal operator.

    Sectors on which some lift is only a truncated compression are left out
    (the operator is zero there), so the result is an exact projector.
    """
    _require_design(group)
    rep = representation(group, space)
    weights = _projector_weights(group)
    blocks = []
    for n, (idx, _) in enumerate(rep[0].fock_rep.blocks):
        acc = np.zeros((len(idx), len(idx)), dtype=complex)
        if rep.exact_sectors[n]:
            for w, p in zip(weights, rep.lifts):
                if w != 0:
                    acc += w * p.fock_rep.blocks[n][1]
        blocks.append((idx, acc))
    return FockOperator(space, blocks=blocks)


def apply_projector(group: FiniteUnitaryGroup, rep, vec: np.ndarray, mask=None) -> np.ndarray:
    """``Pi_G vec`` from a callable ``rep(k) -> operator with apply_array``."""
    weights = _projector_weights(group)
    out = np.zeros_like(vec, dtype=complex)
    for k, w in enumerate(weights):
        if abs(w) > 0:
            out += w * rep(k).apply_array(vec)
    if mask is not None:
        out[~mask] = 0
    return out


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    k = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[k]) / vec[k])


# ------------------------------------------------------------------ code


@dataclass(frozen=True, eq=False)
class BosonicCode:
    """Orthonormal codewords of a group-covariant two-mode code.

    ``normalization`` is the prefactor ``N`` of the encoding sum and
    ``projector_norm`` is ``||Pi_G |Phi>||``.
    """

    group: FiniteUnitaryGroup
    space: FockSpace
    codewords: tuple
    normalization: float
    projector_norm: float
    initial_state: FockStateVector | None = None
    alpha: complex | None = None
    beta: complex | None = None
    meta: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.codewords)

    def codeword_matrix(self) -> np.ndarray:
        """Rows are codeword amplitude vectors."""
        return np.array([c.amplitudes for c in self.codewords])

    def to_dict(self) -> dict:
        def cvec(v):
            return [[float(z.real), float(z.imag)] for z in v]

        return {
            "group": self.group.to_dict(),
            "alpha": None if self.alpha is None else [self.alpha.real, self.alpha.imag],
            "beta": None if self.beta is None else [self.beta.real, self.beta.imag],
            "cutoff": self.space.cutoff,
            "modes": self.space.modes,
            "codewords": [cvec(c.amplitudes) for c in self.codewords],
            "normalization": self.normalization,
            "projector_norm": self.projector_norm,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BosonicCode":
        group = FiniteUnitaryGroup.from_dict(data["group"])
        space = FockSpace(int(data.get("modes", group.dim)), int(data["cutoff"]))
        words = []
        for cw in data["codewords"]:
            arr = np.asarray(cw, dtype=float)
            words.append(FockStateVector(space, arr[:, 0] + 1j * arr[:, 1]))

        def cplx(x):
            return None if x is None else complex(x[0], x[1])

        return cls(
            group=group,
            space=space,
            codewords=tuple(words),
            normalization=float(data["normalization"]),
            projector_norm=float(data["projector_norm"]),
            alpha=cplx(data.get("alpha")),
            beta=cplx(data.get("beta")),
        )


def save_code(code: BosonicCode, path) -> None:
    with open(path, "w") as fh:
        json.dump(code.to_dict(), fh)


def load_code(path) -> BosonicCode:
    with open(path) as fh:
        return BosonicCode.from_dict(json.load(fh))


def encode(group: FiniteUnitaryGroup, phi: FockStateVector, alpha=None, beta=None) -> BosonicCode:
    """Build the code generated by ``group`` from the seed state ``phi``.

    Raises
    ------
    NotOneDesign
        If ``group`` fails the 1-design test.
    ProjectorAnnihilatesInput
        If ``||Pi_G phi|| <= 1e-8``.
    """
    _require_design(group)
    space = phi.space
    rep = representation(group, space)
    v = apply_projector(group, lambda k: rep[k].fock_rep, phi.amplitudes, rep.exact_mask)
    pnorm = float(np.linalg.norm(v))
    if pnorm <= ANNIHILATION_THRESHOLD:
        raise ProjectorAnnihilatesInput(f"||Pi_G Phi|| = {pnorm:.3e}")
    zero = fix_phase(v / pnorm)
    words = [FockStateVector(space, rep[k].fock_rep.apply_array(zero)) for k in group.basis_elements]
    norm_factor = group.dim / (group.order * pnorm)
    return BosonicCode(
        group=group,
        space=space,
        codewords=tuple(words),
        normalization=norm_factor,
        projector_norm=pnorm,
        initial_state=phi,
        alpha=None if alpha is None else complex(alpha),
        beta=None if beta is None else complex(beta),
    )


def coherent_code(group: FiniteUnitaryGroup | str, alpha, beta, cutoff: int | None = None) -> BosonicCode:
    """Code seeded by the product coherent state ``|alpha>|beta>``."""
    if isinstance(group, str):
        group = builtin_group(group)
    if cutoff is None:
        cutoff = default_code_cutoff(group, alpha, beta)
    space = FockSpace(group.dim, cutoff)
    return encode(group, coherent(space, [alpha, beta]), alpha=alpha, beta=beta)


# ------------------------------------------------------------ closed forms


def oracle_pauli(alpha, beta, space: FockSpace) -> BosonicCode:
    """Pauli-code codewords ``c1(alpha) c0(beta)`` and ``c0(beta) c1(alpha)``."""
    one = FockSpace(1, space.cutoff)
    zero = tensor(cat2(one, alpha, 1, normalize=False), cat2(one, beta, 0, normalize=False)).normalized()
    zero_v = fix_phase(zero.amplitudes)
    first_v = _swap_modes(zero_v, space)
    words = (FockStateVector(space, zero_v), FockStateVector(space, first_v))
    return BosonicCode(
        builtin_group("pauli8"), space, words, float("nan"), float("nan"), alpha=complex(alpha), beta=complex(beta),
        meta={"oracle": "pauli"},
    )


def clifford_closed_form(alpha, beta, space: FockSpace, center_order: int = 4) -> np.ndarray:
    """Unnormalized ``|0bar>`` of the Clifford code as a sum of four-component cats.

    ``C1(alpha) C0(beta) + 2^{-1/2} sum_l C1((alpha + i^l beta)/sqrt2) C0((alpha - i^l beta)/sqrt2)``.

    With ``center_order=8`` the state is further restricted to total photon
    number ``1 (mod 8)``, which is the code of the group generated by H and
    S (its center contains ``exp(i pi/4)``).
    """
    one = FockSpace(1, space.cutoff)
    r2 = np.sqrt(2)

    def c(g, k):
        return cat4(one, g, k, normalize=False)

    vec = tensor(c(alpha, 1), c(beta, 0)).amplitudes.copy()
    for l in range(4):
        plus = (alpha + 1j**l * beta) / r2
        minus = (alpha - 1j**l * beta) / r2
        vec += tensor(c(plus, 1), c(minus, 0)).amplitudes / r2
    if center_order == 8:
        vec = vec * (1 + np.exp(-1j * np.pi / 4) * np.exp(1j * np.pi / 4 * space.total)) / 2
    elif center_order != 4:
        raise ValueError("center_order must be 4 or 8")
    return vec


def oracle_clifford(alpha, beta, space: FockSpace, center_order: int = 4) -> BosonicCode:
    """Clifford-code codewords from the closed form; ``|1bar>`` is the mode swap."""
    vec = clifford_closed_form(alpha, beta, space, center_order)
    zero = fix_phase(vec / np.linalg.norm(vec))
    swapped = _swap_modes(zero, space)
    words = (FockStateVector(space, zero), FockStateVector(space, swapped))
    return BosonicCode(
        builtin_group("clifford96"), space, words, float("nan"), float("nan"), alpha=complex(alpha), beta=complex(beta),
        meta={"oracle": f"clifford/center{center_order}"},
    )


def _swap_modes(vec: np.ndarray, space: FockSpace) -> np.ndarray:
    return vec.reshape(space.shape).T.reshape(-1).copy()


def code_fidelities(a: BosonicCode, b: BosonicCode) -> list:
    """Per-codeword state fidelity between two codes on the same space."""
    return [fidelity(x, y) for x, y in zip(a.codewords, b.codewords)]


# ----------------------------------------------------------------- checks


def logical_basis(group: FiniteUnitaryGroup) -> np.ndarray:
    return group.basis_states()


def covariance_check(code: BosonicCode) -> float:
    """``max |<i|rho(g)|j> - <e_i|g|e_j>|`` over all group elements, ``e_i = g_i|0>``."""
    rep = representation(code.group, code.space)
    words = code.codeword_matrix()
    basis = logical_basis(code.group)
    worst = 0.0
    for g, p in zip(code.group.elements, rep.lifts):
        images = np.array([p.fock_rep.apply_array(w) for w in words])
        phys = words.conj() @ images.T
        logical = basis.conj() @ g @ basis.T
        worst = max(worst, float(np.max(np.abs(phys - logical))))
    return worst


def reencode_idempotence(code: BosonicCode) -> list:
    """Fidelities of the codewords regenerated from ``|0bar>`` as the seed."""
    again = encode(code.group, code.codewords[0], alpha=code.alpha, beta=code.beta)
    return code_fidelities(code, again)


def pauli_stabilizer(space: FockSpace) -> FockOperator:
    return diagonal_phase(space, lambda n1, n2: -np.exp(1j * np.pi * (n1 + n2)))


def clifford_stabilizer(space: FockSpace) -> FockOperator:
    """``-i rho(i 1)``, acting as ``-i * i^(n1 + n2)``."""
    return diagonal_phase(space, lambda n1, n2: -1j * 1j ** ((n1 + n2) % 4))


def stabilizer_check(code: BosonicCode, family: str = "pauli") -> list:
    """``||S|i> - |i>||`` for each codeword."""
    if family == "pauli":
        stab = pauli_stabilizer(code.space)
    elif family == "clifford":
        stab = clifford_stabilizer(code.space)
    else:
        raise ValueError(f"unknown family {family!r}")
    return [float(np.linalg.norm(stab.apply_array(w.amplitudes) - w.amplitudes)) for w in code.codewords]


def _jump_terms(space: FockSpace, alpha, beta):
    a = annihilation_matrix(space.levels)
    a2 = a @ a
    first = [(FockOperator(space, factors=[a2, None]), 1), (FockOperator(space, factors=[None, a2]), 1),
             (FockOperator.identity(space), -(alpha**2 + beta**2))]
    second = [(FockOperator(space, factors=[a2, a2]), 1), (FockOperator.identity(space), -(alpha**2) * beta**2)]
    return first, second


def jump_operator_check(code: BosonicCode) -> dict:
    """Residuals of the two Pauli-code jump operators on every codeword.

    ``relative`` divides ``||J|i>||`` by a bound on the operator norm of
    ``J`` in the truncated space (sum of the norms of its terms).
    """
    if code.alpha is None or code.beta is None:
        raise ValueError("jump operators need the seed amplitudes alpha and beta")
    alpha, beta = code.alpha, code.beta
    n = code.space.cutoff
    a2_norm = np.sqrt(n * (n - 1))
    scales = [2 * a2_norm + abs(alpha**2 + beta**2), a2_norm**2 + abs(alpha**2 * beta**2)]
    out = {"absolute": [], "relative": []}
    for terms, scale in zip(_jump_terms(code.space, alpha, beta), scales):
        row = []
        for w in code.codewords:
            v = sum(c * op.apply_array(w.amplitudes) for op, c in terms)
            row.append(float(np.linalg.norm(v)))
        out["absolute"].append(row)
        out["relative"].append([r / scale for r in row])
    return out


def measure_logical(counts: Sequence[int], code_family: str):
    """Logical value read off from photon counts, or ``"ambiguous"``."""
    try:
        p = FAMILY_PERIOD[code_family]
    except KeyError:
        raise ValueError(f"unknown family {code_family!r}") from None
    n1, n2 = counts
    pattern = (n1 % p, n2 % p)
    if pattern == (1, 0):
        return 0
    if pattern == (0, 1):
        return 1
    return "ambiguous"


# ------------------------------------------------------------- estimator


class CovariantEncoder(TransformerMixin, BaseEstimator):
    """Encoder mapping logical amplitude vectors to physical Fock amplitudes.

    Parameters
    ----------
    group : str
        Built-in group name.
    alpha, beta : complex
        Seed coherent amplitudes of the two modes.
    cutoff : int or None
        Per-mode photon cutoff; chosen from the constellation if None.

    ``fit`` builds the codewords (the input ``X`` is ignored); ``transform``
    maps rows of logical amplitudes (shape ``(n, d)``) to rows of physical
    amplitudes; ``inverse_transform`` projects back onto the code.
    """

    def __init__(self, group="pauli8", alpha=2.0, beta=2j, cutoff=None):
        self.group = group
        self.alpha = alpha
        self.beta = beta
        self.cutoff = cutoff

    def fit(self, X=None, y=None):
        self.code_ = coherent_code(self.group, self.alpha, self.beta, self.cutoff)
        self.codewords_ = self.code_.codeword_matrix()
        self.n_features_in_ = self.code_.d
        return self

    def _check_fitted(self):
        if not hasattr(self, "codewords_"):
            raise NotFittedError("CovariantEncoder is not fitted yet; call fit first")

    def transform(self, X):
        self._check_fitted()
        X = _as_complex_2d(X, self.codewords_.shape[0])
        return X @ self.codewords_

    def inverse_transform(self, X):
        self._check_fitted()
        X = _as_complex_2d(X, self.codewords_.shape[1])
        return X @ self.codewords_.conj().T


def _as_complex_2d(X, width: int) -> np.ndarray:
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValueError(f"expected shape (n_samples, {width}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input contains NaN or infinity")
    return arr
