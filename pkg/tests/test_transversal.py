import numpy as np
import pytest

from multicat.errors import ProjectorAnnihilatesInput
from multicat.groups import builtin_group
from multicat.transversal import (
    apply_transversal,
    equivariance_residual,
    haar_exact,
    haar_projector_estimate,
    haar_su2,
    transversal_code,
    transversal_projector,
)

CLIFF = builtin_group("clifford96")


@pytest.mark.parametrize("m", range(2, 9))
def test_clifford_projector_vanishes(m):
    assert transversal_projector(CLIFF, m).norm < 1e-12


def test_clifford_nine_copies():
    P = transversal_projector(CLIFF, 9)
    assert P.nonzero and P.idempotence_residual < 1e-12
    assert np.max(np.abs(P.matrix - P.matrix.conj().T)) < 1e-12
    code = transversal_code(CLIFF, 9)
    assert code.seed_label == "zero"
    assert code.covariance_residual() < 1e-8
    W = code.codewords
    assert np.max(np.abs(W.conj() @ W.T - np.eye(2))) < 1e-10


@pytest.mark.parametrize("name,m", [("pauli8", 1), ("pauli8", 3), ("clifford96", 9)])
def test_equivariance(name, m):
    assert equivariance_residual(builtin_group(name), m) < 1e-12


def test_single_copy_is_the_qubit():
    g = builtin_group("pauli8")
    P = transversal_projector(g, 1)
    assert np.allclose(P.matrix, np.diag([1, 0]))
    code = transversal_code(g, 1)
    assert np.allclose(code.codewords, np.eye(2))


def test_pauli_two_copies_annihilates():
    g = builtin_group("pauli8")
    assert not transversal_projector(g, 2).nonzero
    with pytest.raises(ProjectorAnnihilatesInput):
        transversal_code(g, 2)


def test_random_fallback_label():
    # pauli8 with three copies kills |000> but not a generic product state
    g = builtin_group("pauli8")
    P = transversal_projector(g, 3)
    if abs(P.matrix[0, 0]) < 1e-12:
        code = transversal_code(g, 3, seed=5)
        assert code.seed_label == "random_product(seed=5)"
        assert code.covariance_residual() < 1e-8


def test_apply_transversal_matches_kron():
    rng = np.random.default_rng(1)
    g = haar_su2(rng, 1)[0]
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    full = np.kron(np.kron(g, g), g)
    assert np.allclose(apply_transversal(g, v, 3), full @ v)


def test_haar_samples_are_su2():
    g = haar_su2(np.random.default_rng(0), 50)
    assert np.allclose(np.linalg.det(g), 1)
    assert np.allclose(g @ np.conj(np.transpose(g, (0, 2, 1))), np.eye(2))


def test_haar_exact_values():
    assert np.allclose(haar_exact(1, 0), [0, 1])
    for mn in [(0, 1), (2, 0), (1, 1), (0, 2)]:
        assert not haar_exact(*mn).any()


@pytest.mark.parametrize("mn", [(1, 0), (2, 0), (1, 1), (0, 2)])
def test_haar_estimate_within_error(mn):
    est = haar_projector_estimate(mn, samples=200_000, seed=3)
    assert est.z_score < 4


def test_haar_stderr_scaling():
    a = haar_projector_estimate((2, 0), samples=50_000, seed=0)
    b = haar_projector_estimate((2, 0), samples=200_000, seed=0)
    assert b.stderr == pytest.approx(a.stderr / 2, rel=0.3)


def test_haar_determinism():
    a = haar_projector_estimate((1, 1), samples=30_000, seed=7, batch=10_000)
    b = haar_projector_estimate((1, 1), samples=30_000, seed=7, batch=10_000)
    c = haar_projector_estimate((1, 1), samples=30_000, seed=8, batch=10_000)
    assert np.array_equal(a.mean, b.mean)
    assert not np.array_equal(a.mean, c.mean)


def test_haar_rejects_large_photon_numbers():
    with pytest.raises(ValueError):
        haar_projector_estimate((3, 2), samples=10)
