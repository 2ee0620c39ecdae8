import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multicat.channels import attenuation_residual, kl_matrix, kl_theta_scan, kraus, loss_factor
from multicat.codes import coherent_code
from multicat.errors import SpaceMismatch, TailTooLarge
from multicat.fock import FockSpace

SP40 = FockSpace(2, 40)
GRID = [0, np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2]


def test_zero_loss_is_identity():
    K = kraus(0.0, 8, SP40)
    assert len(K) == 1 and K.labels == ((0, 0),)
    assert np.allclose(K.operators[0].apply_array(np.arange(SP40.dim)), np.arange(SP40.dim))
    assert K.tail_bound == 0


def test_e00_is_damping():
    g = 0.01
    K = kraus(g, 8, SP40)
    sp = SP40
    op = K.operators[K.labels.index((0, 0))]
    expected = (1 - g) ** (sp.total / 2)
    assert np.allclose(op.apply_array(np.ones(sp.dim)), expected)


def test_completeness_tail():
    K = kraus(0.01, 8, SP40)
    assert len(K) == 45
    assert K.tail_bound < 1e-8


def test_tail_too_large():
    with pytest.raises(TailTooLarge):
        kraus(0.05, 2, SP40)
    K = kraus(0.05, 2, SP40, check=False)
    assert K.tail_bound > 1e-8


def test_attenuation_identity():
    assert attenuation_residual(2, 0.1, 2, 40) < 1e-8
    assert max(attenuation_residual(2, 0.01, p, 40) for p in range(9)) < 1e-12


def test_loss_factor_entries():
    f = loss_factor(0.2, 1, 5)
    # <n-1| . |n> = sqrt(n g (1-g)^(n-1))
    assert f[2, 3] == pytest.approx(np.sqrt(3 * 0.2 * 0.8**2))


def test_trace_preservation_small():
    sp = FockSpace(2, 12)
    K = kraus(0.01, 8, sp, check=False)
    rho = np.zeros((sp.dim, sp.dim), dtype=complex)
    rho[sp.index((2, 1)), sp.index((2, 1))] = 1
    out = K.apply_to_density(rho)
    assert abs(np.trace(out) - 1) < 1e-12


def test_kl_zero_loss(pauli_code):
    rep = kl_matrix(pauli_code, kraus(0, 8, pauli_code.space))
    assert rep.score < 1e-12


def test_kl_hermitian_psd(pauli_code):
    rep = kl_matrix(pauli_code, kraus(0.01, 8, pauli_code.space))
    M = rep.matrix
    assert np.max(np.abs(M - M.conj().T)) < 1e-10
    assert np.linalg.eigvalsh(M).min() > -1e-10


def test_kl_space_mismatch(pauli_code):
    with pytest.raises(SpaceMismatch):
        kl_matrix(pauli_code, kraus(0.01, 8, FockSpace(2, 45)))


def test_offdiagonal_decay():
    vals = []
    for a in (1, 1.5, 2, 2.5):
        code = coherent_code("pauli8", a, 1j * a)
        vals.append(kl_matrix(code, kraus(0.01, 8, code.space)).off_diagonal)
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6


def test_diagonal_mismatch_frozen_and_decaying():
    # Same-Kraus diagonal mismatch comes from the parity-dependent cat
    # normalizations; it decays like the cat overlap exp(-2 |mu alpha|^2).
    vals = {}
    for a in (2.0, 3.0, 3.5):
        code = coherent_code("pauli8", a, 1j * a)
        vals[a] = kl_matrix(code, kraus(0.01, 8, code.space)).diagonal
    assert vals[2.0] == pytest.approx(5.367402650461456e-05, rel=1e-6)
    assert vals[2.0] > vals[3.0] > vals[3.5]
    assert vals[3.5] < 1e-9


def test_diagonal_independent_of_theta():
    d = []
    for th in (0, np.pi / 2):
        code = coherent_code("pauli8", 2, 2 * np.exp(1j * th))
        d.append(kl_matrix(code, kraus(0.01, 8, code.space)).diagonal)
    assert d[0] == pytest.approx(d[1], rel=1e-6)


def test_theta_scan_pauli():
    scan = kl_theta_scan("pauli", 2, GRID, 0.01)
    assert scan["argmax"] == 0
    assert scan["argmin"] == pytest.approx(np.pi / 2)


def test_theta_scan_symmetric():
    scan = kl_theta_scan("pauli", 2, [np.pi / 8, -np.pi / 8, np.pi / 3, -np.pi / 3], 0.01)
    s = [r["score"] for r in scan["rows"]]
    assert abs(s[0] - s[1]) < 1e-9 and abs(s[2] - s[3]) < 1e-9


@pytest.mark.slow
def test_theta_scan_clifford():
    scan = kl_theta_scan("clifford", 2, [0, np.pi / 8], 0.01)
    assert scan["rows"][1]["score"] < scan["rows"][0]["score"]


def test_report_rows(pauli_code):
    rep = kl_matrix(pauli_code, kraus(0.01, 1, pauli_code.space, check=False))
    rows = list(rep.rows())
    assert len(rows) == 3 * 3 * 4
    p, q, k, l, z = rows[5]
    assert z == rep.block(rep.labels.index(p), rep.labels.index(q))[k, l]


@settings(max_examples=15, deadline=None)
@given(st.floats(0.001, 0.3), st.integers(0, 4))
def test_completeness_property(gamma, n):
    sp = FockSpace(2, 10)
    K = kraus(gamma, 20, sp, check=False)
    diag = K.completeness_diagonal()
    assert np.all(np.abs(diag[sp.total <= n] - 1) < 1e-10)
