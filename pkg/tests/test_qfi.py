"""Fisher information, variance, and the auxiliary observables Z and Y."""

import numpy as np
import pytest

from varroof import (
    DensityMatrix,
    DimensionError,
    Observable,
    ValidationError,
    build_YH,
    build_ZH,
    eigh,
    qfi,
    variance,
)
from varroof.qfi import QfiReport
from varroof.sampling import iter_cases, random_density_matrix, case_rng

from conftest import SX, SZ


def test_frozen_qubit_x(rho31, pauli_x):
    rep = qfi(rho31, pauli_x)
    assert rep.F == pytest.approx(1.0, abs=1e-12)
    assert rep.I == pytest.approx(0.25, abs=1e-12)
    assert rep.variance == pytest.approx(1.0, abs=1e-12)


def test_frozen_qubit_z(rho31, pauli_z):
    rep = qfi(rho31, pauli_z)
    assert rep.F == pytest.approx(0.0, abs=1e-12)
    assert rep.variance == pytest.approx(0.75, abs=1e-12)


def test_frozen_z_observable(rho31, pauli_x, pauli_z):
    z = build_ZH(eigh(rho31), pauli_x)
    assert np.abs(z.matrix - np.sqrt(3.0 / 8.0) * SX).max() < 1e-12
    z = build_ZH(eigh(rho31), pauli_z)
    assert np.abs(z.matrix - np.diag([np.sqrt(3.0) / 2.0, -0.5])).max() < 1e-12


def test_frozen_y_observable(rho31, pauli_x, pauli_z):
    y = build_YH(eigh(rho31), pauli_x)
    assert np.abs(y.matrix - (np.sqrt(3.0) / 2.0) * SX).max() < 1e-12
    y = build_YH(eigh(rho31), pauli_z)
    assert np.abs(y.matrix - SZ).max() < 1e-12


def test_y_matrix_is_support_sized():
    psi = np.array([1.0, 0.0], dtype=complex)
    rho = DensityMatrix(np.outer(psi, psi))
    y = build_YH(eigh(rho), Observable(SX))
    assert y.matrix.shape == (1, 1)


def test_variance_frozen(rho31, pauli_x, pauli_z):
    assert variance(rho31, pauli_x) == pytest.approx(1.0, abs=1e-12)
    assert variance(rho31, pauli_z) == pytest.approx(0.75, abs=1e-12)


def test_variance_never_negative():
    rng = np.random.default_rng(3)
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    psi /= np.linalg.norm(psi)
    rho = DensityMatrix(np.outer(psi, psi.conj()))
    proj = Observable(np.outer(psi, psi.conj()))
    assert variance(rho, proj) >= 0.0


def test_pure_state_equality():
    # rank 1 forces F = 4 variance
    for idx in range(10):
        rng = case_rng(21, idx)
        rho = random_density_matrix(3, 1, rng)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = Observable((a + a.conj().T) / 2.0)
        rep = qfi(rho, h)
        assert abs(rep.F - 4.0 * rep.variance) < 1e-9


def test_identity_against_z_on_random_sweep():
    for _, _, _, rho, h in iter_cases(5, 30, [2, 3, 4]):
        rep = qfi(rho, h)
        assert abs(rep.F - rep.F_via_Z) <= 1e-9 * max(1.0, abs(rep.F))
        assert rep.F <= 4.0 * rep.variance + 1e-9
        assert rep.I >= -1e-12


def test_unitary_covariance_and_shift_invariance():
    for idx, _, _, rho, h in iter_cases(9, 10, [3]):
        rng = case_rng(1000, idx)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        u = np.linalg.qr(a)[0]
        rho_u = DensityMatrix(u @ rho.matrix @ u.conj().T, tol_herm=1e-9)
        h_u = Observable(u @ h.matrix @ u.conj().T, tol_herm=1e-9)
        f0 = qfi(rho, h).F
        assert abs(qfi(rho_u, h_u).F - f0) < 1e-9
        shifted = Observable(h.matrix + 0.7 * np.eye(3))
        assert abs(qfi(rho, shifted).F - f0) < 1e-9


def test_convexity_on_mixtures():
    cases = list(iter_cases(13, 8, [3]))
    rng = np.random.default_rng(77)
    for (_, _, _, r1, h), (_, _, _, r2, _) in zip(cases[::2], cases[1::2]):
        t = float(rng.uniform(0.1, 0.9))
        mix = DensityMatrix(t * r1.matrix + (1.0 - t) * r2.matrix)
        assert qfi(mix, h).F <= t * qfi(r1, h).F + (1.0 - t) * qfi(r2, h).F + 1e-9


def test_report_rejects_inconsistent_fields():
    with pytest.raises(ValidationError):
        QfiReport(F=1.0, I=0.25, variance=1.0, F_via_Z=2.0)
    with pytest.raises(ValidationError):
        QfiReport(F=5.0, I=1.25, variance=1.0, F_via_Z=5.0)


def test_dimension_mismatch(rho31):
    with pytest.raises(DimensionError):
        qfi(rho31, Observable(np.eye(3, dtype=complex)))
    with pytest.raises(DimensionError):
        build_ZH(eigh(rho31), Observable(np.eye(3, dtype=complex)))


def test_rank_zero_support_rejected(rho31):
    with pytest.raises(ValidationError):
        build_YH(eigh(rho31, eps_rank=2.0), Observable(SX))
