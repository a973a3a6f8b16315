"""Symmetric logarithmic derivative and the classical/quantum Fisher split."""

import numpy as np
import pytest

from varroof import (
    DegeneracyError,
    DensityMatrix,
    Observable,
    ParametrizedFamily,
    ValidationError,
    decompose,
    named_family,
    qfi,
    qfi_theta,
    rho_dot,
    sld,
)
from varroof.sld import _eigensystem_derivatives, _expm_generator, _pair_and_gauge

from conftest import SY, SZ


def rotating_drifting_qubit(fd_step=1e-5):
    """Eigenvalue drift plus eigenvector rotation in one family."""

    def evaluate(theta):
        p = 0.7 + 0.1 * np.sin(theta)
        u = _expm_generator(SY / 2.0, theta)
        return u @ np.diag([p, 1.0 - p]).astype(complex) @ u.conj().T

    return ParametrizedFamily(evaluate, fd_step)


def rotating_drifting_qutrit(fd_step=1e-5):
    rng = np.random.default_rng(12)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    gen = (a + a.conj().T) / 2.0

    def evaluate(theta):
        p = np.array([0.5 + 0.1 * np.sin(theta), 0.3, 0.2 - 0.1 * np.sin(theta)])
        u = _expm_generator(gen, theta)
        return u @ np.diag(p).astype(complex) @ u.conj().T

    return ParametrizedFamily(evaluate, fd_step)


class TestRhoDot:
    def test_constant_family_is_zero(self):
        d = rho_dot(named_family("constant"), 0.3)
        assert np.abs(d).max() < 1e-12

    def test_rotating_family_frozen_value(self):
        d = rho_dot(named_family("unitary", bloch_r=0.5), 0.0)
        assert np.abs(d - SY / 4.0).max() < 2e-10

    def test_linear_classical_exact(self):
        d = rho_dot(named_family("linear-classical"), 0.25)
        assert np.abs(d - np.diag([1.0, -1.0])).max() < 1e-9

    def test_invalid_family_point_propagates(self):
        # theta - h leaves [0, 1], so the evaluator output is not a state
        with pytest.raises(ValidationError):
            rho_dot(named_family("linear-classical"), 0.0)


class TestSld:
    def test_zero_derivative_gives_zero_sld(self, rho31):
        l = sld(rho31, np.zeros((2, 2), dtype=complex))
        assert np.abs(l.matrix).max() == 0.0

    def test_rotating_family_frozen_sld(self):
        family = named_family("unitary", bloch_r=0.5)
        center = family.density(0.0)
        l = sld(center, rho_dot(family, 0.0))
        assert np.abs(l.matrix - SY / 2.0).max() < 1e-6
        f = float(np.trace(center.matrix @ l.matrix @ l.matrix).real)
        assert f == pytest.approx(0.25, abs=1e-6)

    def test_classical_family_frozen_sld(self):
        family = named_family("linear-classical")
        center = family.density(0.25)
        l = sld(center, rho_dot(family, 0.25))
        assert np.abs(l.matrix - np.diag([4.0, -4.0 / 3.0])).max() < 1e-8

    def test_rejects_non_traceless_derivative(self, rho31):
        with pytest.raises(ValidationError):
            sld(rho31, np.eye(2, dtype=complex))

    def test_rejects_non_hermitian_derivative(self, rho31):
        d = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(ValidationError):
            sld(rho31, d)


class TestQfiTheta:
    def test_constant_family(self):
        assert qfi_theta(named_family("constant"), 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_rotating_family(self):
        assert qfi_theta(named_family("unitary", bloch_r=0.5), 0.0) == pytest.approx(
            0.25, abs=1e-6
        )

    def test_classical_family(self):
        assert qfi_theta(named_family("linear-classical"), 0.25) == pytest.approx(
            16.0 / 3.0, abs=1e-5
        )

    def test_matches_static_engine_for_unitary_families(self):
        family = named_family("unitary", bloch_r=0.5)
        rho0 = family.density(0.0)
        gen = Observable(np.diag([0.5, -0.5]).astype(complex))
        for theta in (0.0, 0.8):
            assert abs(qfi_theta(family, theta) - qfi(rho0, gen).F) < 1e-5


class TestDecompose:
    def test_rotating_family_is_purely_quantum(self):
        dec = decompose(named_family("unitary", bloch_r=0.5), 0.0)
        assert dec.F_classical <= 1e-8
        assert dec.F_quantum == pytest.approx(0.25, abs=1e-5)
        assert dec.F_total == pytest.approx(0.25, abs=1e-5)

    def test_classical_family_is_purely_classical(self):
        dec = decompose(named_family("linear-classical"), 0.25)
        assert dec.F_quantum <= 1e-6
        assert dec.F_classical == pytest.approx(16.0 / 3.0, abs=1e-4)

    def test_constant_family_vanishes(self):
        dec = decompose(named_family("constant"), 0.5)
        assert dec.F_total == pytest.approx(0.0, abs=1e-10)
        assert dec.F_classical == pytest.approx(0.0, abs=1e-10)
        assert dec.F_quantum == pytest.approx(0.0, abs=1e-10)

    def test_identity_on_mixed_families(self):
        for family, thetas in (
            (rotating_drifting_qubit(), (0.0, 0.3, 1.1)),
            (rotating_drifting_qutrit(), (0.2, 0.9)),
        ):
            for theta in thetas:
                dec = decompose(family, theta)
                gap = abs(dec.F_total - (dec.F_classical + dec.F_quantum))
                assert gap <= 1e-5 * max(1.0, abs(dec.F_total))
                assert dec.F_classical >= 0.0
                assert dec.F_quantum >= -1e-9

    def test_effective_hamiltonian_is_hermitian(self):
        dec = decompose(rotating_drifting_qubit(), 0.3)
        m = dec.H_theta.matrix
        assert np.abs(m - m.conj().T).max() < 1e-12


def test_gauge_term_does_not_change_quantum_part():
    # adding any real diagonal (in the state eigenbasis) to the effective
    # Hamiltonian leaves its Fisher information untouched
    family = rotating_drifting_qubit()
    s0, center, _, v_dot, _ = _eigensystem_derivatives(family, 0.3)
    h_raw = 1j * (v_dot @ s0.eigenvectors.conj().T)
    h_theta = Observable((h_raw + h_raw.conj().T) / 2.0)
    rng = np.random.default_rng(4)
    base = qfi(center, h_theta).F
    for _ in range(5):
        shift = s0.eigenvectors @ np.diag(rng.standard_normal(2)) @ s0.eigenvectors.conj().T
        shifted = Observable(h_theta.matrix + shift, tol_herm=1e-9)
        assert abs(qfi(center, shifted).F - base) < 1e-8


def test_finite_difference_error_is_second_order():
    family = named_family("unitary", bloch_r=0.5)
    exact = qfi(family.density(0.0), Observable(np.diag([0.5, -0.5]).astype(complex))).F
    errs = []
    for h in (0.1, 0.05):
        f_h = qfi_theta(named_family("unitary", bloch_r=0.5, fd_step=h), 0.4)
        errs.append(abs(f_h - exact))
    ratio = errs[0] / errs[1]
    assert 3.0 <= ratio <= 5.0


class TestDegeneracyHandling:
    def test_degenerate_spectrum_refused(self):
        with pytest.raises(DegeneracyError):
            decompose(named_family("constant", bloch_r=0.0), 0.0)

    def test_eigenvalue_crossing_refused(self):
        with pytest.raises(DegeneracyError):
            decompose(named_family("linear-classical"), 0.5)

    def test_overlap_collapse_across_large_step_refused(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        gen = (a + a.conj().T) / 2.0

        def evaluate(theta):
            u = _expm_generator(gen, theta)
            return u @ np.diag([0.6, 0.3, 0.1]).astype(complex) @ u.conj().T

        with pytest.raises(DegeneracyError):
            decompose(ParametrizedFamily(evaluate, fd_step=1.3), 0.3)

    def test_pairing_collision_refused(self):
        q = np.sqrt(0.5)
        side = np.array([[q, -q], [q, q]], dtype=complex)
        with pytest.raises(DegeneracyError):
            _pair_and_gauge(np.eye(2, dtype=complex), side)


def test_family_rejects_invalid_evaluator_output():
    family = ParametrizedFamily(lambda theta: np.diag([2.0, -1.0]).astype(complex))
    with pytest.raises(ValidationError):
        family.density(0.0)


def test_named_family_validation():
    with pytest.raises(ValidationError):
        named_family("nonsense")
    with pytest.raises(ValidationError):
        named_family("unitary", bloch_r=1.5)


def test_decompose_uses_bounded_evaluator_calls():
    calls = []

    def evaluate(theta):
        calls.append(theta)
        return rotating_drifting_qubit().density(theta).matrix

    decompose(ParametrizedFamily(evaluate), 0.3)
    assert len(calls) <= 5
