"""Brute-force ensemble optimizer: determinism, correctness, diagnostics."""

import numpy as np
import pytest

from varroof import (
    DensityMatrix,
    DimensionError,
    Observable,
    OracleConfig,
    ValidationError,
    eigh,
    mixture_deviation,
    oracle_max,
    oracle_min,
    qfi,
    variance,
)
from varroof.oracle import (
    StiefelPoint,
    ensemble_from_isometry,
    haar_random_stiefel,
    restart_rng,
)
from varroof.sampling import iter_cases

from conftest import SX

FAST = OracleConfig(restarts=16, seed=11)


class TestStiefelPoint:
    def test_accepts_isometry(self):
        w = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 2)))[0]
        p = StiefelPoint(w)
        assert (p.rows, p.cols) == (4, 2)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValidationError):
            StiefelPoint(np.ones((3, 2)))

    def test_rejects_wide_matrix(self):
        with pytest.raises(DimensionError):
            StiefelPoint(np.eye(2, 3))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"restarts": 0},
            {"max_iterations": 0},
            {"convergence_tol": 0.0},
            {"ensemble_size": 0},
        ],
    )
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValidationError):
            OracleConfig(**kwargs)


class TestSampling:
    def test_haar_columns_orthonormal(self):
        w = haar_random_stiefel(5, 3, restart_rng(0, 0)).matrix
        assert np.abs(w.conj().T @ w - np.eye(3)).max() < 1e-12

    def test_streams_reproducible_and_independent(self):
        a = haar_random_stiefel(4, 2, restart_rng(7, 3)).matrix
        b = haar_random_stiefel(4, 2, restart_rng(7, 3)).matrix
        c = haar_random_stiefel(4, 2, restart_rng(7, 4)).matrix
        assert np.array_equal(a, b)
        assert np.abs(a - c).max() > 1e-3


def test_ensemble_from_isometry_reconstructs(rho31):
    spec = eigh(rho31)
    w = haar_random_stiefel(3, spec.rank, restart_rng(1, 0))
    ensemble = ensemble_from_isometry(w, spec)
    assert mixture_deviation(ensemble, rho31) < 1e-10


def test_ensemble_from_isometry_rejects_wrong_width(rho31):
    spec = eigh(rho31)
    with pytest.raises(DimensionError):
        ensemble_from_isometry(StiefelPoint(np.eye(3, dtype=complex)), spec)


def test_frozen_qubit_extrema(rho31, pauli_x, pauli_z):
    assert oracle_min(rho31, pauli_x, FAST).value == pytest.approx(0.25, abs=1e-6)
    assert oracle_min(rho31, pauli_z, FAST).value == pytest.approx(0.0, abs=1e-8)
    assert oracle_max(rho31, pauli_z, FAST).value == pytest.approx(0.75, abs=1e-6)


def test_bitwise_determinism(rho31, pauli_x):
    r1 = oracle_min(rho31, pauli_x, FAST)
    r2 = oracle_min(rho31, pauli_x, FAST)
    assert r1.value == r2.value
    assert r1.best_restart_seed == r2.best_restart_seed
    assert r1.lowest_value_seen == r2.lowest_value_seen
    assert np.array_equal(r1.ensemble.states, r2.ensemble.states)


def test_matches_closed_form_on_sweep():
    for _, _, _, rho, h in iter_cases(7, 10, [2, 3]):
        rep = qfi(rho, h)
        var = variance(rho, h)
        rmin = oracle_min(rho, h, FAST)
        rmax = oracle_max(rho, h, FAST)
        assert abs(rmin.value - rep.I) < 1e-6
        assert abs(rmax.value - var) < 1e-6
        assert mixture_deviation(rmin.ensemble, rho) < 1e-10
        assert mixture_deviation(rmax.ensemble, rho) < 1e-10
        # every ensemble evaluated anywhere in the search obeys the roof bounds
        assert rmin.lowest_value_seen >= rep.I - 1e-9
        assert rmax.highest_value_seen <= var + 1e-9


def test_oversized_ensemble_still_attains_minimum(rho31, pauli_x):
    config = OracleConfig(restarts=16, seed=2, ensemble_size=3)
    res = oracle_min(rho31, pauli_x, config)
    assert res.value == pytest.approx(0.25, abs=1e-6)
    assert res.ensemble.size <= 3


def test_ensemble_size_below_rank_rejected(rho31, pauli_x):
    with pytest.raises(ValidationError):
        oracle_min(rho31, pauli_x, OracleConfig(ensemble_size=1))


def test_diagnostics_populated(rho31, pauli_x):
    res = oracle_min(rho31, pauli_x, FAST)
    assert res.restarts_used == 16
    assert 0 <= res.best_restart_seed < 16
    assert res.iterations_used >= 1
    assert res.lowest_value_seen <= res.value <= res.highest_value_seen


def test_dimension_mismatch(rho31):
    with pytest.raises(DimensionError):
        oracle_min(rho31, Observable(np.eye(3, dtype=complex)), FAST)


def test_pure_state_extrema_coincide():
    psi = np.array([0.6, 0.8], dtype=complex)
    rho = DensityMatrix(np.outer(psi, psi))
    h = Observable(SX)
    var = variance(rho, h)
    assert oracle_min(rho, h, FAST).value == pytest.approx(var, abs=1e-9)
    assert oracle_max(rho, h, FAST).value == pytest.approx(var, abs=1e-9)
