"""Brute-force verification of the extremal averaged variances.

Every size-m pure-state ensemble of rho corresponds to a point on the Stiefel
manifold of m x rank isometries.  The oracle draws Haar-random starting
points and refines each with the kernel's Givens coordinate descent, keeping
the best restart.  Its minima and maxima should reproduce the closed-form
roof values without using any of that structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .ensembles import PureEnsemble, averaged_variance, _finalize_members
from .hermitian import (
    DensityMatrix,
    DimensionError,
    Observable,
    SpectralDecomposition,
    ValidationError,
    eigh,
)

ORTHONORMALITY_TOL = 1e-12
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """An m x r complex matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if w.ndim != 2 or w.shape[0] < w.shape[1] or w.shape[1] < 1:
            raise DimensionError(f"expected an m x r matrix with m >= r >= 1, got {w.shape}")
        gram = w.conj().T @ w
        defect = float(np.abs(gram - np.eye(w.shape[1])).max())
        if defect > ORTHONORMALITY_TOL:
            raise ValidationError(f"columns are not orthonormal: defect {defect:.3e}")
        object.__setattr__(self, "matrix", w)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class OracleConfig:
    """Optimizer settings.  ensemble_size defaults to the state's rank."""

    restarts: int = 64
    max_iterations: int = 2000
    convergence_tol: float = 1e-10
    ensemble_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.convergence_tol <= 0.0:
            raise ValidationError("convergence_tol must be positive")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValidationError("ensemble_size must be at least 1")


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Best value found, the ensemble attaining it, and search diagnostics.

    ``lowest_value_seen`` / ``highest_value_seen`` bound the averaged variance
    of every ensemble evaluated during all line searches of all restarts.
    """

    value: float
    ensemble: PureEnsemble
    iterations_used: int
    restarts_used: int
    best_restart_seed: int
    lowest_value_seen: float
    highest_value_seen: float


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Stream for restart ``index``: PCG64 keyed by SeedSequence([seed, index])."""
    return np.random.default_rng(np.random.SeedSequence([seed & _MASK64, index]))


def haar_random_stiefel(m: int, r: int, rng: np.random.Generator) -> StiefelPoint:
    """Haar-distributed m x r isometry via QR of a complex Ginibre draw."""
    if m < r or r < 1:
        raise DimensionError(f"need m >= r >= 1, got m={m}, r={r}")
    z = (rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))) / np.sqrt(2.0)
    q, rmat = np.linalg.qr(z)
    d = np.diagonal(rmat).copy()
    d[d == 0] = 1.0
    q = q * (d / np.abs(d))
    return StiefelPoint(q)


def ensemble_from_isometry(W: StiefelPoint, spec: SpectralDecomposition) -> PureEnsemble:
    """Members |v_k> = sum_a W_ka sqrt(la) |psi_a> with weights <v_k|v_k>."""
    if W.cols != spec.rank:
        raise DimensionError(
            f"isometry has {W.cols} columns but the state support has size {spec.rank}"
        )
    lam = spec.supported_eigenvalues()
    vr = spec.supported_vectors()
    amps = W.matrix * np.sqrt(lam)[None, :]
    weights = (np.abs(W.matrix) ** 2) @ lam
    keep = weights > 1e-14
    dropped = float(weights[~keep].sum())
    if dropped > 1e-10:
        raise ValidationError(f"dropped ensemble mass {dropped:.3e} exceeds 1e-10")
    states = (amps[keep] @ vr.T) / np.sqrt(weights[keep])[:, None]
    weights, states, _ = _finalize_members(weights[keep], states)
    return PureEnsemble(weights, states)


def _run_oracle(rho: DensityMatrix, H: Observable, config: OracleConfig, direction: float) -> OracleResult:
    if rho.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {rho.dim}, observable is {H.dim}")
    spec = eigh(rho)
    r = spec.rank
    m = config.ensemble_size if config.ensemble_size is not None else r
    if m < r:
        raise ValidationError(
            f"ensemble_size {m} is below the state rank {r}; no such decomposition exists"
        )
    lam = spec.supported_eigenvalues()
    vr = spec.supported_vectors()
    h_sup = vr.conj().T @ H.matrix @ vr
    # The kernel forms M = W B W^dag with the row of W unconjugated on the
    # left, so M_kk is the expectation in the conjugated member.  Feeding the
    # transposed coefficient matrix (elementwise conj of a Hermitian B) makes
    # M_kk equal <v_k|H|v_k> for the ensemble actually built from W.
    b = np.sqrt(np.outer(lam, lam)) * h_sup.conj()
    hm = H.matrix
    tr_h2 = float(np.trace(rho.matrix @ hm @ hm).real)

    best_value = None
    best_w = None
    best_sweeps = 0
    best_index = 0
    low_seen = np.inf
    high_seen = -np.inf
    for index in range(config.restarts):
        rng = restart_rng(config.seed, index)
        w = np.ascontiguousarray(haar_random_stiefel(m, r, rng).matrix)
        value, sweeps, low, high = kernels.refine_isometry(
            w, b, lam, tr_h2, direction, config.max_iterations, config.convergence_tol
        )
        low_seen = min(low_seen, low)
        high_seen = max(high_seen, high)
        better = best_value is None or (
            value < best_value if direction > 0 else value > best_value
        )
        if better:
            best_value = value
            best_w = w
            best_sweeps = sweeps
            best_index = index

    ensemble = ensemble_from_isometry(StiefelPoint(best_w), spec)
    value = averaged_variance(ensemble, H)
    low_seen = min(low_seen, value)
    high_seen = max(high_seen, value)
    return OracleResult(
        value=value,
        ensemble=ensemble,
        iterations_used=best_sweeps,
        restarts_used=config.restarts,
        best_restart_seed=best_index,
        lowest_value_seen=float(low_seen),
        highest_value_seen=float(high_seen),
    )


def oracle_min(rho: DensityMatrix, H: Observable, config: OracleConfig | None = None) -> OracleResult:
    """Numerically minimize the averaged variance over pure-state ensembles."""
    return _run_oracle(rho, H, config or OracleConfig(), 1.0)


def oracle_max(rho: DensityMatrix, H: Observable, config: OracleConfig | None = None) -> OracleResult:
    """Numerically maximize the averaged variance over pure-state ensembles."""
    return _run_oracle(rho, H, config or OracleConfig(), -1.0)
