"""Quantum Fisher information of an observable in a mixed state.

Also builds the two auxiliary operators behind the extremal ensemble
constructions: the full-space operator Z_H whose squared trace turns the
Fisher information into a moment identity, and the support-space operator Y_H
whose eigensystem generates the variance-minimizing ensemble.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import (
    DensityMatrix,
    DimensionError,
    Observable,
    SpectralDecomposition,
    ValidationError,
    eigh,
    expectation,
)

VARIANCE_CLAMP = 1e-12
IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class QfiReport:
    """Fisher information F, its quarter I, the variance, and F recomputed
    through the Z_H trace identity as an internal cross-check."""

    F: float
    I: float
    variance: float
    F_via_Z: float

    def __post_init__(self):
        if not (-IDENTITY_TOL <= self.F <= 4.0 * self.variance + IDENTITY_TOL):
            raise ValidationError(
                f"Fisher information {self.F:.6e} escapes [0, 4 variance] "
                f"with variance {self.variance:.6e}"
            )
        if abs(self.F - self.F_via_Z) > IDENTITY_TOL * max(1.0, abs(self.F)):
            raise ValidationError(
                f"Fisher information {self.F:.6e} disagrees with trace-identity "
                f"value {self.F_via_Z:.6e}"
            )


def _tr_rho_h2(rho: DensityMatrix, H: Observable) -> float:
    hm = H.matrix
    return float(np.trace(rho.matrix @ hm @ hm).real)


def variance(rho: DensityMatrix, H: Observable) -> float:
    """Tr(rho H^2) - Tr(rho H)^2, clamped to zero just below the origin."""
    v = _tr_rho_h2(rho, H) - expectation(rho, H) ** 2
    if -VARIANCE_CLAMP <= v < 0.0:
        v = 0.0
    return v


def build_ZH(spec: SpectralDecomposition, H: Observable) -> Observable:
    """Full-space operator with entries sqrt(2 la lb / (la + lb)) H_ab over the
    support, zero elsewhere, expressed back in the computational basis."""
    if spec.rank == 0:
        raise ValidationError("state has empty support")
    if spec.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {spec.dim}, observable is {H.dim}")
    lam = np.maximum(spec.supported_eigenvalues(), 0.0)
    vr = spec.supported_vectors()
    h_sup = vr.conj().T @ H.matrix @ vr
    pair_sum = lam[:, None] + lam[None, :]
    weights = np.sqrt(2.0 * np.outer(lam, lam) / pair_sum)
    return Observable(vr @ (weights * h_sup) @ vr.conj().T)


def build_YH(spec: SpectralDecomposition, H: Observable) -> Observable:
    """Support-basis operator with entries 2 sqrt(la lb)/(la + lb) H_ab.

    Returned in the eigenbasis of the state (descending eigenvalue order), so
    its shape is rank x rank.
    """
    if spec.rank == 0:
        raise ValidationError("state has empty support")
    if spec.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {spec.dim}, observable is {H.dim}")
    lam = np.maximum(spec.supported_eigenvalues(), 0.0)
    vr = spec.supported_vectors()
    h_sup = vr.conj().T @ H.matrix @ vr
    weights = 2.0 * np.sqrt(np.outer(lam, lam)) / (lam[:, None] + lam[None, :])
    return Observable(weights * h_sup)


def qfi(rho: DensityMatrix, H: Observable, eps_rank: float | None = None) -> QfiReport:
    """Quantum Fisher information of H in rho.

    The double sum runs over all eigenvalue pairs with la + lb above the rank
    cutoff, which keeps the support-to-kernel coupling terms and makes the
    Z_H trace identity hold for rank-deficient states.
    """
    if rho.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {rho.dim}, observable is {H.dim}")
    spec = eigh(rho, eps_rank=eps_rank)
    lam = np.maximum(spec.eigenvalues, 0.0)
    h_eig = spec.eigenvectors.conj().T @ H.matrix @ spec.eigenvectors
    pair_sum = lam[:, None] + lam[None, :]
    live = pair_sum > spec.eps_rank
    num = (lam[:, None] - lam[None, :]) ** 2
    ratio = np.where(live, num / np.where(live, pair_sum, 1.0), 0.0)
    f = float(2.0 * np.sum(ratio * np.abs(h_eig) ** 2))

    z = build_ZH(spec, H).matrix
    tr_z2 = float(np.trace(z @ z).real)
    f_via_z = 4.0 * (_tr_rho_h2(rho, H) - tr_z2)
    return QfiReport(F=f, I=f / 4.0, variance=variance(rho, H), F_via_Z=f_via_z)
