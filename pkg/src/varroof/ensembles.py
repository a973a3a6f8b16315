"""Extremal pure-state ensembles of a density matrix.

Two closed-form constructions: the ensemble whose averaged variance of a
given observable is minimal (it equals a quarter of the quantum Fisher
information), and the ensemble whose averaged variance is maximal (it equals
the full variance of the state).  Both use at most rank-many members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hermitian import (
    DensityMatrix,
    DimensionError,
    Observable,
    ValidationError,
    as_complex_matrix,
    eigh,
    fix_phase,
    hermiticity_defect,
    _sorted_eigh,
)
from .qfi import build_YH

WEIGHT_SUM_TOL = 1e-10
STATE_NORM_TOL = 1e-12
DROPPED_MASS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    """Weighted pure states, stored as rows of ``states``.

    Weights must be positive and sum to one; states must be unit vectors.
    Builders in this module report members in decreasing weight order with
    each state's largest component rotated real positive.
    """

    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        s = np.asarray(self.states, dtype=np.complex128)
        if w.ndim != 1 or s.ndim != 2 or w.shape[0] != s.shape[0] or w.shape[0] < 1:
            raise DimensionError(
                f"weights shape {w.shape} does not match states shape {s.shape}"
            )
        if np.any(w <= 0.0):
            raise ValidationError("ensemble weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"ensemble weights sum to {w.sum()!r}, expected 1")
        norms = np.linalg.norm(s, axis=1)
        worst = float(np.abs(norms - 1.0).max())
        if worst > STATE_NORM_TOL:
            raise ValidationError(f"ensemble state norm deviates from 1 by {worst:.3e}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def mixture(self) -> np.ndarray:
        """The density matrix this ensemble decomposes."""
        return (self.states.T * self.weights) @ self.states.conj()


@dataclass(frozen=True, eq=False)
class GammaSet:
    """Companion operators of the variance-minimizing ensemble.

    Orthogonal under the trace inner product with squared norms equal to the
    ensemble weights; their weighted sum against ``alphas`` reproduces Z_H.
    """

    operators: np.ndarray
    weights: np.ndarray
    alphas: np.ndarray


def mixture_deviation(ensemble: PureEnsemble, rho: DensityMatrix) -> float:
    return float(np.abs(ensemble.mixture() - rho.matrix).max())


def averaged_variance(ensemble: PureEnsemble, H: Observable) -> float:
    """Weighted mean of the member variances: Tr(rho H^2) minus the weighted
    sum of squared member expectations."""
    if ensemble.dim != H.dim:
        raise DimensionError(
            f"dimension mismatch: ensemble is {ensemble.dim}, observable is {H.dim}"
        )
    hs = ensemble.states @ H.matrix.T
    member_second = np.einsum("kd,kd->k", hs.conj(), hs).real
    member_mean = np.einsum("kd,kd->k", ensemble.states.conj(), hs).real
    return float(np.sum(ensemble.weights * (member_second - member_mean**2)))


def _finalize_members(weights: np.ndarray, states: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decreasing-weight order (stable) and the real-positive phase gauge.

    Returns the applied permutation as well so companion data can follow.
    """
    order = np.argsort(-weights, kind="stable")
    weights = weights[order]
    states = states[order].copy()
    for k in range(states.shape[0]):
        states[k] = fix_phase(states[k])
    return weights, states, order


def minimal_ensemble(
    rho: DensityMatrix, H: Observable, eps_rank: float | None = None
) -> tuple[PureEnsemble, GammaSet]:
    """Pure-state ensemble of rho attaining the smallest averaged variance.

    Diagonalizing Y_H gives rank-many members; the companion GammaSet carries
    the trace-orthogonal operators that certify optimality.
    """
    spec = eigh(rho, eps_rank=eps_rank)
    lam = spec.supported_eigenvalues()
    vr = spec.supported_vectors()
    r = spec.rank

    y = build_YH(spec, H).matrix
    alphas, yvec = _sorted_eigh(y)
    u_rows = yvec.T  # row k holds eigenvector k over the support basis

    weights = (np.abs(u_rows) ** 2) @ lam
    amps = u_rows * np.sqrt(lam)[None, :]
    states = (amps @ vr.T) / np.sqrt(weights)[:, None]

    pair_mean = np.sqrt((lam[:, None] + lam[None, :]) / 2.0)
    gammas = np.empty((r, spec.dim, spec.dim), dtype=np.complex128)
    for k in range(r):
        block = np.outer(u_rows[k], u_rows[k].conj()) * pair_mean
        gammas[k] = vr @ block @ vr.conj().T

    keep = weights > spec.eps_rank
    dropped = float(weights[~keep].sum())
    if dropped > DROPPED_MASS_TOL:
        raise ValidationError(f"dropped ensemble mass {dropped:.3e} exceeds {DROPPED_MASS_TOL:.1e}")
    weights, states, alphas, gammas = weights[keep], states[keep], alphas[keep], gammas[keep]

    weights, states, order = _finalize_members(weights, states)
    return (
        PureEnsemble(weights, states),
        GammaSet(operators=gammas[order], weights=weights, alphas=alphas[order]),
    )


def zero_diagonal_basis(X, zero_tol: float | None = None) -> np.ndarray:
    """Unitary V such that V^dagger X V has (numerically) zero diagonal.

    X must be Hermitian and traceless.  Each step picks the largest-magnitude
    diagonal entry and an opposite-signed partner, then applies one complex
    Givens rotation whose phase makes the coupling real and whose angle, a
    root of the resulting quadratic in tan, zeroes that entry exactly.  The
    zeroed index leaves the active set, so at most n - 1 rotations run.
    """
    if isinstance(X, Observable):
        a = X.matrix.copy()
    else:
        a = as_complex_matrix(X)
        defect = hermiticity_defect(a)
        if defect > 1e-10:
            raise ValidationError(f"matrix is not Hermitian: defect {defect:.3e}")
    n = a.shape[0]
    scale = float(np.abs(a).max())
    v = np.eye(n, dtype=np.complex128)
    if scale == 0.0:
        return v
    tr = abs(complex(np.trace(a)))
    if tr > 1e-10 * scale:
        raise ValidationError(f"matrix is not traceless: |trace| = {tr:.3e} with norm {scale:.3e}")
    if zero_tol is None:
        zero_tol = 1e-13 * scale

    active = list(range(n))
    while len(active) > 1:
        diag = a[active, active].real
        p_pos = int(np.argmax(np.abs(diag)))
        if abs(diag[p_pos]) <= zero_tol:
            break
        if diag[p_pos] > 0.0:
            q_pos = int(np.argmin(diag))
        else:
            q_pos = int(np.argmax(diag))
        p, q = active[p_pos], active[q_pos]
        aa, bb = float(diag[p_pos]), float(diag[q_pos])
        z = complex(a[p, q])
        mag = abs(z)
        u = z / mag if mag > 0.0 else 1.0 + 0.0j
        if abs(bb) < 1e-300:
            # opposite-signed partner vanished; only reachable when everything
            # left is at roundoff scale
            break
        disc = max(mag * mag - aa * bb, 0.0)
        root = np.sqrt(disc)
        t1 = (-mag + root) / bb
        t2 = (-mag - root) / bb
        t = t1 if abs(t1) <= abs(t2) else t2
        theta = np.arctan(t)
        c, s = float(np.cos(theta)), float(np.sin(theta))
        rot = np.array([[c, -s * u], [s * u.conjugate(), c]], dtype=np.complex128)
        cols = [p, q]
        a[:, cols] = a[:, cols] @ rot
        a[cols, :] = rot.conj().T @ a[cols, :]
        v[:, cols] = v[:, cols] @ rot
        a[p, p] = 0.0  # zero by construction
        active.pop(p_pos)
    return v


def maximal_ensemble(rho: DensityMatrix, H: Observable, eps_rank: float | None = None) -> PureEnsemble:
    """Pure-state ensemble of rho attaining the largest averaged variance.

    Built from a basis in which sqrt(rho) H sqrt(rho) - rho Tr(rho H) has zero
    diagonal; every member then shares the global mean of H, so the averaged
    variance equals the variance of the state itself.
    """
    if rho.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {rho.dim}, observable is {H.dim}")
    spec = eigh(rho, eps_rank=eps_rank)
    lam = spec.supported_eigenvalues()
    vr = spec.supported_vectors()

    h_sup = vr.conj().T @ H.matrix @ vr
    # the support-restricted mean keeps X exactly traceless
    mean = float(np.sum(lam * h_sup.diagonal().real) / lam.sum())
    sq = np.sqrt(lam)
    x = (sq[:, None] * sq[None, :]) * h_sup - np.diag(lam * mean)
    x = (x + x.conj().T) / 2.0
    # remove the rounding residue of the analytically zero trace; without
    # this a near-zero X (rank 1, or H close to a multiple of the identity
    # on the support) fails the traceless gate on noise alone
    r = lam.size
    x -= np.eye(r) * (np.trace(x).real / r)

    basis = zero_diagonal_basis(x)
    weights = lam @ (np.abs(basis) ** 2)
    amps = basis * sq[:, None]
    states = (vr @ amps).T / np.sqrt(weights)[:, None]

    keep = weights > spec.eps_rank
    dropped = float(weights[~keep].sum())
    if dropped > DROPPED_MASS_TOL:
        raise ValidationError(f"dropped ensemble mass {dropped:.3e} exceeds {DROPPED_MASS_TOL:.1e}")
    weights, states = weights[keep], states[keep]

    weights, states, _ = _finalize_members(weights, states)
    return PureEnsemble(weights, states)
