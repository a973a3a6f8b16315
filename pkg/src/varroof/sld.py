"""Symmetric logarithmic derivative and the classical/quantum Fisher split.

A state family is a black-box map theta -> density matrix.  Central finite
differences give the derivative, the SLD follows in the eigenbasis of the
state, and the total Fisher information Tr(rho L^2) splits into a classical
part from eigenvalue drift plus the Fisher information of an effective
Hamiltonian built from the eigenvector motion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hermitian import (
    DensityMatrix,
    Observable,
    ValidationError,
    eigh,
    hermiticity_defect,
    validate_density,
)
from .qfi import qfi

RHO_DOT_TOL = 1e-8
SLD_RESIDUAL_TOL = 1e-8
HERMITIZE_TOL = 1e-6
DEGENERACY_GAP = 1e-10
PAIRING_OVERLAP_FLOOR = 0.5
DECOMPOSITION_TOL = 1e-5


class DegeneracyError(ValidationError):
    """The state family hit an eigenvalue degeneracy or crossing that the
    finite-difference eigenvector pairing cannot resolve."""


@dataclass(frozen=True)
class ParametrizedFamily:
    """Black-box state family with its finite-difference step size."""

    evaluator: Callable[[float], object]
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.fd_step <= 0.0:
            raise ValidationError("fd_step must be positive")

    def density(self, theta: float) -> DensityMatrix:
        out = self.evaluator(theta)
        if isinstance(out, DensityMatrix):
            return out
        return validate_density(out)


@dataclass(frozen=True, eq=False)
class SldDecomposition:
    F_total: float
    F_classical: float
    F_quantum: float
    H_theta: Observable
    L_theta: Observable


def _check_rho_dot(d: np.ndarray) -> np.ndarray:
    defect = hermiticity_defect(d)
    if defect > RHO_DOT_TOL:
        raise ValidationError(f"state derivative is not Hermitian: defect {defect:.3e}")
    tr = abs(complex(np.trace(d)))
    if tr > RHO_DOT_TOL:
        raise ValidationError(f"state derivative is not traceless: |trace| = {tr:.3e}")
    return d


def rho_dot(family: ParametrizedFamily, theta: float) -> np.ndarray:
    """Central-difference derivative of the family at theta."""
    h = family.fd_step
    plus = family.density(theta + h)
    minus = family.density(theta - h)
    if plus.dim != minus.dim:
        raise ValidationError("family dimension changed between evaluations")
    return _check_rho_dot((plus.matrix - minus.matrix) / (2.0 * h))


def sld(rho: DensityMatrix, rho_dot_matrix: np.ndarray) -> Observable:
    """Solve L rho + rho L = 2 rho_dot on the support of rho.

    Matrix elements between kernel eigenvectors are set to zero; the residual
    on all support-touching blocks is verified to be small.
    """
    d = _check_rho_dot(np.asarray(rho_dot_matrix, dtype=np.complex128))
    if d.shape != rho.matrix.shape:
        raise ValidationError(
            f"derivative shape {d.shape} does not match state shape {rho.matrix.shape}"
        )
    d = (d + d.conj().T) / 2.0
    spec = eigh(rho)
    lam = np.maximum(spec.eigenvalues, 0.0)
    v = spec.eigenvectors
    d_eig = v.conj().T @ d @ v
    pair_sum = lam[:, None] + lam[None, :]
    live = pair_sum > spec.eps_rank
    l_eig = np.where(live, 2.0 * d_eig / np.where(live, pair_sum, 1.0), 0.0)
    l = v @ l_eig @ v.conj().T

    residual = l @ rho.matrix + rho.matrix @ l - 2.0 * d
    vr = spec.supported_vectors()
    proj = vr @ vr.conj().T
    comp = np.eye(rho.dim) - proj
    residual_support = residual - comp @ residual @ comp
    worst = float(np.abs(residual_support).max())
    if worst > SLD_RESIDUAL_TOL:
        raise ValidationError(f"SLD residual {worst:.3e} exceeds {SLD_RESIDUAL_TOL:.1e}")
    return Observable(l)


def qfi_theta(family: ParametrizedFamily, theta: float) -> float:
    """Parametric Fisher information Tr(rho L^2) at theta."""
    rho = family.density(theta)
    l = sld(rho, rho_dot(family, theta)).matrix
    return float(np.trace(rho.matrix @ l @ l).real)


def _pair_and_gauge(v0: np.ndarray, side: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Match eigenvectors of a neighboring spectrum to the reference basis.

    Returns (permuted eigenvalue indices, gauge-fixed vectors).  Each column k
    of the result is the side eigenvector with the largest overlap against
    reference column k, re-phased so that overlap is real positive.
    """
    overlap = v0.conj().T @ side
    weight = np.abs(overlap) ** 2
    match = np.argmax(weight, axis=1)
    if len(set(match.tolist())) != match.size:
        raise DegeneracyError("eigenvector pairing is not one-to-one across the step")
    chosen = weight[np.arange(match.size), match]
    if np.any(chosen <= PAIRING_OVERLAP_FLOOR):
        raise DegeneracyError(
            f"eigenvector overlap dropped to {float(chosen.min()):.3f}; "
            "eigenvalues cross or collide within the step"
        )
    z = overlap[np.arange(match.size), match]
    gauged = side[:, match] * (z.conjugate() / np.abs(z))[None, :]
    return match, gauged


def _eigensystem_derivatives(family: ParametrizedFamily, theta: float):
    """Eigenvalues, eigenvalue derivatives, gauge-fixed eigenvector basis and
    its derivative at theta, plus the spectrum there.  Shared by decompose and
    the gauge-invariance tests."""
    h = family.fd_step
    minus = family.density(theta - h)
    center = family.density(theta)
    plus = family.density(theta + h)
    if not (minus.dim == center.dim == plus.dim):
        raise ValidationError("family dimension changed between evaluations")

    s0 = eigh(center)
    gaps = np.abs(np.diff(s0.eigenvalues))
    if s0.dim > 1 and float(gaps.min()) < DEGENERACY_GAP:
        raise DegeneracyError(
            f"eigenvalue gap {float(gaps.min()):.3e} at theta is below {DEGENERACY_GAP:.1e}"
        )
    sp = eigh(plus)
    sm = eigh(minus)
    match_p, vp = _pair_and_gauge(s0.eigenvectors, sp.eigenvectors)
    match_m, vm = _pair_and_gauge(s0.eigenvectors, sm.eigenvectors)

    lam_dot = (sp.eigenvalues[match_p] - sm.eigenvalues[match_m]) / (2.0 * h)
    v_dot = (vp - vm) / (2.0 * h)
    rho_dot_mat = _check_rho_dot((plus.matrix - minus.matrix) / (2.0 * h))
    return s0, center, lam_dot, v_dot, rho_dot_mat


def decompose(
    family: ParametrizedFamily, theta: float, decomposition_tol: float = DECOMPOSITION_TOL
) -> SldDecomposition:
    """Split the parametric Fisher information into classical and quantum parts.

    The classical part sums eigenvalue-drift terms over the support; the
    quantum part is the Fisher information of the effective Hamiltonian
    i sum_k |psi_k-dot><psi_k| assembled from eigenvector motion.  Their sum
    is checked against Tr(rho L^2) within the (finite-difference limited)
    relative tolerance.  Uses at most five evaluator calls.
    """
    s0, center, lam_dot, v_dot, rho_dot_mat = _eigensystem_derivatives(family, theta)

    l = sld(center, rho_dot_mat).matrix
    f_total = float(np.trace(center.matrix @ l @ l).real)

    h_raw = 1j * (v_dot @ s0.eigenvectors.conj().T)
    asym = hermiticity_defect(h_raw)
    if asym > HERMITIZE_TOL:
        raise ValidationError(
            f"effective Hamiltonian asymmetry {asym:.3e} exceeds {HERMITIZE_TOL:.1e}"
        )
    h_theta = Observable((h_raw + h_raw.conj().T) / 2.0)

    lam_sup = s0.supported_eigenvalues()
    f_classical = float(np.sum(lam_dot[s0.support] ** 2 / lam_sup))
    f_quantum = qfi(center, h_theta).F

    gap = abs(f_total - (f_classical + f_quantum))
    if gap > decomposition_tol * max(1.0, abs(f_total)):
        raise ValidationError(
            f"Fisher split misses the total by {gap:.3e} "
            f"(total {f_total:.6e}, classical {f_classical:.6e}, quantum {f_quantum:.6e})"
        )
    return SldDecomposition(
        F_total=f_total,
        F_classical=f_classical,
        F_quantum=f_quantum,
        H_theta=h_theta,
        L_theta=Observable(l),
    )


def _expm_generator(g: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i g theta) for Hermitian g, via its eigensystem."""
    w, v = np.linalg.eigh(g)
    return (v * np.exp(-1j * w * theta)) @ v.conj().T


def named_family(name: str, bloch_r: float = 0.5, fd_step: float = 1e-5) -> ParametrizedFamily:
    """Built-in families for the command line.

    unitary          qubit with Bloch radius ``bloch_r`` along x, rotated
                     about z by the generator sigma_z / 2
    linear-classical diag(theta, 1 - theta), valid for theta in (0, 1)
    constant         frozen diag((1 + bloch_r)/2, (1 - bloch_r)/2)
    """
    if not 0.0 <= bloch_r <= 1.0:
        raise ValidationError(f"Bloch radius must sit in [0, 1], got {bloch_r}")
    if name == "unitary":
        rho0 = np.array([[0.5, bloch_r / 2.0], [bloch_r / 2.0, 0.5]], dtype=np.complex128)
        gen = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=np.complex128)

        def evaluate(theta: float) -> np.ndarray:
            u = _expm_generator(gen, theta)
            return u @ rho0 @ u.conj().T

        return ParametrizedFamily(evaluate, fd_step)
    if name == "linear-classical":
        def evaluate(theta: float) -> np.ndarray:
            return np.array([[theta, 0.0], [0.0, 1.0 - theta]], dtype=np.complex128)

        return ParametrizedFamily(evaluate, fd_step)
    if name == "constant":
        frozen = np.array(
            [[(1.0 + bloch_r) / 2.0, 0.0], [0.0, (1.0 - bloch_r) / 2.0]], dtype=np.complex128
        )

        def evaluate(theta: float) -> np.ndarray:
            return frozen

        return ParametrizedFamily(evaluate, fd_step)
    raise ValidationError(f"unknown family {name!r}; choose unitary, linear-classical or constant")
