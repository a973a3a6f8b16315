"""Validated Hermitian-matrix foundation.

Everything downstream (Fisher information, ensemble constructions, SLD) leans
on the guarantees established here: certified density matrices, deterministic
spectral decompositions, and an explicit numerical support cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-10
TOL_UNITARY = 1e-12


class ValidationError(ValueError):
    """An input failed a structural or numerical-tolerance check."""


class HermiticityError(ValidationError):
    pass


class TraceError(ValidationError):
    pass


class PositivityError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


def as_complex_matrix(entries) -> np.ndarray:
    """Coerce input to a square, finite complex128 array (always a copy)."""
    m = np.array(entries, dtype=np.complex128, order="C")
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValidationError("matrix entries must be finite")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian matrix, certified within ``tol_herm`` at construction."""

    matrix: np.ndarray
    tol_herm: float = TOL_HERM

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        defect = hermiticity_defect(m)
        if defect > self.tol_herm:
            raise HermiticityError(
                f"not Hermitian: max |A - A^dagger| = {defect:.6e} exceeds {self.tol_herm:.1e}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A matrix certified Hermitian, unit trace, and positive semidefinite.

    The measured trace deviation and smallest eigenvalue are kept on the
    instance so callers can report how close to the boundary the input sat.
    """

    matrix: np.ndarray
    tol_herm: float = TOL_HERM
    tol_trace: float = TOL_TRACE
    tol_psd: float = TOL_PSD
    trace_deviation: float = field(init=False)
    eigenvalue_floor: float = field(init=False)

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        defect = hermiticity_defect(m)
        if defect > self.tol_herm:
            raise HermiticityError(
                f"not Hermitian: max |A - A^dagger| = {defect:.6e} exceeds {self.tol_herm:.1e}"
            )
        tdev = abs(complex(np.trace(m)) - 1.0)
        if tdev > self.tol_trace:
            raise TraceError(f"trace deviates from 1 by {tdev:.6e}, tolerance {self.tol_trace:.1e}")
        floor = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
        if floor < -self.tol_psd:
            raise PositivityError(
                f"smallest eigenvalue {floor:.6e} is below -{self.tol_psd:.1e}"
            )
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "trace_deviation", tdev)
        object.__setattr__(self, "eigenvalue_floor", floor)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def validate_density(matrix, tol_herm=TOL_HERM, tol_trace=TOL_TRACE, tol_psd=TOL_PSD) -> DensityMatrix:
    """Certify a raw matrix as a density matrix, with adjustable tolerances."""
    return DensityMatrix(matrix, tol_herm=tol_herm, tol_trace=tol_trace, tol_psd=tol_psd)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix with a fixed deterministic gauge.

    Eigenvalues are sorted in descending order; each eigenvector is rotated so
    its largest-magnitude component (lowest index on ties) is real positive.
    ``support`` lists the indices with eigenvalue strictly above ``eps_rank``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    support: np.ndarray
    rank: int
    eps_rank: float

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def supported_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.support]

    def supported_vectors(self) -> np.ndarray:
        return self.eigenvectors[:, self.support]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def default_eps_rank(dim: int, eigenvalues: np.ndarray) -> float:
    scale = float(np.abs(eigenvalues).max()) if eigenvalues.size else 0.0
    return dim * np.finfo(np.float64).eps * scale


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its largest component is real positive."""
    idx = int(np.argmax(np.abs(vec)))
    pivot = vec[idx]
    mag = abs(pivot)
    if mag == 0.0:
        return vec
    return vec * (pivot.conjugate() / mag)


def _sorted_eigh(m: np.ndarray):
    """Descending eigenvalues plus phase-fixed eigenvector columns."""
    w, v = np.linalg.eigh(m)
    w = np.ascontiguousarray(w[::-1])
    v = np.ascontiguousarray(v[:, ::-1])
    for k in range(v.shape[1]):
        v[:, k] = fix_phase(v[:, k])
    return w, v


def eigh(A, eps_rank: float | None = None) -> SpectralDecomposition:
    """Spectral decomposition of an Observable, DensityMatrix, or raw matrix."""
    if isinstance(A, (Observable, DensityMatrix)):
        m = A.matrix
    else:
        m = as_complex_matrix(A)
        defect = hermiticity_defect(m)
        if defect > TOL_HERM:
            raise HermiticityError(
                f"not Hermitian: max |A - A^dagger| = {defect:.6e} exceeds {TOL_HERM:.1e}"
            )
    w, v = _sorted_eigh(m)
    if eps_rank is None:
        eps_rank = default_eps_rank(m.shape[0], w)
    support = np.flatnonzero(w > eps_rank)
    return SpectralDecomposition(
        eigenvalues=w,
        eigenvectors=v,
        support=support,
        rank=int(support.size),
        eps_rank=float(eps_rank),
    )


def expectation(rho: DensityMatrix, H: Observable) -> float:
    """Tr(rho H), guaranteed real for valid inputs."""
    if rho.dim != H.dim:
        raise DimensionError(f"dimension mismatch: state is {rho.dim}, observable is {H.dim}")
    t = complex(np.trace(rho.matrix @ H.matrix))
    if abs(t.imag) > 1e-12:
        raise ValidationError(f"expectation value has imaginary part {t.imag:.3e}")
    return t.real
