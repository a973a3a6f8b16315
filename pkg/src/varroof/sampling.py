"""Seeded random problem instances, shared by the test sweeps and the CLI
self-check.  All draws go through numpy's PCG64 so a seed pins every case."""

from __future__ import annotations

import numpy as np

from .hermitian import DensityMatrix, Observable


def case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & ((1 << 64) - 1), index]))


def random_hermitian(dim: int, rng: np.random.Generator) -> Observable:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Observable((a + a.conj().T) / 2.0)


def random_density_matrix(dim: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Rank-controlled state from a complex Ginibre factor."""
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2.0
    m /= np.trace(m).real
    return DensityMatrix(m)


def iter_cases(seed: int, count: int, dims: list[int]):
    """Yield (index, dim, rank, rho, H) cycling through every (dim, rank) pair."""
    combos = [(d, r) for d in dims for r in range(1, d + 1)]
    for index in range(count):
        dim, rank = combos[index % len(combos)]
        rng = case_rng(seed, index)
        rho = random_density_matrix(dim, rank, rng)
        h = random_hermitian(dim, rng)
        yield index, dim, rank, rho, h
