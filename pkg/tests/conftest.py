import json

import numpy as np
import pytest

from varroof import DensityMatrix, Observable

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@pytest.fixture
def rho31() -> DensityMatrix:
    """diag(3/4, 1/4), the worked qubit example used throughout."""
    return DensityMatrix(np.diag([0.75, 0.25]).astype(complex))


@pytest.fixture
def pauli_x() -> Observable:
    return Observable(SX)


@pytest.fixture
def pauli_z() -> Observable:
    return Observable(SZ)


def matrix_pairs(m) -> list:
    """Encode a complex matrix as nested [re, im] pairs for problem files."""
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def write_problem(path, rho, h, **extra) -> str:
    doc = {"dim": int(np.asarray(rho).shape[0]), "rho": matrix_pairs(rho), "H": matrix_pairs(h)}
    doc.update(extra)
    path.write_text(json.dumps(doc))
    return str(path)
