"""Dense operator algebra for one to three qubit sites.

Operators are plain ``numpy`` complex arrays of shape ``(2**k, 2**k)``.
Sites are ordinal positions ``0, 1, 2``; in the teleportation setting they
stand for the earlier time ``t_a``, the ancilla ``A`` and the later time
``t_b`` respectively.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ContractViolation, DimensionError, InvalidStateError, SiteIndexError

MAX_SITES = 3


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack used by validity checks.

    ``hermitian`` and ``trace`` bound entrywise/trace round-off, ``psd`` is
    how far below zero an eigenvalue may sit and still count as non-negative,
    ``bloch`` is the slack on ``|r| <= 1``.
    """

    hermitian: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-9
    bloch: float = 1e-9


DEFAULT_TOL = Tolerances()


class PauliLabel(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


PAULI = {
    PauliLabel.I: np.eye(2, dtype=complex),
    PauliLabel.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliLabel.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliLabel.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in PAULI.values():
    _m.setflags(write=False)

I2, X, Y, Z = (PAULI[p] for p in PauliLabel)

PauliString = Union[str, Sequence[Union[str, PauliLabel]]]


def parse_pauli_string(s: PauliString) -> tuple[PauliLabel, ...]:
    """Normalize ``"XZ"``, ``("X", "Z")`` or a label tuple to a label tuple."""
    try:
        labels = tuple(PauliLabel(str(c).upper() if not isinstance(c, PauliLabel) else c) for c in s)
    except ValueError as exc:
        raise ValueError(f"not a Pauli string: {s!r}") from exc
    return labels


def pauli_string_matrix(s: PauliString) -> np.ndarray:
    """Tensor product of the named Pauli matrices, in site order.

    >>> pauli_string_matrix("Z").real
    array([[ 1.,  0.],
           [ 0., -1.]])
    """
    labels = parse_pauli_string(s)
    if not 1 <= len(labels) <= MAX_SITES:
        raise DimensionError(f"Pauli string must have 1..{MAX_SITES} sites, got {len(labels)}")
    return reduce(np.kron, (PAULI[p] for p in labels))


def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def num_sites(m: np.ndarray) -> int:
    dim = m.shape[0]
    k = int(round(np.log2(dim))) if dim > 0 else -1
    if m.ndim != 2 or m.shape[0] != m.shape[1] or k < 1 or 2**k != dim or k > MAX_SITES:
        raise DimensionError(f"expected a square operator of dimension 2, 4 or 8, got shape {m.shape}")
    return k


def as_operator(m) -> np.ndarray:
    """Validate and convert to a finite complex square array of qubit dimension."""
    m = np.asarray(m, dtype=complex)
    num_sites(m)
    if not np.all(np.isfinite(m)):
        raise ContractViolation("operator has non-finite entries")
    return m


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL.hermitian) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def partial_trace(m, discard: Iterable[int]) -> np.ndarray:
    """Trace out the sites listed in ``discard`` and return the remaining operator.

    Remaining sites keep their relative order.
    """
    m = as_operator(m)
    k = num_sites(m)
    discard = sorted(set(discard))
    for s in discard:
        if not 0 <= s < k:
            raise SiteIndexError(f"site {s} out of range for a {k}-site operator")
    if len(discard) == k:
        return np.array([[np.trace(m)]])
    keep = [s for s in range(k) if s not in discard]
    t = m.reshape((2,) * (2 * k))
    # Row indices are letters a.., column indices A..; traced sites share a letter.
    rows = [chr(ord("a") + s) for s in range(k)]
    cols = [rows[s] if s in discard else chr(ord("A") + s) for s in range(k)]
    out = "".join(rows[s] for s in keep) + "".join(cols[s] for s in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)


def eig_hermitian(m, tol: float = DEFAULT_TOL.hermitian) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian operator."""
    m = as_operator(m)
    if not is_hermitian(m, tol):
        raise ContractViolation("eig_hermitian requires a Hermitian operator")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        v = np.array([self.x, self.y, self.z], dtype=float)
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("Bloch vector has non-finite components")
        if float(v @ v) > 1 + DEFAULT_TOL.bloch:
            raise InvalidStateError(f"Bloch vector length {np.sqrt(v @ v):.6g} exceeds 1")

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def bloch_to_density(r) -> np.ndarray:
    """``(I + r_x X + r_y Y + r_z Z) / 2``."""
    if not isinstance(r, BlochVector):
        r = BlochVector.from_array(r)
    return (I2 + r.x * X + r.y * Y + r.z * Z) / 2


def validate_density_matrix(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return ``rho`` as an array, raising ``InvalidStateError`` if it is not a qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DimensionError(f"qubit density matrix must be 2x2, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    if not is_hermitian(rho, tol.hermitian):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol.trace:
        raise InvalidStateError(f"density matrix trace {np.trace(rho).real:.6g} != 1")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol.psd:
        raise InvalidStateError("density matrix has a negative eigenvalue")
    return rho


def density_to_bloch(rho, tol: Tolerances = DEFAULT_TOL) -> BlochVector:
    rho = validate_density_matrix(rho, tol)
    return BlochVector.from_array(bloch_components(rho))


def bloch_components(m) -> np.ndarray:
    """``(tr(X m), tr(Y m), tr(Z m))`` with no validity checks."""
    m = np.asarray(m, dtype=complex)
    return np.array([np.trace(P @ m).real for P in (X, Y, Z)])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_bloch(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform samples from the unit ball; shape ``(3,)`` or ``(size, 3)``."""
    n = 1 if size is None else size
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    v *= rng.random((n, 1)) ** (1 / 3)
    return v[0] if size is None else v
