"""Two-time qubit pseudo-density operators.

A two-time PDO is written in the Pauli basis as

    R = 1/4 * sum_{i,j} c_ij  sigma_i (x) sigma_j

where ``c_ij`` is the expectation of ``sigma_i`` measured at the first time
times ``sigma_j`` measured at the second. Unlike a density matrix, ``R`` may
have negative eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    DimensionError,
    InvalidParameterError,
    NormalizationError,
    SiteIndexError,
)
from .operators import (
    DEFAULT_TOL,
    PAULI,
    I2,
    PauliLabel,
    PauliString,
    as_operator,
    eig_hermitian,
    is_hermitian,
    parse_pauli_string,
    partial_trace,
    pauli_string_matrix,
    validate_density_matrix,
)

_LABELS = tuple(PauliLabel)

# Sign patterns on (XX, YY, ZZ) for the four maximally correlated PDOs.
TEMPORAL_BELL_SIGNS = {
    1: (1, 1, 1),
    2: (1, -1, -1),
    3: (-1, 1, -1),
    4: (-1, -1, 1),
}


@dataclass(frozen=True, eq=False)
class PseudoDensityOperator:
    """Hermitian, unit-trace operator over ordered sites; positivity not required."""

    op: np.ndarray
    sites: tuple[str, ...] = ("a", "b")

    def __post_init__(self):
        op = as_operator(self.op)
        if 2 ** len(self.sites) != op.shape[0]:
            raise DimensionError(f"{len(self.sites)} site labels for an operator of dim {op.shape[0]}")
        if not is_hermitian(op, DEFAULT_TOL.hermitian):
            raise ContractViolation("PDO must be Hermitian")
        if abs(np.trace(op) - 1) > DEFAULT_TOL.trace:
            raise NormalizationError(f"PDO trace {np.trace(op).real:.6g} != 1")
        op = op.copy()
        op.setflags(write=False)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "sites", tuple(self.sites))

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    def coefficient(self, s: PauliString) -> float:
        """Pauli expansion coefficient ``c_s = tr(sigma_s R)``."""
        labels = parse_pauli_string(s)
        if len(labels) != len(self.sites):
            raise DimensionError(f"Pauli string length {len(labels)} != {len(self.sites)} sites")
        return float(np.trace(pauli_string_matrix(labels) @ self.op).real)

    def coefficients(self) -> dict[str, float]:
        return {
            "".join(p.value for p in labels): self.coefficient(labels)
            for labels in product(_LABELS, repeat=len(self.sites))
        }

    def marginal(self, site: int | str) -> np.ndarray:
        """Reduced operator on a single site."""
        idx = self._site_index(site)
        return partial_trace(self.op, [s for s in range(len(self.sites)) if s != idx])

    def eigenvalues(self) -> np.ndarray:
        return eig_hermitian(self.op)

    def allclose(self, other, atol: float = 1e-10) -> bool:
        other_op = other.op if isinstance(other, PseudoDensityOperator) else np.asarray(other)
        return other_op.shape == self.op.shape and bool(np.max(np.abs(self.op - other_op)) <= atol)

    def _site_index(self, site) -> int:
        if isinstance(site, str):
            if site not in self.sites:
                raise SiteIndexError(f"unknown site label {site!r}")
            return self.sites.index(site)
        if not 0 <= site < len(self.sites):
            raise SiteIndexError(f"site {site} out of range")
        return site

    def __repr__(self):
        c = {k: round(v, 6) for k, v in self.coefficients().items() if abs(v) > 1e-12}
        return f"PseudoDensityOperator(sites={self.sites}, coefficients={c})"


def _coefficients_to_op(c: Mapping[PauliString, float]) -> np.ndarray:
    norm = {parse_pauli_string(k): float(v) for k, v in c.items()}
    if any(len(k) != 2 for k in norm):
        raise DimensionError("two-time PDO coefficients must be keyed by length-2 Pauli strings")
    ident = (PauliLabel.I, PauliLabel.I)
    if ident not in norm or abs(norm[ident] - 1) > 1e-12:
        raise NormalizationError("coefficient of II must be present and equal to 1")
    bad = {k: v for k, v in norm.items() if not -1 - 1e-12 <= v <= 1 + 1e-12}
    if bad:
        raise NormalizationError(f"coefficients outside [-1, 1]: {bad}")
    return sum(v * pauli_string_matrix(k) for k, v in norm.items()) / 4


def pdo_from_coefficients(c: Mapping[PauliString, float], sites: Sequence[str] = ("a", "b")) -> PseudoDensityOperator:
    """Build ``R = 1/4 sum_s c(s) sigma_s`` from a map of Pauli-string coefficients.

    >>> r = pdo_from_coefficients({"II": 1, "XX": 1, "YY": 1, "ZZ": 1})
    >>> r.eigenvalues().round(12).tolist()
    [-0.5, 0.5, 0.5, 0.5]
    """
    return PseudoDensityOperator(_coefficients_to_op(c), tuple(sites))


def temporal_bell(k: int, sites: Sequence[str] = ("a", "b")) -> PseudoDensityOperator:
    """One of the four maximally temporally correlated PDOs, ``k`` in 1..4."""
    if k not in TEMPORAL_BELL_SIGNS:
        raise SiteIndexError(f"temporal Bell index must be 1..4, got {k}")
    sx, sy, sz = TEMPORAL_BELL_SIGNS[k]
    return pdo_from_coefficients({"II": 1, "XX": sx, "YY": sy, "ZZ": sz}, sites)


def hs_inner(r1, r2) -> float:
    """Hilbert-Schmidt inner product ``tr(r1 r2)`` (both Hermitian, so real)."""
    a = r1.op if isinstance(r1, PseudoDensityOperator) else np.asarray(r1, dtype=complex)
    b = r2.op if isinstance(r2, PseudoDensityOperator) else np.asarray(r2, dtype=complex)
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.trace(a @ b).real)


def negativity(r: PseudoDensityOperator, tol: float = DEFAULT_TOL.psd) -> float:
    """Sum of the magnitudes of the negative eigenvalues; eigenvalues above ``-tol`` count as zero."""
    ev = r.eigenvalues()
    return float(-ev[ev < -tol].sum())


@dataclass(frozen=True)
class ChannelParams:
    """Diagonal Bloch contraction ``(r_x, r_y, r_z) -> (eta_x r_x, eta_y r_y, eta_z r_z)``."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name, v in zip("xyz", (self.x, self.y, self.z)):
            if not np.isfinite(v) or abs(v) > 1 + 1e-12:
                raise InvalidParameterError(f"eta_{name} = {v} outside [-1, 1]")

    @classmethod
    def from_array(cls, v) -> "ChannelParams":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def compose(self, other: "ChannelParams") -> "ChannelParams":
        """Apply ``self`` then ``other``; diagonal contractions multiply componentwise."""
        return ChannelParams.from_array(self.as_array() * other.as_array())

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def channel_pdo(eta: ChannelParams, sites: Sequence[str] = ("A", "t_b")) -> PseudoDensityOperator:
    """Resource PDO ``(I + eta_x XX + eta_y YY + eta_z ZZ) / 4``."""
    if not isinstance(eta, ChannelParams):
        eta = ChannelParams.from_array(eta)
    return pdo_from_coefficients({"II": 1, "XX": eta.x, "YY": eta.y, "ZZ": eta.z}, sites)


def diagonal_choi(eta: ChannelParams) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` of a diagonal Bloch map."""
    if not isinstance(eta, ChannelParams):
        eta = ChannelParams.from_array(eta)
    paulis = [PAULI[p] for p in (PauliLabel.X, PauliLabel.Y, PauliLabel.Z)]

    def phi(m):
        out = np.trace(m) * I2 / 2
        for e, P in zip(eta, paulis):
            out = out + e * np.trace(P @ m) * P / 2
        return out

    choi = np.zeros((4, 4), dtype=complex)
    for i, j in product(range(2), repeat=2):
        e = np.zeros((2, 2), dtype=complex)
        e[i, j] = 1
        choi += np.kron(e, phi(e))
    return choi


@dataclass(frozen=True, eq=False)
class QubitChannel:
    """Trace-preserving qubit map given by Kraus operators."""

    kraus: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks or any(k.shape != (2, 2) for k in ks):
            raise DimensionError("QubitChannel needs at least one 2x2 Kraus operator")
        object.__setattr__(self, "kraus", ks)

    def is_trace_preserving(self, tol: float = 1e-9) -> bool:
        s = sum(k.conj().T @ k for k in self.kraus)
        return bool(np.max(np.abs(s - I2)) <= tol)

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    @classmethod
    def identity(cls) -> "QubitChannel":
        return cls((I2,))

    @classmethod
    def unitary(cls, u) -> "QubitChannel":
        return cls((np.asarray(u, dtype=complex),))

    @classmethod
    def depolarizing(cls, p: float = 1.0) -> "QubitChannel":
        """``rho -> (1 - p) rho + p I/2``; ``p = 1`` is fully depolarizing."""
        if not 0 <= p <= 4 / 3:
            raise InvalidParameterError(f"depolarizing parameter {p} outside [0, 4/3]")
        ks = [np.sqrt(1 - 3 * p / 4) * I2] + [np.sqrt(p / 4) * PAULI[q] for q in (PauliLabel.X, PauliLabel.Y, PauliLabel.Z)]
        return cls(tuple(ks))

    @classmethod
    def amplitude_damping(cls, gamma: float) -> "QubitChannel":
        k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
        k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
        return cls((k0, k1))

    @classmethod
    def from_choi(cls, choi, tol: float = DEFAULT_TOL.psd) -> "QubitChannel":
        """Kraus operators from the eigendecomposition of an unnormalized Choi matrix."""
        choi = np.asarray(choi, dtype=complex)
        w, v = np.linalg.eigh((choi + choi.conj().T) / 2)
        if w[0] < -tol:
            raise ContractViolation(f"Choi matrix has eigenvalue {w[0]:.3g}; map is not completely positive")
        ks = []
        for lam, vec in zip(w, v.T):
            if lam > tol:
                # vec is indexed (input i, output j); K[j, i] = sqrt(lam) vec[i, j].
                ks.append(np.sqrt(lam) * vec.reshape(2, 2).T)
        return cls(tuple(ks))

    @classmethod
    def from_params(cls, eta: ChannelParams) -> "QubitChannel":
        return cls.from_choi(diagonal_choi(eta))


def two_time_pdo(channel: QubitChannel, rho0, sites: Sequence[str] = ("a", "b")) -> PseudoDensityOperator:
    """PDO of ideal projective Pauli measurements at two times around ``channel``.

    The first measurement collapses the state (Lüders rule); the coefficient on
    ``(sigma_i, sigma_j)`` is ``sum_a a * tr(sigma_j Phi(P_a rho0 P_a))`` where
    ``P_a`` projects onto the ``a = +-1`` eigenspace of ``sigma_i``. Terms with an
    identity at the first time leave the state undisturbed.
    """
    if not channel.is_trace_preserving():
        raise ContractViolation("two_time_pdo requires a trace-preserving channel")
    rho0 = validate_density_matrix(rho0)
    c = {}
    for li, lj in product(_LABELS, repeat=2):
        sj = PAULI[lj]
        if li is PauliLabel.I:
            val = np.trace(sj @ channel(rho0)).real
        else:
            si = PAULI[li]
            val = 0.0
            for a in (1, -1):
                proj = (I2 + a * si) / 2
                val += a * np.trace(sj @ channel(proj @ rho0 @ proj)).real
        c[(li, lj)] = float(np.clip(val, -1.0, 1.0))
    return pdo_from_coefficients(c, sites)
