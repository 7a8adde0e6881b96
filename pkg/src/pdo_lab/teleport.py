"""Formal teleportation in time.

Three sites are involved, in order ``(t_a, A, t_b)``. The input state sits on
``t_a``, the resource PDO on ``(A, t_b)``, and ``(t_a, A)`` is "projected"
onto a temporal Bell element:

    out = Tr_{t_a, A}[ (R^(k)_{t_a A} (x) I) (rho_{t_a} (x) R_{A t_b}) ]

The raw partial trace carries a factor 1/4 (the weight); the returned state
is normalized by it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateProjectionError, DimensionError, InvalidResourceError
from .operators import (
    DEFAULT_TOL,
    I2,
    X,
    Y,
    Z,
    bloch_components,
    partial_trace,
    validate_density_matrix,
)
from .pdo import ChannelParams, PseudoDensityOperator, channel_pdo, diagonal_choi, temporal_bell

DEGENERATE_WEIGHT = 1e-12

_CORRECTIONS = {1: I2, 2: X, 3: Y, 4: Z}


@dataclass(frozen=True, eq=False)
class TeleportOutcome:
    state: np.ndarray
    weight: float

    @property
    def bloch(self) -> np.ndarray:
        return bloch_components(self.state)


def teleport(rho, projector_index: int, resource: PseudoDensityOperator, validate: bool = True) -> TeleportOutcome:
    """Project ``rho`` (x) ``resource`` onto ``R^(projector_index)`` on the first two sites.

    ``validate=False`` skips the density-matrix check on ``rho`` so that
    outputs of non-CP steps can be pushed through again.
    """
    rho = validate_density_matrix(rho) if validate else np.asarray(rho, dtype=complex)
    if resource.dim != 4:
        raise DimensionError("resource must be a two-site PDO on (A, t_b)")
    bell = temporal_bell(projector_index).op
    unnormalized = partial_trace(np.kron(bell, I2) @ np.kron(rho, resource.op), [0, 1])
    weight = np.trace(unnormalized).real
    if abs(weight) < DEGENERATE_WEIGHT:
        raise DegenerateProjectionError(f"projected operator has trace {weight:.3g}")
    return TeleportOutcome(unnormalized / weight, float(weight))


def correction_unitary(k: int) -> np.ndarray:
    """Pauli relating outcome ``k`` to outcome 1: I, X, Y, Z for k = 1..4.

    ``X`` is the pi rotation about x up to a global phase, which conjugation
    does not see.
    """
    if k not in _CORRECTIONS:
        raise IndexError(f"projector index must be 1..4, got {k}")
    return _CORRECTIONS[k].copy()


def teleport_channel(rho, eta: ChannelParams, projector_index: int = 1, validate: bool = True) -> TeleportOutcome:
    """Teleport through the resource ``channel_pdo(eta)``; outcome 1 yields ``eta * r``."""
    return teleport(rho, projector_index, channel_pdo(eta), validate=validate)


def cp_constraint(eta: ChannelParams, tol: float = 2 * DEFAULT_TOL.psd) -> bool:
    """``|1 + eta_z| >= |eta_x + eta_y|`` and ``|1 - eta_z| >= |eta_x - eta_y|``.

    ``tol`` defaults to twice the eigenvalue slack because the Choi
    eigenvalues of a diagonal map are half of these differences.
    """
    x, y, z = eta
    return abs(1 + z) - abs(x + y) >= -tol and abs(1 - z) - abs(x - y) >= -tol


def choi_psd(eta: ChannelParams, tol: float = DEFAULT_TOL.psd) -> bool:
    """Complete positivity via the minimum Choi eigenvalue."""
    return bool(np.linalg.eigvalsh(diagonal_choi(eta))[0] >= -tol)


def teleport_chain(rho0, resources: Sequence[ChannelParams], allow_non_cp: bool = False) -> list[np.ndarray]:
    """Run ``teleport_channel`` once per resource, feeding each output forward."""
    resources = [r if isinstance(r, ChannelParams) else ChannelParams.from_array(r) for r in resources]
    if not allow_non_cp:
        for i, eta in enumerate(resources):
            if not cp_constraint(eta):
                raise InvalidResourceError(f"resource {i} {tuple(eta)} is not completely positive")
    states = []
    rho = validate_density_matrix(rho0)
    for eta in resources:
        rho = teleport_channel(rho, eta, validate=not allow_non_cp).state
        states.append(rho)
    return states
