"""Chained (multi-setting) CHSH quantities in the spatial, temporal and hybrid domains.

A chain of parameter ``n`` uses ``2n`` settings ``A_1, B_2, A_3, ..., B_2n``
and the expression

    S(n) = C(A_1, B_2) + C(B_2, A_3) + ... + C(A_2n-1, B_2n) - C(B_2n, A_1)

whose local-realistic maximum is ``2n - 2``. Settings are polarization-like
observables ``O(theta) = cos(theta) Z + sin(theta) X``.

Spatial correlators come from the Werner state ``V |psi-><psi-| + (1-V) I/4``
with the second party's outcomes relabelled (global sign), so both domains
read ``C = V cos(theta_a - theta_b)`` and one settings schedule serves all
modes. Temporal correlators are traces against the two-time PDO of the
identity channel on ``I/2``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, InvalidParameterError, OptimizationError, ScaleLimitError
from .operators import I2, X, Z
from .pdo import QubitChannel, two_time_pdo

N_MAX = 20
BRUTEFORCE_N_MAX = 6


class ChainMode(str, enum.Enum):
    SPATIAL = "spatial"
    TEMPORAL = "temporal"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class MeasurementSetting:
    theta: float

    def __post_init__(self):
        if not np.isfinite(self.theta):
            raise InvalidParameterError("setting angle must be finite")

    def observable(self) -> np.ndarray:
        return observable(self)


@dataclass(frozen=True)
class CurvePoint:
    n: int
    S: float
    delta_S: float
    stderr: float = 0.0

    @classmethod
    def from_value(cls, n: int, S: float, stderr: float = 0.0) -> "CurvePoint":
        return cls(n, float(S), float(S - classical_bound(n)), float(stderr))


def _theta(s) -> float:
    return float(s.theta) if isinstance(s, MeasurementSetting) else float(s)


def _check_visibility(v: float) -> float:
    if not 0.0 <= v <= 1.0:
        raise InvalidParameterError(f"visibility {v} outside [0, 1]")
    return float(v)


@dataclass(frozen=True)
class ChainConfig:
    """One chained-CHSH evaluation.

    ``visibility`` scales spatial terms only; temporal terms are ideal.
    """

    mode: ChainMode
    n: int
    visibility: float = 1.0
    settings: tuple[MeasurementSetting, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "mode", ChainMode(self.mode))
        if self.n < 1:
            raise ConfigurationError(f"chain parameter n must be positive, got {self.n}")
        _check_visibility(self.visibility)
        settings = self.settings or default_settings(self.n, self.mode)
        settings = tuple(s if isinstance(s, MeasurementSetting) else MeasurementSetting(float(s)) for s in settings)
        if len(settings) != 2 * self.n:
            raise ConfigurationError(f"expected {2 * self.n} settings, got {len(settings)}")
        object.__setattr__(self, "settings", settings)

    @property
    def angles(self) -> np.ndarray:
        return np.array([s.theta for s in self.settings])


def classical_bound(n: int) -> int:
    return 2 * n - 2


def observable(s) -> np.ndarray:
    """``cos(theta) Z + sin(theta) X``, a Hermitian involution with outcomes +-1."""
    t = _theta(s)
    return np.cos(t) * Z + np.sin(t) * X


_SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def werner_state(visibility: float) -> np.ndarray:
    v = _check_visibility(visibility)
    return v * np.outer(_SINGLET, _SINGLET.conj()) + (1 - v) * np.eye(4) / 4


def spatial_corr(a, b, visibility: float = 1.0) -> float:
    """Relabelled Werner-state correlator, equal to ``V cos(theta_a - theta_b)``."""
    rho = werner_state(visibility)
    # relabelling the second party's outcomes flips the sign of its observable
    return float(np.trace(np.kron(observable(a), -observable(b)) @ rho).real)


@lru_cache(maxsize=1)
def _identity_pdo() -> np.ndarray:
    return two_time_pdo(QubitChannel.identity(), I2 / 2).op


def temporal_corr(a, b) -> float:
    """Temporal average ``tr((O_a (x) O_b) R)``, equal to ``cos(theta_a - theta_b)``."""
    return float(np.trace(np.kron(observable(a), observable(b)) @ _identity_pdo()).real)


def term_modes(mode: ChainMode, n: int) -> list[ChainMode]:
    """Domain of each of the ``2n`` chain terms; hybrid is temporal first, spatial second half."""
    mode = ChainMode(mode)
    if mode is ChainMode.HYBRID:
        return [ChainMode.TEMPORAL] * n + [ChainMode.SPATIAL] * n
    return [mode] * (2 * n)


def chain_terms(n: int) -> list[tuple[int, int, int]]:
    """``(first, second, sign)`` setting indices for each chain term."""
    m = 2 * n
    return [(k, k + 1, 1) for k in range(m - 1)] + [(m - 1, 0, -1)]


def chain_value(cfg: ChainConfig) -> CurvePoint:
    """Analytic chained-CHSH value via the trace formulas for each term."""
    total = 0.0
    for (i, j, sign), dom in zip(chain_terms(cfg.n), term_modes(cfg.mode, cfg.n)):
        a, b = cfg.settings[i], cfg.settings[j]
        if dom is ChainMode.SPATIAL:
            c = spatial_corr(a, b, cfg.visibility)
        else:
            c = temporal_corr(a, b)
        total += sign * c
    return CurvePoint.from_value(cfg.n, total)


def _term_weights(mode: ChainMode, n: int, visibility: float) -> np.ndarray:
    return np.array([visibility if d is ChainMode.SPATIAL else 1.0 for d in term_modes(mode, n)])


def _fast_chain(angles: np.ndarray, weights: np.ndarray) -> float:
    """Closed-form ``sum sign * w * cos(delta)``, used inside the optimizer."""
    diffs = np.cos(np.diff(angles, append=angles[0]))
    diffs[-1] = -diffs[-1]
    return float(weights @ diffs)


def default_settings(n: int, mode: ChainMode = ChainMode.TEMPORAL) -> tuple[MeasurementSetting, ...]:
    """Equally spaced angles ``k pi / (2n)``, ``k = 0..2n-1``, for every mode."""
    ChainMode(mode)
    if n < 2:
        raise ConfigurationError(f"default settings need n >= 2, got {n}")
    return tuple(MeasurementSetting(k * np.pi / (2 * n)) for k in range(2 * n))


def optimize_settings(
    n: int,
    mode: ChainMode,
    visibility: float = 1.0,
    start: Sequence[float] | None = None,
    step: float = np.pi / 16,
    min_step: float = 1e-8,
    max_evals: int = 2_000_000,
) -> tuple[tuple[MeasurementSetting, ...], float]:
    """Coordinate ascent on the setting angles with step halving.

    Starts from the default settings and only accepts improving moves, so
    the result never falls below the default value.
    """
    if not 2 <= n <= N_MAX:
        raise ConfigurationError(f"optimize_settings supports 2 <= n <= {N_MAX}, got {n}")
    mode = ChainMode(mode)
    _check_visibility(visibility)
    weights = _term_weights(mode, n, visibility)
    angles = np.array(start, dtype=float) if start is not None else np.array([s.theta for s in default_settings(n, mode)])
    best = _fast_chain(angles, weights)
    evals = 1
    # the chain value is invariant under a global rotation, so angle 0 stays fixed
    while step >= min_step:
        improved = False
        for k in range(1, 2 * n):
            for delta in (step, -step):
                angles[k] += delta
                val = _fast_chain(angles, weights)
                evals += 1
                if val > best + 1e-15:
                    best = val
                    improved = True
                    break
                angles[k] -= delta
        if evals > max_evals:
            raise OptimizationError(f"no convergence after {evals} evaluations (step {step:.3g})")
        if not improved:
            step /= 2
    settings = tuple(MeasurementSetting(float(t)) for t in angles)
    return settings, chain_value(ChainConfig(mode, n, visibility, settings)).S


def classical_max_bruteforce(n: int) -> float:
    """Maximum of the chain expression over all deterministic +-1 outcome assignments."""
    if n > BRUTEFORCE_N_MAX:
        raise ScaleLimitError(f"brute force limited to n <= {BRUTEFORCE_N_MAX} (2^(2n) assignments)")
    if n < 1:
        raise ConfigurationError(f"n must be positive, got {n}")
    terms = chain_terms(n)
    best = -np.inf
    for outcome in itertools.product((1, -1), repeat=2 * n):
        s = sum(sign * outcome[i] * outcome[j] for i, j, sign in terms)
        best = max(best, s)
    return float(best)


def theory_curve(mode: ChainMode, n_range: Iterable[int], visibility: float = 1.0) -> list[CurvePoint]:
    """Analytic curve at default settings; temporal terms always use unit visibility."""
    mode = ChainMode(mode)
    _check_visibility(visibility)
    points = []
    for n in n_range:
        if not 2 <= n <= N_MAX:
            raise ConfigurationError(f"curve n must be within 2..{N_MAX}, got {n}")
        points.append(chain_value(ChainConfig(mode, n, visibility)))
    return points
