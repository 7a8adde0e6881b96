"""Seeded Monte Carlo model of the photon-pair chained-CHSH experiment.

Outcome counts are drawn from the exact joint distributions with binomial /
multinomial draws, so cost does not grow with the number of shots. Each
correlator term owns an independent stream derived from ``(seed, stream)``.

The only imperfection modelled is the spatial visibility ``V`` (Werner
state); temporal sequences are ideal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chsh import (
    N_MAX,
    ChainMode,
    CurvePoint,
    chain_terms,
    default_settings,
    spatial_corr,
    term_modes,
)
from .errors import ConfigurationError, ContractViolation, InvalidParameterError


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,)))


@dataclass(frozen=True)
class CorrelationEstimate:
    mean: float
    stderr: float
    shots: int


@dataclass(frozen=True)
class ShotBatch:
    """Coincidence counts for outcome pairs (++, +-, -+, --)."""

    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int

    def __post_init__(self):
        if min(self.n_pp, self.n_pm, self.n_mp, self.n_mm) < 0:
            raise ContractViolation("counts must be non-negative")

    @property
    def shots(self) -> int:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm

    def __add__(self, other: "ShotBatch") -> "ShotBatch":
        return ShotBatch(self.n_pp + other.n_pp, self.n_pm + other.n_pm, self.n_mp + other.n_mp, self.n_mm + other.n_mm)

    def estimate(self) -> CorrelationEstimate:
        """Sample mean of ``alpha * beta`` with binomial standard error ``sqrt((1 - m^2) / N)``."""
        n = self.shots
        if n == 0:
            raise ContractViolation("cannot estimate a correlator from zero shots")
        mean = (self.n_pp + self.n_mm - self.n_pm - self.n_mp) / n
        return CorrelationEstimate(mean, float(np.sqrt(max(0.0, 1 - mean * mean) / n)), n)


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, RngSpec):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngSpec or numpy Generator, got {type(rng).__name__}")


def _check_shots(shots: int) -> int:
    if int(shots) != shots or shots < 1:
        raise ConfigurationError(f"shots must be a positive integer, got {shots}")
    return int(shots)


def _theta(s) -> float:
    return float(getattr(s, "theta", s))


def sample_spatial(a, b, visibility: float, shots: int, rng) -> ShotBatch:
    """Pairs from ``p(alpha, beta) = (1 + alpha beta C) / 4`` with ``C = spatial_corr(a, b, V)``."""
    shots = _check_shots(shots)
    if not 0 <= visibility <= 1:
        raise InvalidParameterError(f"visibility {visibility} outside [0, 1]")
    c = spatial_corr(a, b, visibility)
    if abs(c) > 1 + 1e-12:
        raise ContractViolation(f"correlator {c} outside [-1, 1]")
    c = float(np.clip(c, -1, 1))
    p = np.array([1 + c, 1 - c, 1 - c, 1 + c]) / 4
    counts = _rng(rng).multinomial(shots, p)
    return ShotBatch(*(int(k) for k in counts))


def _sequential_counts(gen: np.random.Generator, n_plus: int, n_minus: int, cos_ab: float) -> ShotBatch:
    """Second-measurement outcomes after collapse onto the first outcome's eigenstate."""
    p_same = float(np.clip((1 + cos_ab) / 2, 0, 1))
    pp = int(gen.binomial(n_plus, p_same))
    mm = int(gen.binomial(n_minus, p_same))
    return ShotBatch(pp, n_plus - pp, n_minus - mm, mm)


def sample_temporal(a, b, shots: int, rng, erasure: str = "explicit") -> ShotBatch:
    """Two projective measurements in a row on one photon of a singlet pair.

    With ``erasure="explicit"`` each shot first draws the twin photon's H/V
    projection; both acquisitions are recorded and summed, which erases the
    twin's information and leaves the first photon in ``I/2``. ``"reduced"``
    starts from ``I/2`` directly. Both give the same distribution.
    """
    shots = _check_shots(shots)
    gen = _rng(rng)
    ta, tb = _theta(a), _theta(b)
    cos_ab = float(np.cos(ta - tb))
    if erasure == "reduced":
        n_plus = int(gen.binomial(shots, 0.5))
        return _sequential_counts(gen, n_plus, shots - n_plus, cos_ab)
    if erasure != "explicit":
        raise ConfigurationError(f"unknown erasure mode {erasure!r}")
    n_h = int(gen.binomial(shots, 0.5))
    total = ShotBatch(0, 0, 0, 0)
    # twin found H leaves this photon V (Bloch -z), and vice versa
    for n_acq, z_sign in ((n_h, -1.0), (shots - n_h, 1.0)):
        p_plus = float(np.clip((1 + z_sign * np.cos(ta)) / 2, 0, 1))
        n_plus = int(gen.binomial(n_acq, p_plus))
        total = total + _sequential_counts(gen, n_plus, n_acq - n_plus, cos_ab)
    return total


def estimate_chain(
    mode: ChainMode,
    n: int,
    visibility: float = 1.0,
    shots_per_term: int = 100_000,
    seed: int = 0,
    settings=None,
    erasure: str = "explicit",
) -> CurvePoint:
    """Monte Carlo chained-CHSH value; term ``k`` uses stream ``k`` of ``seed``.

    The standard error combines per-term binomial errors in quadrature.
    """
    mode = ChainMode(mode)
    if not 2 <= n <= N_MAX:
        raise ConfigurationError(f"n must be within 2..{N_MAX}, got {n}")
    if shots_per_term < 100:
        raise ConfigurationError(f"shots_per_term must be >= 100, got {shots_per_term}")
    settings = default_settings(n, mode) if settings is None else tuple(settings)
    if len(settings) != 2 * n:
        raise ConfigurationError(f"expected {2 * n} settings, got {len(settings)}")
    s = 0.0
    var = 0.0
    for k, ((i, j, sign), dom) in enumerate(zip(chain_terms(n), term_modes(mode, n))):
        spec = RngSpec(seed, k)
        if dom is ChainMode.SPATIAL:
            batch = sample_spatial(settings[i], settings[j], visibility, shots_per_term, spec)
        else:
            batch = sample_temporal(settings[i], settings[j], shots_per_term, spec, erasure=erasure)
        est = batch.estimate()
        s += sign * est.mean
        var += est.stderr**2
    return CurvePoint.from_value(n, s, float(np.sqrt(var)))
