"""Seeded random sampling: Poisson processes, service times, packet trains.

Randomness is routed through :class:`RngState`, a value object naming a
counter-based Philox stream.  Every sampling operation builds a fresh
generator from the state it receives, so a call is a deterministic
function of its arguments: the same ``(seed, stream_id)`` always yields
the same output, and trials can be executed in any order or in parallel
without coordination.  Callers derive disjoint streams with
:meth:`RngState.substream`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["RngState", "PacketTrain", "ServiceSpec",
           "sample_poisson_count", "sample_poisson_process",
           "sample_service", "sample_services"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngState:
    """Names one deterministic random stream: a (seed, stream_id) pair."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh Philox generator keyed by (seed, stream_id)."""
        key = ((self.seed & _MASK64) << 64) | (self.stream_id & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, *ids: int) -> "RngState":
        """Derive a child stream from a path of integer identifiers.

        The derivation is a bijective mix per step, so distinct id paths
        land on distinct streams except for astronomically unlikely
        hash collisions.
        """
        s = self.stream_id & _MASK64
        for i in ids:
            s = _splitmix64((s * _GOLDEN + (int(i) & _MASK64) + 1) & _MASK64)
        return RngState(self.seed, s)


@dataclass(frozen=True)
class PacketTrain:
    """Strictly increasing packet timestamps (seconds) for one flow."""

    timestamps: np.ndarray
    flow_id: int = 0

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=np.float64)
        if ts.ndim != 1:
            raise DomainError("timestamps must be a 1-D sequence")
        if ts.size:
            if not np.all(np.isfinite(ts)):
                raise DomainError("timestamps must be finite")
            if ts[0] < 0:
                raise DomainError("timestamps must be >= 0")
            if np.any(np.diff(ts) <= 0):
                raise DomainError("timestamps must be strictly increasing")
        ts = ts.copy()
        ts.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def count_until(self, t: float) -> int:
        """Number of packets with timestamp <= t."""
        return int(np.searchsorted(self.timestamps, t, side="right"))

    def truncated(self, t: float) -> "PacketTrain":
        """Sub-train of packets with timestamp <= t."""
        return PacketTrain(self.timestamps[: self.count_until(t)], self.flow_id)

    def shifted(self, dt: float) -> "PacketTrain":
        return PacketTrain(self.timestamps + dt, self.flow_id)

    @staticmethod
    def empty(flow_id: int = 0) -> "PacketTrain":
        return PacketTrain(np.empty(0, dtype=np.float64), flow_id)


@dataclass(frozen=True)
class ServiceSpec:
    """Service-time law of a queue: Exponential or mean-matched Weibull.

    ``mu`` is the processing rate in packets/second; for every family the
    mean service time is exactly ``1/mu``.  For the Weibull family the
    scale is therefore ``1 / (mu * Gamma(1 + 1/shape))``; shape 1 reduces
    to the exponential law.
    """

    mu: float
    family: str = "exponential"
    shape: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise DomainError(f"service rate mu must be positive, got {self.mu!r}")
        if self.family not in ("exponential", "weibull"):
            raise DomainError(f"unknown service family {self.family!r}")
        if self.family == "weibull" and not (math.isfinite(self.shape) and self.shape > 0):
            raise DomainError(f"weibull shape must be positive, got {self.shape!r}")

    @property
    def weibull_scale(self) -> float:
        return 1.0 / (self.mu * math.gamma(1.0 + 1.0 / self.shape))


def _check_rate_horizon(rate: float, horizon: float) -> None:
    if not (math.isfinite(rate) and rate > 0):
        raise DomainError(f"rate must be positive, got {rate!r}")
    if not (math.isfinite(horizon) and horizon > 0):
        raise DomainError(f"horizon must be positive, got {horizon!r}")


def sample_poisson_count(rate: float, horizon: float, rng: RngState) -> int:
    """Draw the number of points of a Poisson(rate) process on [0, horizon]."""
    _check_rate_horizon(rate, horizon)
    return int(rng.generator().poisson(rate * horizon))


def _uniform_points(gen: np.random.Generator, horizon: float, n: int) -> np.ndarray:
    """n sorted uniform points on (0, horizon]; exact ties and zeros re-drawn.

    Ties have probability zero in exact arithmetic; re-drawing the
    offending points preserves the conditional-uniform law while keeping
    strict monotonicity.
    """
    pts = gen.uniform(0.0, horizon, n)
    for _ in range(64):
        pts.sort()
        bad = np.zeros(n, dtype=bool)
        if n:
            bad[0] = pts[0] == 0.0
            bad[1:] |= np.diff(pts) == 0.0
        k = int(bad.sum())
        if not k:
            return pts
        pts[bad] = gen.uniform(0.0, horizon, k)
    raise DomainError("could not resolve duplicate uniform points")  # pragma: no cover


def sample_poisson_process(rate: float, horizon: float, rng: RngState) -> PacketTrain:
    """Sample a Poisson process on [0, horizon] by uniform placement.

    Draws ``N ~ Poisson(rate * horizon)`` and then places N points
    i.i.d. uniformly on the interval, returned sorted.
    """
    _check_rate_horizon(rate, horizon)
    gen = rng.generator()
    n = int(gen.poisson(rate * horizon))
    return PacketTrain(_uniform_points(gen, horizon, n))


def sample_services(spec: ServiceSpec, n: int, rng: RngState) -> np.ndarray:
    """Draw ``n`` i.i.d. service times under ``spec``."""
    if n < 0:
        raise DomainError("n must be >= 0")
    gen = rng.generator()
    if spec.family == "exponential":
        return gen.exponential(1.0 / spec.mu, n)
    return spec.weibull_scale * gen.weibull(spec.shape, n)


def sample_service(spec: ServiceSpec, rng: RngState) -> float:
    """Draw a single service time under ``spec``."""
    return float(sample_services(spec, 1, rng)[0])
