"""Single-server FIFO queue simulation with Poisson cross traffic.

The queue is work conserving and starts empty at time 0.  Departures
follow the Lindley recursion ``d_j = max(a_j, d_{j-1}) + s_j`` over the
merged (main + interfering) arrival sequence; only the main flow's
departures are handed back to the observer, since cross traffic is not
visible at the egress.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .stochastic import PacketTrain, RngState, ServiceSpec, sample_poisson_process, sample_services

__all__ = ["QueueSpec", "QueueTranscript", "fifo_departures", "simulate_queue",
           "waiting_times"]

TAG_MAIN = 0
TAG_INTERFERING = 1


@dataclass(frozen=True)
class QueueSpec:
    """One queue: service rate, interfering load and service law."""

    mu: float
    lambda_interf: float = 0.0
    service: ServiceSpec | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise DomainError(f"mu must be positive, got {self.mu!r}")
        if not (math.isfinite(self.lambda_interf) and self.lambda_interf >= 0):
            raise DomainError(f"lambda_interf must be >= 0, got {self.lambda_interf!r}")
        if self.service is None:
            object.__setattr__(self, "service", ServiceSpec(self.mu))
        elif self.service.mu != self.mu:
            raise ConfigError("service spec rate differs from queue mu")

    @property
    def effective_rate(self) -> float:
        """Service capacity left to the main flow, mu - lambda'."""
        return self.mu - self.lambda_interf

    def check_stable(self, main_rate: float) -> None:
        if main_rate + self.lambda_interf >= self.mu:
            raise ConfigError(
                f"unstable queue: lambda={main_rate} + lambda'={self.lambda_interf} "
                f">= mu={self.mu}")


@dataclass(frozen=True)
class QueueTranscript:
    """Merged per-packet record of one simulation run."""

    arrivals: np.ndarray
    tags: np.ndarray        # TAG_MAIN or TAG_INTERFERING, arrival order
    services: np.ndarray
    departures: np.ndarray
    waits: np.ndarray       # time spent waiting before service starts

    def __len__(self) -> int:
        return int(self.arrivals.size)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["arrival", "tag", "service", "departure", "wait"])
            for row in zip(self.arrivals, self.tags, self.services,
                           self.departures, self.waits):
                w.writerow([repr(float(row[0])), int(row[1]), repr(float(row[2])),
                            repr(float(row[3])), repr(float(row[4]))])


def fifo_departures(arrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """Departure times of a FIFO single server fed in arrival order.

    Evaluates d_j = max(a_j, d_{j-1}) + s_j in closed form:
    d_j = S_j + max_{i<=j} (a_i - S_{i-1}) with S the service prefix sum.
    """
    arrivals = np.asarray(arrivals, dtype=np.float64)
    services = np.asarray(services, dtype=np.float64)
    if arrivals.shape != services.shape:
        raise DomainError("arrivals and services must have equal length")
    if arrivals.size == 0:
        return np.empty(0, dtype=np.float64)
    s_cum = np.cumsum(services)
    return s_cum + np.maximum.accumulate(arrivals - (s_cum - services))


def simulate_queue(main: PacketTrain, spec: QueueSpec, horizon: float,
                   rng: RngState) -> tuple[PacketTrain, QueueTranscript]:
    """Push the main flow through the queue alongside Poisson cross traffic.

    Interfering arrivals are drawn as a Poisson(lambda') process on
    [0, horizon] and merged with the main train by timestamp (main wins
    exact ties).  Departures may extend past the horizon while the queue
    drains; only the main flow's departures are returned, in order.
    """
    if not (math.isfinite(horizon) and horizon > 0):
        raise DomainError("horizon must be positive")
    if len(main) and main.timestamps[-1] > horizon:
        raise DomainError("main train extends beyond the horizon")

    if spec.lambda_interf > 0:
        interf = sample_poisson_process(spec.lambda_interf, horizon, rng.substream(0xCF))
        times = np.concatenate([main.timestamps, interf.timestamps])
        tags = np.concatenate([np.zeros(len(main), dtype=np.int8),
                               np.ones(len(interf), dtype=np.int8)])
        order = np.lexsort((tags, times))
        times, tags = times[order], tags[order]
    else:
        times = main.timestamps.copy()
        tags = np.zeros(len(main), dtype=np.int8)

    services = sample_services(spec.service, times.size, rng.substream(0x5E))
    departures = fifo_departures(times, services)
    waits = departures - services - times

    transcript = QueueTranscript(times, tags, services, departures, waits)
    main_dep = PacketTrain(departures[tags == TAG_MAIN], main.flow_id)
    return main_dep, transcript


def waiting_times(x_bar, y_bar) -> np.ndarray:
    """Queue idle-waits implied by inter-arrivals x and inter-departures y.

    w_k = max{0, sum_{i=1..k} x_i - sum_{i=0..k-1} y_i} for k = 1..n,
    where y has one more entry than x (y_0 is the lead-in delay).
    """
    x = np.asarray(x_bar, dtype=np.float64)
    y = np.asarray(y_bar, dtype=np.float64)
    if y.size != x.size + 1:
        raise DomainError("need len(y) == len(x) + 1")
    return np.maximum(0.0, np.cumsum(x) - np.cumsum(y[:-1]))
