"""Loss resistance of memory-assisted (sequential) versus coincidence detection.

A trial is one heralded arrival of photon 1, which happens with probability
``p_arrival`` per attempt slot. In the memory scheme the spin stores photon 1
and waits up to ``window_attempts`` slots (including the current one) for
photon 2; each success is weighted by the dephasing factor at the realized
interval. In the coincidence scheme photon 2 must arrive in the same slot.
Both schemes share the photon-2 arrival draw, and rates are reported per
attempt slot (success fraction times ``p_arrival``).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 1 << 16


@dataclass(frozen=True)
class LinkModel:
    p_arrival: float
    window_attempts: int
    attempt_period: float = 1.0
    t2e: float = math.inf

    def __post_init__(self) -> None:
        if not 0 < self.p_arrival <= 1:
            raise ValueError(f"p_arrival must be in (0, 1], got {self.p_arrival!r}")
        if self.window_attempts < 1:
            raise ValueError(f"window_attempts must be >= 1, got {self.window_attempts!r}")
        if not self.attempt_period >= 0:
            raise ValueError("attempt_period must be >= 0")
        if not self.t2e > 0:
            raise ValueError("t2e must be > 0")

    def expected_ratio(self) -> float:
        """Closed-form memory/coincidence rate ratio."""
        p = self.p_arrival
        return (1 - (1 - p) ** self.window_attempts) / p


@dataclass(frozen=True)
class LinkResult:
    n_trials: int
    memory_successes: int
    coincidence_successes: int
    f_prime_sum: float
    p_arrival: float

    @property
    def memory_rate(self) -> float:
        return self.p_arrival * self.memory_successes / self.n_trials

    @property
    def coincidence_rate(self) -> float:
        return self.p_arrival * self.coincidence_successes / self.n_trials

    @property
    def mean_f_prime(self) -> float:
        return self.f_prime_sum / self.memory_successes if self.memory_successes else float("nan")

    @property
    def ratio(self) -> float:
        return self.memory_rate / self.coincidence_rate if self.coincidence_successes else float("inf")


def _chunk(link: LinkModel, n: int, seed: np.random.SeedSequence) -> tuple[int, int, float]:
    rng = np.random.default_rng(seed)
    # slots waited for photon 2 after photon 1 is stored (0 = same slot)
    wait = rng.geometric(link.p_arrival, size=n) - 1
    ok = wait < link.window_attempts
    dt = wait[ok] * link.attempt_period
    f_prime = (1 + np.exp(-dt / link.t2e)) / 2
    return int(ok.sum()), int((wait == 0).sum()), float(f_prime.sum())


def loss_resistance_mc(
    link: LinkModel, n_trials: int, rng: np.random.SeedSequence | int, workers: int = 1
) -> LinkResult:
    """Monte Carlo success rates per attempt slot for both detection schemes.

    ``rng`` is a seed or a :class:`numpy.random.SeedSequence`. Trials are split into fixed-size chunks, each with its own spawned seed,
    so the result for a given seed does not depend on ``workers``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    root = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    sizes = [CHUNK] * (n_trials // CHUNK)
    if n_trials % CHUNK:
        sizes.append(n_trials % CHUNK)
    seeds = root.spawn(len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _chunk(link, *a), zip(sizes, seeds)))
    else:
        parts = [_chunk(link, n, s) for n, s in zip(sizes, seeds)]
    mem = sum(x[0] for x in parts)
    coin = sum(x[1] for x in parts)
    # summed in chunk order so the float total is worker-independent
    fsum = 0.0
    for x in parts:
        fsum += x[2]
    return LinkResult(n_trials, mem, coin, fsum, link.p_arrival)
