"""Spin echo with photon-induced pi rotations under quasi-static noise.

The refocusing pulse is the optical-axis pi rotation made by reflecting two R
photons. It can only undo precession about an axis perpendicular to the
optical axis, so two noise models are offered:

* ``"transverse"``: static precession about y at a random rate delta.
  Refocused exactly by the photon pi pulse.
* ``"longitudinal"``: static phase exp(i delta t) on spin-down. Commutes with
  the pulse, so the echo has no effect.
"""
from __future__ import annotations

import math
from typing import Literal, NamedTuple

import numpy as np

from ..gates import photon_rotation_matrix
from ..qstate import KET

NoiseAxis = Literal["transverse", "longitudinal"]


class EchoResult(NamedTuple):
    coherence: float
    stderr: float


def _evolve(psi: np.ndarray, delta: np.ndarray, t: float, axis: NoiseAxis) -> np.ndarray:
    theta = delta * t
    up, down = psi[:, 0], psi[:, 1]
    if axis == "transverse":
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        return np.stack([c * up - s * down, s * up + c * down], axis=1)
    if axis == "longitudinal":
        return np.stack([up, np.exp(1j * theta) * down], axis=1)
    raise ValueError(f"unknown noise axis {axis!r}")


def spin_echo_sim(
    t2_star: float,
    total_time: float,
    echo: bool,
    n_samples: int,
    rng: np.random.Generator,
    noise_axis: NoiseAxis = "transverse",
) -> EchoResult:
    """Ensemble spin coherence |<2 rho_up,down>| after ``total_time``.

    The detuning is drawn once per sample from N(0, sqrt(2)/t2_star), so the
    free decay is exp(-(total_time/t2_star)^2).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not t2_star > 0:
        raise ValueError("t2_star must be > 0")
    sigma = math.sqrt(2) / t2_star
    delta = rng.normal(0.0, sigma, n_samples)
    psi = np.tile(KET["+"], (n_samples, 1))
    if echo:
        pulse = photon_rotation_matrix(["R", "R"], math.pi / 2)
        psi = _evolve(psi, delta, total_time / 2, noise_axis)
        psi = psi @ pulse.T
        psi = _evolve(psi, delta, total_time / 2, noise_axis)
    else:
        psi = _evolve(psi, delta, total_time, noise_axis)
    z = 2 * psi[:, 0] * np.conj(psi[:, 1])
    mean = z.mean()
    mag = abs(mean)
    if n_samples > 1 and mag > 0:
        proj = (z * np.conj(mean / mag)).real
        se = float(proj.std(ddof=1) / math.sqrt(n_samples))
    else:
        se = float("nan")
    return EchoResult(float(min(mag, 1.0)), se)
