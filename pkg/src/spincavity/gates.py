"""Photon-spin entangling gates.

All diagonal gates act on the (R-up, R-down, L-up, L-down) amplitudes of one
photon and the spin.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .cavity import ReflectionPair, wrap_phase
from .qstate import (
    Label,
    PureState,
    apply_diagonal_pair,
    apply_port_split,
    apply_single,
)


@dataclass(frozen=True)
class Ideal:
    """Lossless phase gate: R-down and L-up pick up ``exp(i delta_phi)``."""

    delta_phi: float = math.pi / 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta_phi", float(wrap_phase(self.delta_phi)))

    @property
    def name(self) -> str:
        return "ideal"


@dataclass(frozen=True)
class Lossy:
    """Reflection operator: r0 on R-up/L-down, rh on R-down/L-up."""

    r0: complex
    rh: complex

    @classmethod
    def from_pair(cls, pair: ReflectionPair) -> Lossy:
        return cls(pair.r0, pair.rh)

    @property
    def name(self) -> str:
        return "lossy"


@dataclass(frozen=True)
class Ebs:
    """Double-sided cavity: transmit R-up/L-down with t0, reflect R-down/L-up with rh."""

    t0: complex = -1.0
    rh: complex = 1.0

    @property
    def name(self) -> str:
        return "ebs"

    @property
    def lossless(self) -> bool:
        return abs(abs(self.t0) - 1) < 1e-12 and abs(abs(self.rh) - 1) < 1e-12


GateMode = Union[Ideal, Lossy, Ebs]


def diagonal_coefficients(mode: Ideal | Lossy) -> tuple[complex, complex, complex, complex]:
    if isinstance(mode, Ideal):
        ph = cmath.exp(1j * mode.delta_phi)
        return (1.0, ph, ph, 1.0)
    if isinstance(mode, Lossy):
        return (mode.r0, mode.rh, mode.rh, mode.r0)
    raise TypeError(f"{type(mode).__name__} has no diagonal form")


def apply_gate(state: PureState, photon: Label, spin: Label, mode: GateMode) -> PureState:
    if isinstance(mode, Ebs):
        return apply_port_split(state, photon, spin, mode.t0, mode.rh)
    return apply_diagonal_pair(state, photon, spin, diagonal_coefficients(mode))


def photon_rotation_matrix(photon_pols: Sequence[str], delta_phi: float) -> np.ndarray:
    """Spin operator induced by reflecting photons of definite circular polarization."""
    n_r = sum(1 for p in photon_pols if p == "R")
    n_l = sum(1 for p in photon_pols if p == "L")
    if n_r + n_l != len(photon_pols):
        raise ValueError(f"photon polarizations must be 'R' or 'L', got {list(photon_pols)!r}")
    return np.diag([cmath.exp(1j * n_l * delta_phi), cmath.exp(1j * n_r * delta_phi)])


def spin_rotation_by_photons(
    state: PureState, spin: Label, photon_pols: Sequence[str], delta_phi: float = math.pi / 2
) -> PureState:
    """Rotate the spin about the optical axis with a train of reflected photons.

    Each R photon advances the spin-down phase by ``delta_phi``, each L photon
    the spin-up phase. Two R photons at pi/2 give a pi rotation.
    """
    return apply_single(state, spin, photon_rotation_matrix(photon_pols, delta_phi))
