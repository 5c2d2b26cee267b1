"""Two-photon Bell states in the circular basis."""
from __future__ import annotations

import enum

import numpy as np

from ..qstate import Label, PureState, overlap_amplitude, pol

_S = 1 / np.sqrt(2)


class BellState(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def is_psi(self) -> bool:
        return self in (BellState.PSI_PLUS, BellState.PSI_MINUS)


# amplitudes over (RR, RL, LR, LL)
_AMPLITUDES = {
    BellState.PSI_PLUS: (0, _S, _S, 0),
    BellState.PSI_MINUS: (0, _S, -_S, 0),
    BellState.PHI_PLUS: (_S, 0, 0, _S),
    BellState.PHI_MINUS: (_S, 0, 0, -_S),
}


def prepare_bell(variant: BellState, photons: tuple[int, int] = (1, 2)) -> PureState:
    """Psi = (RL +/- LR)/sqrt2, Phi = (RR +/- LL)/sqrt2 on the two given photons."""
    a, b = photons
    return PureState((pol(a), pol(b)), np.array(_AMPLITUDES[variant], dtype=complex))


def identify_bell(state: PureState, labels: tuple[Label, Label], tol: float = 1e-9) -> tuple[BellState | None, float]:
    """Bell state matching ``state`` up to global phase, with the best |overlap|."""
    best, best_ov = None, 0.0
    for variant in BellState:
        ref = PureState(labels, np.array(_AMPLITUDES[variant], dtype=complex))
        ov = abs(overlap_amplitude(ref, state))
        if ov > best_ov:
            best, best_ov = variant, ov
    return (best if best_ov > 1 - tol else None), best_ov
