"""State teleportation and entanglement swapping through the spin-cavity analyzer."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from ..cavity import DecoherenceModel, decoherence_factor
from ..gates import Ebs, GateMode, Ideal
from ..qstate import (
    KET,
    PureState,
    apply_single,
    join,
    make_state,
    overlap_amplitude,
    pol,
    reduced_purity,
)
from .bell import BellState, identify_bell, prepare_bell
from .bsa import (
    SPIN,
    apply_both,
    decoding_mode,
    enumerate_outcomes,
    pauli_tag,
    sample_branch,
    type1_measurements,
    type2_measurements,
)

NORM_TOL = 1e-12


def mode_name(mode: GateMode) -> str:
    if isinstance(mode, Ebs) and not mode.lossless:
        return "ebs-lossy"
    return mode.name


@dataclass(frozen=True)
class TeleportRecord:
    protocol: str
    mode: str
    outcome: tuple[str, ...]
    probability: float
    survived: bool
    fidelity: float | None = None
    correction: str | None = None
    photon3: PureState | None = None  # normalized, before correction


@dataclass(frozen=True)
class SwapRecord:
    protocol: str
    mode: str
    outcome: tuple[str, ...]
    probability: float
    survived: bool
    bell: BellState | None = None
    overlap: float | None = None
    pure_before_spin: bool | None = None
    photons24: PureState | None = None

    @property
    def fidelity(self) -> float | None:
        return self.overlap


def _measurements(mode: GateMode, a: int, b: int):
    if isinstance(mode, Ebs):
        return type2_measurements(pol(a), pol(b))
    return type1_measurements(pol(a), pol(b))


def _teleport_input(photon1: PureState) -> PureState:
    return join(photon1, prepare_bell(BellState.PSI_PLUS, (2, 3)), make_state([(SPIN, KET["+"])]))


def _photon3_branches(photon1: PureState, mode: GateMode):
    st = apply_both(_teleport_input(photon1), pol(1), pol(2), mode)
    return enumerate_outcomes(st, _measurements(mode, 1, 2))


@functools.lru_cache(maxsize=None)
def derive_teleport_corrections(mode: GateMode) -> dict[tuple[int, ...], tuple[np.ndarray, str]]:
    """Per outcome, the unitary Bob applies to photon 3, and its Pauli tag.

    The protocol is linear in the input qubit, so running it on |R> and |L>
    gives the map M with photon3 = M (alpha, beta); the correction is M^-1
    rescaled to a unitary.
    """
    cols: dict[tuple[int, ...], list[np.ndarray]] = {}
    for k, ket in enumerate((KET["R"], KET["L"])):
        for br in _photon3_branches(PureState((pol(1),), ket), mode):
            cols.setdefault(br.outcome, [np.zeros(2, complex), np.zeros(2, complex)])[k] = br.state.amplitudes
    table = {}
    for outcome, (vr, vl) in cols.items():
        m = np.column_stack([vr, vl])
        gram = m.conj().T @ m
        scale = gram[0, 0].real
        if scale <= 0 or not np.allclose(gram, scale * np.eye(2), atol=1e-12):
            raise RuntimeError(f"outcome {outcome}: photon-3 map is not proportional to a unitary")
        corr = np.linalg.inv(m) * np.sqrt(scale)
        table[outcome] = (corr, pauli_tag(corr))
    return table


def _teleport_branches(alpha: complex, beta: complex, mode: GateMode, protocol: str,
                       decoherence: DecoherenceModel | None) -> list[TeleportRecord]:
    qubit = make_state([(pol(1), (alpha, beta))])
    target = PureState((pol(3),), np.array([alpha, beta], dtype=complex))
    corrections = derive_teleport_corrections(decoding_mode(mode))
    factor = 1.0 if decoherence is None else decoherence_factor(decoherence)
    name = mode_name(mode)
    out = []
    for br in _photon3_branches(qubit, mode):
        photon3 = br.state.normalized()
        corr, tag = corrections[br.outcome]
        fixed = apply_single(photon3, pol(3), corr)
        fid = abs(overlap_amplitude(target, fixed)) * factor
        out.append(TeleportRecord(protocol, name, br.symbols, br.probability, True, fid, tag, photon3))
    total = sum(r.probability for r in out)
    if total < 1 - NORM_TOL:
        out.append(TeleportRecord(protocol, name, ("lost",), 1 - total, False))
    return out


def _check_qubit(alpha: complex, beta: complex) -> None:
    nrm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(nrm - 1) > NORM_TOL:
        raise ValueError(f"input qubit not normalized: |alpha|^2+|beta|^2 = {nrm!r}")


def teleport_type1_branches(alpha: complex, beta: complex, mode: GateMode = Ideal(),
                            decoherence: DecoherenceModel | None = None) -> list[TeleportRecord]:
    """Teleport alpha|R> + beta|L> with the single-sided unit; one record per outcome.

    With ``decoherence`` the post-correction fidelity is multiplied by the
    spin-dephasing factor for the given photon interval.
    """
    if isinstance(mode, Ebs):
        raise TypeError("type-I teleportation uses the reflection gate, not Ebs")
    _check_qubit(alpha, beta)
    return _teleport_branches(alpha, beta, mode, "teleport_type1", decoherence)


def teleport_type2_branches(alpha: complex, beta: complex, t0: complex = -1.0, rh: complex = 1.0,
                            decoherence: DecoherenceModel | None = None) -> list[TeleportRecord]:
    _check_qubit(alpha, beta)
    return _teleport_branches(alpha, beta, Ebs(t0, rh), "teleport_type2", decoherence)


def teleport_type1(alpha, beta, rng: np.random.Generator, mode: GateMode = Ideal(),
                   decoherence: DecoherenceModel | None = None) -> TeleportRecord:
    return sample_branch(teleport_type1_branches(alpha, beta, mode, decoherence), rng)


def teleport_type2(alpha, beta, rng: np.random.Generator, t0=-1.0, rh=1.0,
                   decoherence: DecoherenceModel | None = None) -> TeleportRecord:
    return sample_branch(teleport_type2_branches(alpha, beta, t0, rh, decoherence), rng)


# -- entanglement swapping ----------------------------------------------------

def _swap_branches(mode: GateMode, protocol: str) -> list[SwapRecord]:
    st = join(
        prepare_bell(BellState.PSI_PLUS, (1, 2)),
        prepare_bell(BellState.PSI_PLUS, (3, 4)),
        make_state([(SPIN, KET["+"])]),
    )
    st = apply_both(st, pol(1), pol(3), mode)
    meas = _measurements(mode, 1, 3)
    remaining = (pol(2), pol(4))
    name = mode_name(mode)
    out = []
    for photon_br in enumerate_outcomes(st, meas[:-1]):
        pure = reduced_purity(photon_br.state, remaining) > 1 - 1e-9
        for spin_br in enumerate_outcomes(photon_br.state, meas[-1:]):
            pair = spin_br.state.reordered(remaining)
            bell, ov = identify_bell(pair, remaining)
            out.append(SwapRecord(
                protocol, name, photon_br.symbols + spin_br.symbols, spin_br.probability, True,
                bell, ov, pure, pair.normalized(),
            ))
    total = sum(r.probability for r in out)
    if total < 1 - NORM_TOL:
        out.append(SwapRecord(protocol, name, ("lost",), 1 - total, False))
    return out


def swap_type1_branches(mode: GateMode = Ideal()) -> list[SwapRecord]:
    """Swap two Psi+ pairs (1-2, 3-4) by analyzing photons 1 and 3; photons 2, 4 remain."""
    if isinstance(mode, Ebs):
        raise TypeError("type-I swapping uses the reflection gate, not Ebs")
    return _swap_branches(mode, "swap_type1")


def swap_type2_branches(t0: complex = -1.0, rh: complex = 1.0) -> list[SwapRecord]:
    return _swap_branches(Ebs(t0, rh), "swap_type2")


def swap_type1(rng: np.random.Generator, mode: GateMode = Ideal()) -> SwapRecord:
    return sample_branch(swap_type1_branches(mode), rng)


def swap_type2(rng: np.random.Generator, t0=-1.0, rh=1.0) -> SwapRecord:
    return sample_branch(swap_type2_branches(t0, rh), rng)
