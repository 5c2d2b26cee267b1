"""Bell-state analysis with the single-sided (type I) and double-sided (type II) spin-cavity units.

Decoding tables are never transcribed: they are derived by enumerating every
measurement branch for the four Bell inputs under the lossless gate, and the
derivation fails loudly if two inputs share an outcome.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..gates import Ebs, GateMode, Ideal, Lossy, apply_gate
from ..qstate import (
    KET,
    OUTCOME_SYMBOLS,
    Basis,
    Label,
    PureState,
    join,
    make_state,
    overlap_amplitude,
    pol,
    port,
    project,
    spin,
)
from .bell import BellState, prepare_bell

SPIN = spin(0)
# branches below this fraction of the input weight are rounding noise
BRANCH_CUTOFF = 1e-20


class IncompleteAnalyzerError(RuntimeError):
    """Two different Bell inputs produced the same detector outcome."""


@dataclass(frozen=True)
class Branch:
    outcome: tuple[int, ...]
    symbols: tuple[str, ...]
    probability: float
    state: PureState  # unnormalized remainder; norm2 == probability


def enumerate_outcomes(state: PureState, measurements: Sequence[tuple[Label, Basis]]) -> list[Branch]:
    """All joint outcomes of a measurement sequence, with absolute probabilities.

    Probabilities are not renormalized, so for a lossy input they sum to the
    survival probability ``state.norm2``.
    """
    cutoff = BRANCH_CUTOFF * state.norm2
    partial = [((), state)]
    for label, basis in measurements:
        nxt = []
        for bits, st in partial:
            for k in (0, 1):
                proj = project(st, label, basis, k)
                if proj.norm2 > cutoff:
                    nxt.append((bits + (k,), proj))
        partial = nxt
    out = []
    for bits, st in partial:
        syms = tuple(OUTCOME_SYMBOLS[b][k] for (_, b), k in zip(measurements, bits))
        out.append(Branch(bits, syms, st.norm2, st))
    return out


def sample_branch(branches: Sequence, rng: np.random.Generator, weight=lambda br: br.probability):
    """Pick one branch with its probability; returns None for the lost remainder."""
    u = rng.random()
    acc = 0.0
    for br in branches:
        acc += weight(br)
        if u < acc:
            return br
    return None


def type1_measurements(a: Label, b: Label, s: Label = SPIN) -> list[tuple[Label, Basis]]:
    return [(a, Basis.HV), (b, Basis.HV), (s, Basis.PM)]


def type2_measurements(a: Label, b: Label, s: Label = SPIN) -> list[tuple[Label, Basis]]:
    # ports first, then polarizations, then the spin that releases the memory
    return [
        (port(a.index), Basis.TR),
        (port(b.index), Basis.TR),
        (a, Basis.HV),
        (b, Basis.HV),
        (s, Basis.PM),
    ]


def with_spin(state: PureState, s: Label = SPIN) -> PureState:
    if s in state.labels:
        return state
    return join(state, make_state([(s, KET["+"])]))


def apply_both(state: PureState, a: Label, b: Label, mode: GateMode, s: Label = SPIN) -> PureState:
    return apply_gate(apply_gate(state, a, s, mode), b, s, mode)


def _unit_phase(z: complex) -> complex:
    return z / abs(z) if abs(z) > 0 else 1.0


def decoding_mode(mode: GateMode) -> GateMode:
    """Lossless gate the detector logic is calibrated for."""
    if isinstance(mode, Ideal):
        return mode
    if isinstance(mode, Lossy):
        return Ideal()
    return Ebs(_unit_phase(mode.t0), _unit_phase(mode.rh))


@functools.lru_cache(maxsize=None)
def derive_table(mode: GateMode) -> dict[tuple[int, ...], BellState]:
    """Outcome -> Bell state map for a lossless gate, by brute-force enumeration."""
    a, b = pol(1), pol(2)
    meas = type2_measurements(a, b) if isinstance(mode, Ebs) else type1_measurements(a, b)
    table: dict[tuple[int, ...], BellState] = {}
    for variant in BellState:
        st = apply_both(with_spin(prepare_bell(variant, (1, 2))), a, b, mode)
        for br in enumerate_outcomes(st, meas):
            prev = table.setdefault(br.outcome, variant)
            if prev is not variant:
                raise IncompleteAnalyzerError(
                    f"outcome {br.symbols} is produced by both {prev.value} and {variant.value}"
                )
    return table


# Pauli corrections in the R/L basis; "XZ" is the matrix product X @ Z.
PAULIS = {
    "I": np.eye(2, dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "XZ": np.array([[0, 1], [1, 0]], dtype=complex) @ np.diag([1, -1]).astype(complex),
}


def pauli_tag(matrix: np.ndarray, tol: float = 1e-9) -> str:
    """Name of the Pauli equal to ``matrix`` up to global phase, or "U"."""
    m = np.asarray(matrix, dtype=complex)
    for tag, p in PAULIS.items():
        # |tr(P^dag M)| / 2 == 1 iff M = e^{i phi} P for unitary M
        if abs(abs(np.trace(p.conj().T @ m)) / 2 - 1) < tol:
            return tag
    return "U"


@functools.lru_cache(maxsize=None)
def bell_corrections() -> dict[BellState, str]:
    """Pauli P with (I x P)|psi+> equal to each Bell state up to phase."""
    ref = prepare_bell(BellState.PSI_PLUS, (1, 2))
    out = {}
    for variant in BellState:
        target = prepare_bell(variant, (1, 2))
        for tag, p in PAULIS.items():
            trial = PureState(ref.labels, np.kron(np.eye(2), p) @ ref.amplitudes)
            if abs(abs(overlap_amplitude(target, trial)) - 1) < 1e-12:
                out[variant] = tag
                break
    return out


@dataclass(frozen=True)
class BsaOutcome:
    photon_results: tuple[tuple[Basis, int], ...]
    port_results: tuple[int, ...] | None
    spin_result: int | None
    inferred: BellState | None
    survived: bool
    correction: str | None
    probability: float

    @property
    def symbols(self) -> tuple[str, ...]:
        syms = []
        if self.port_results is not None:
            syms += [OUTCOME_SYMBOLS[Basis.TR][k] for k in self.port_results]
        syms += [OUTCOME_SYMBOLS[b][k] for b, k in self.photon_results]
        if self.spin_result is not None:
            syms.append(OUTCOME_SYMBOLS[Basis.PM][self.spin_result])
        return tuple(syms)


def _lost(total: float) -> BsaOutcome:
    return BsaOutcome((), None, None, None, False, None, max(0.0, 1.0 - total))


def _analyze(
    state: PureState, a: Label, b: Label, mode: GateMode, type2: bool
) -> list[BsaOutcome]:
    st = apply_both(with_spin(state), a, b, mode)
    meas = type2_measurements(a, b) if type2 else type1_measurements(a, b)
    table = derive_table(decoding_mode(mode))
    tags = bell_corrections()
    out = []
    for br in enumerate_outcomes(st, meas):
        bits = br.outcome
        ports = bits[:2] if type2 else None
        pols = bits[2:4] if type2 else bits[:2]
        inferred = table.get(bits)
        out.append(BsaOutcome(
            photon_results=tuple((Basis.HV, k) for k in pols),
            port_results=ports,
            spin_result=bits[-1],
            inferred=inferred,
            survived=True,
            correction=None if inferred is None else tags[inferred],
            probability=br.probability,
        ))
    total = sum(o.probability for o in out)
    if total < 1 - 1e-12:
        out.append(_lost(total))
    return out


def bsa_type1_branches(
    state: PureState, photons: tuple[int, int] = (1, 2), mode: GateMode = Ideal()
) -> list[BsaOutcome]:
    """Every outcome of the single-sided analyzer (photons HV, then spin +/-).

    ``state`` holds the two photons, optionally with the spin; a missing spin
    is prepared in |+>. A final ``survived=False`` entry carries the loss.
    """
    if isinstance(mode, Ebs):
        raise TypeError("type-I analysis uses the reflection gate, not Ebs")
    return _analyze(state, pol(photons[0]), pol(photons[1]), mode, type2=False)


def bsa_type2_branches(
    state: PureState, photons: tuple[int, int] = (1, 2), t0: complex = -1.0, rh: complex = 1.0
) -> list[BsaOutcome]:
    """Every outcome of the double-sided analyzer (ports, then HV, then spin +/-)."""
    return _analyze(state, pol(photons[0]), pol(photons[1]), Ebs(t0, rh), type2=True)


def bsa_type1(state: PureState, rng: np.random.Generator, photons=(1, 2), mode: GateMode = Ideal()) -> BsaOutcome:
    return sample_branch(bsa_type1_branches(state, photons, mode), rng)


def bsa_type2(state: PureState, rng: np.random.Generator, photons=(1, 2), t0=-1.0, rh=1.0) -> BsaOutcome:
    return sample_branch(bsa_type2_branches(state, photons, t0, rh), rng)


# -- brute-force counterparts of the closed-form metrics ------------------------

def bell_survival(variant: BellState, mode: Lossy) -> float:
    st = apply_both(with_spin(prepare_bell(variant)), pol(1), pol(2), mode)
    return st.norm2


def bell_ensemble_survival(mode: Lossy) -> float:
    """Mean over the four Bell inputs of the post-gate squared norm."""
    return sum(bell_survival(v, mode) for v in BellState) / 4


_PHI_PARTNER = {BellState.PHI_PLUS: BellState.PHI_MINUS, BellState.PHI_MINUS: BellState.PHI_PLUS}


def phi_branch_overlap(mode: Lossy, variant: BellState = BellState.PHI_PLUS) -> float:
    """|<Phi_partner, -| post>| for a Phi input after the lossy gate, post normalized."""
    post = apply_both(with_spin(prepare_bell(variant)), pol(1), pol(2), mode)
    ideal = join(prepare_bell(_PHI_PARTNER[variant]), make_state([(SPIN, KET["-"])]))
    return abs(overlap_amplitude(ideal, post))
