"""Pure-state register over labeled two-level subsystems.

Every operation returns a new :class:`PureState`; nothing is mutated in place.
Loss is carried as a norm deficit, so the squared norm of a state is the
probability that all photons it describes are still present.

Basis conventions (basis index 0 / 1 per subsystem):

* photon polarization: ``|R>`` / ``|L>``
* photon port: ``|t>`` (transmitted) / ``|r>`` (reflected)
* spin: ``|up>`` / ``|down>``

Linear polarization is fixed by ``|R> = (|H> + i|V>)/sqrt(2)`` and
``|L> = (|H> - i|V>)/sqrt(2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_EPS = 1e-12
_SQRT2_INV = 1 / np.sqrt(2)


class Kind(enum.Enum):
    POLARIZATION = "pol"
    PORT = "port"
    SPIN = "spin"


@dataclass(frozen=True)
class Label:
    kind: Kind
    index: int

    def __str__(self) -> str:
        return f"{self.kind.value}{self.index}"


def pol(index: int) -> Label:
    return Label(Kind.POLARIZATION, index)


def port(index: int) -> Label:
    return Label(Kind.PORT, index)


def spin(index: int = 0) -> Label:
    return Label(Kind.SPIN, index)


class Basis(enum.Enum):
    HV = "HV"
    PM = "PM"
    RL = "RL"
    TR = "TR"


# Rows are the bras <b| expressed in the computational basis of the subsystem.
BASIS_BRAS: dict[Basis, np.ndarray] = {
    Basis.HV: np.array([[1, 1], [1j, -1j]], dtype=complex) * _SQRT2_INV,
    Basis.PM: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    Basis.RL: np.eye(2, dtype=complex),
    Basis.TR: np.eye(2, dtype=complex),
}

_ALLOWED_BASES = {
    Kind.POLARIZATION: {Basis.HV, Basis.RL},
    Kind.PORT: {Basis.TR},
    Kind.SPIN: {Basis.PM},
}

OUTCOME_SYMBOLS = {
    Basis.HV: ("H", "V"),
    Basis.PM: ("+", "-"),
    Basis.RL: ("R", "L"),
    Basis.TR: ("t", "r"),
}

KET = {
    "R": np.array([1, 0], dtype=complex),
    "L": np.array([0, 1], dtype=complex),
    "H": np.array([1, 1], dtype=complex) * _SQRT2_INV,
    "V": np.array([-1j, 1j], dtype=complex) * _SQRT2_INV,
    "up": np.array([1, 0], dtype=complex),
    "down": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) * _SQRT2_INV,
    "-": np.array([1, -1], dtype=complex) * _SQRT2_INV,
    "t": np.array([1, 0], dtype=complex),
    "r": np.array([0, 1], dtype=complex),
}


# branch weights below this are rounding residue of an exactly forbidden outcome
ZERO_PROBABILITY = 1e-24


class RegisterError(ValueError):
    """Raised for malformed registers or operations on the wrong subsystems."""


class ZeroNormError(ValueError):
    """Raised when a state with no surviving amplitude is measured or compared."""


@dataclass(frozen=True, eq=False)
class PureState:
    labels: tuple[Label, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise RegisterError(f"duplicate labels in register: {labels}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise RegisterError(
                f"amplitude vector has length {amps.size}, expected {2 ** len(labels)}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def index(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise RegisterError(f"label {label} not in register {self.labels}") from None

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape((2,) * self.n)

    def normalized(self) -> PureState:
        nrm = self.norm2
        if nrm <= 0:
            raise ZeroNormError("cannot normalize a zero-norm state")
        return PureState(self.labels, self.amplitudes / np.sqrt(nrm))

    def reordered(self, order: Sequence[Label]) -> PureState:
        order = tuple(order)
        if len(order) != self.n or set(order) != set(self.labels):
            raise RegisterError(f"cannot reorder {self.labels} to {order}")
        axes = [self.index(lab) for lab in order]
        return PureState(order, np.transpose(self.tensor(), axes).reshape(-1))

    def __repr__(self) -> str:
        return f"PureState(labels={[str(x) for x in self.labels]}, norm2={self.norm2:.6g})"


def make_state(spec: Iterable[tuple[Label, Sequence[complex]]]) -> PureState:
    """Tensor product of normalized single-subsystem states, first entry most significant."""
    labels = []
    amps = np.ones(1, dtype=complex)
    for label, pair in spec:
        vec = np.asarray(pair, dtype=complex).reshape(-1)
        if vec.size != 2:
            raise RegisterError(f"{label}: expected 2 amplitudes, got {vec.size}")
        nrm = float(np.vdot(vec, vec).real)
        if abs(nrm - 1) > NORM_EPS:
            raise RegisterError(f"{label}: amplitude pair not normalized (|a|^2+|b|^2={nrm!r})")
        labels.append(label)
        amps = np.kron(amps, vec)
    return PureState(tuple(labels), amps)


def join(*states: PureState) -> PureState:
    """Tensor product of independent registers."""
    labels: tuple[Label, ...] = ()
    amps = np.ones(1, dtype=complex)
    for st in states:
        labels = labels + st.labels
        amps = np.kron(amps, st.amplitudes)
    return PureState(labels, amps)


def _check_pair(state: PureState, photon: Label, spin_label: Label) -> tuple[int, int]:
    if photon.kind is not Kind.POLARIZATION:
        raise RegisterError(f"{photon} is not a polarization label")
    if spin_label.kind is not Kind.SPIN:
        raise RegisterError(f"{spin_label} is not a spin label")
    return state.index(photon), state.index(spin_label)


def apply_diagonal_pair(state: PureState, photon: Label, spin_label: Label, coeffs) -> PureState:
    """Multiply each (polarization, spin) amplitude by its coefficient.

    ``coeffs`` are ordered (R-up, R-down, L-up, L-down).
    """
    ip, is_ = _check_pair(state, photon, spin_label)
    c = np.asarray(coeffs, dtype=complex).reshape(2, 2)
    shape = [1] * state.n
    shape[ip] = 2
    shape[is_] = 2
    # c is indexed [pol, spin]; broadcast along the two axes in register order
    factor = c if ip < is_ else c.T
    return PureState(state.labels, (state.tensor() * factor.reshape(shape)).reshape(-1))


def apply_single(state: PureState, label: Label, matrix) -> PureState:
    """Apply a 2x2 operator to one subsystem."""
    i = state.index(label)
    m = np.asarray(matrix, dtype=complex)
    out = np.tensordot(m, state.tensor(), axes=([1], [i]))
    return PureState(state.labels, np.moveaxis(out, 0, i).reshape(-1))


def apply_port_split(
    state: PureState, photon: Label, spin_label: Label, t0: complex, rh: complex
) -> PureState:
    """Route a photon to the transmitted or reflected port according to its spin.

    R-up and L-down are transmitted with amplitude ``t0``; R-down and L-up are
    reflected with amplitude ``rh``. A port label for the photon is appended.
    """
    ip, is_ = _check_pair(state, photon, spin_label)
    port_label = port(photon.index)
    if port_label in state.labels:
        raise RegisterError(f"photon {photon.index} already has a port label")
    tmask = np.array([[t0, 0], [0, t0]], dtype=complex)
    rmask = np.array([[0, rh], [rh, 0]], dtype=complex)
    shape = [1] * state.n
    shape[ip] = 2
    shape[is_] = 2
    tens = state.tensor()
    branches = []
    for mask in (tmask, rmask):
        factor = mask if ip < is_ else mask.T
        branches.append(tens * factor.reshape(shape))
    out = np.stack(branches, axis=-1)
    return PureState(state.labels + (port_label,), out.reshape(-1))


def _check_basis(label: Label, basis: Basis) -> None:
    if basis not in _ALLOWED_BASES[label.kind]:
        raise RegisterError(f"basis {basis.value} is not defined for {label.kind.value} subsystems")


def project(state: PureState, label: Label, basis: Basis, outcome: int) -> PureState:
    """Unnormalized projection onto one outcome; the measured subsystem is removed."""
    _check_basis(label, basis)
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    i = state.index(label)
    bra = BASIS_BRAS[basis][outcome]
    out = np.tensordot(bra, state.tensor(), axes=([0], [i]))
    labels = state.labels[:i] + state.labels[i + 1:]
    return PureState(labels, out.reshape(-1))


def branch_probabilities(state: PureState, label: Label, basis: Basis) -> tuple[float, float]:
    total = state.norm2
    if total <= 0:
        raise ZeroNormError("cannot measure a zero-norm state")
    w = [project(state, label, basis, k).norm2 for k in (0, 1)]
    return w[0] / total, w[1] / total


@dataclass(frozen=True)
class MeasurementRecord:
    label: Label
    basis: Basis
    outcome: int
    probability: float

    @property
    def symbol(self) -> str:
        return OUTCOME_SYMBOLS[self.basis][self.outcome]


def measure(
    state: PureState,
    label: Label,
    basis: Basis,
    rng: np.random.Generator | None = None,
    outcome: int | None = None,
) -> tuple[MeasurementRecord, PureState]:
    """Projective measurement of one subsystem.

    Pass ``outcome`` to force a branch (enumeration), otherwise ``rng`` samples it.
    The returned state is renormalized and no longer contains ``label``.
    """
    p0, p1 = branch_probabilities(state, label, basis)
    if outcome is None:
        if rng is None:
            raise ValueError("either rng or outcome must be given")
        outcome = 0 if rng.random() < p0 else 1
    prob = (p0, p1)[outcome]
    if prob <= ZERO_PROBABILITY:
        raise ZeroNormError(f"forced outcome {outcome} on {label} has zero probability")
    post = project(state, label, basis, outcome).normalized()
    return MeasurementRecord(label, basis, outcome, prob), post


def overlap_amplitude(a: PureState, b: PureState) -> complex:
    """<a|b> between the normalized states, after aligning b's subsystem order to a's."""
    if a.n != b.n or set(a.labels) != set(b.labels):
        raise RegisterError(f"mismatched registers: {a.labels} vs {b.labels}")
    a = a.normalized()
    b = b.reordered(a.labels).normalized()
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def amplitudes_in(state: PureState, order: Sequence[Label]) -> np.ndarray:
    return state.reordered(order).amplitudes


def reduced_purity(state: PureState, keep: Sequence[Label]) -> float:
    """Tr(rho^2) of the normalized reduced state on ``keep`` (1 means no entanglement with the rest)."""
    keep = tuple(keep)
    rest = tuple(lab for lab in state.labels if lab not in keep)
    st = state.normalized().reordered(keep + rest)
    mat = st.amplitudes.reshape(2 ** len(keep), 2 ** len(rest))
    s = np.linalg.svd(mat, compute_uv=False)
    return float(np.sum(s ** 4))
