"""Input-output model of a charged quantum dot in a single-sided microcavity.

Rates and frequencies share one energy unit. :meth:`CavityParams.normalized`
uses ``kappa + kappa_s = 1``, the unit in which sweeps and CSV output are
expressed. Reflection coefficients follow the weak-excitation result

    r_h = 1 - kappa (i dX + gamma/2) / ((i dX + gamma/2)(i dC + kappa/2 + kappa_s/2) + g^2)
    r_0 = (i dC - kappa/2 + kappa_s/2) / (i dC + kappa/2 + kappa_s/2)

with ``dX = omega_x - omega`` and ``dC = omega_c - omega``.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

PASSIVITY_EPS = 1e-9
PHASE_TOL = 1e-10
DEFAULT_SCAN_POINTS = 20001

GammaReference = Literal["total", "kappa"]


class SingularPhaseError(ValueError):
    """A reflection coefficient vanishes, so its phase is undefined."""


@dataclass(frozen=True)
class CavityParams:
    g: float
    kappa: float
    kappa_s: float
    gamma: float
    omega_c: float = 0.0
    omega_x: float = 0.0

    def __post_init__(self) -> None:
        for name in ("g", "kappa_s", "gamma"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")
        for name in ("omega_c", "omega_x"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def normalized(
        cls,
        g_norm: float,
        ks_over_k: float,
        gamma_ratio: float = 0.01,
        gamma_reference: GammaReference = "total",
    ) -> CavityParams:
        """Resonant parameters in units where ``kappa + kappa_s = 1``.

        ``gamma_ratio`` is gamma/(kappa+kappa_s) for ``gamma_reference="total"``
        and gamma/kappa for ``gamma_reference="kappa"``.
        """
        if ks_over_k < 0:
            raise ValueError(f"ks_over_k must be >= 0, got {ks_over_k!r}")
        kappa = 1.0 / (1.0 + ks_over_k)
        kappa_s = ks_over_k * kappa
        if gamma_reference == "total":
            gamma = gamma_ratio
        elif gamma_reference == "kappa":
            gamma = gamma_ratio * kappa
        else:
            raise ValueError(f"unknown gamma_reference {gamma_reference!r}")
        return cls(g=g_norm, kappa=kappa, kappa_s=kappa_s, gamma=gamma)

    @property
    def total_decay(self) -> float:
        return self.kappa + self.kappa_s

    def scaled(self, factor: float) -> CavityParams:
        """All rates and frequencies multiplied by ``factor``."""
        return CavityParams(
            g=self.g * factor,
            kappa=self.kappa * factor,
            kappa_s=self.kappa_s * factor,
            gamma=self.gamma * factor,
            omega_c=self.omega_c * factor,
            omega_x=self.omega_x * factor,
        )

    def default_window(self) -> tuple[float, float]:
        half = 3 * self.g + 3 * self.total_decay
        return self.omega_c - half, self.omega_c + half


@dataclass(frozen=True)
class ReflectionPair:
    r0: complex
    rh: complex
    omega: float

    def __post_init__(self) -> None:
        for name in ("r0", "rh"):
            if abs(getattr(self, name)) > 1 + PASSIVITY_EPS:
                raise ValueError(f"|{name}| = {abs(getattr(self, name))!r} exceeds 1 (not passive)")

    @property
    def abs_r0(self) -> float:
        return abs(self.r0)

    @property
    def abs_rh(self) -> float:
        return abs(self.rh)


def _coefficients(params: CavityParams, omega):
    omega = np.asarray(omega, dtype=float)
    dx = 1j * (params.omega_x - omega) + params.gamma / 2
    dc = 1j * (params.omega_c - omega)
    half = (params.kappa + params.kappa_s) / 2
    r0 = (dc - params.kappa / 2 + params.kappa_s / 2) / (dc + half)
    den = dx * (dc + half) + params.g ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        rh = 1 - params.kappa * dx / np.asarray(den, dtype=complex)
    # g = 0 and gamma = 0 exactly on the trion line: 0/0, whose limit is the cold value
    rh = np.where(den == 0, r0, rh)
    return r0, rh


def reflection_coefficients(params: CavityParams, omega: float) -> ReflectionPair:
    r0, rh = _coefficients(params, omega)
    return ReflectionPair(complex(r0), complex(rh), float(omega))


def wrap_phase(x):
    """Map angles to (-pi, pi]."""
    y = np.angle(np.exp(1j * np.asarray(x, dtype=float)))
    return np.where(y <= -np.pi, np.pi, y)


def _phase_array(params: CavityParams, omega) -> np.ndarray:
    r0, rh = _coefficients(params, omega)
    ph = np.angle(rh * np.conj(r0))
    return np.where(ph <= -np.pi, np.pi, ph)


def phase_difference(params: CavityParams, omega: float) -> float:
    """arg(r_h / r_0) in (-pi, pi]."""
    r0, rh = _coefficients(params, omega)
    if abs(r0) == 0 or abs(rh) == 0:
        raise SingularPhaseError(f"reflection coefficient vanishes at omega={omega!r}")
    return float(_phase_array(params, omega))


@dataclass(frozen=True)
class PhaseSolution:
    omega_prime: float
    target: float
    branch_index: int
    residual: float = 0.0


def _normalize_target(target: float) -> float:
    if target in (1, +np.pi / 2):
        return np.pi / 2
    if target in (-1, -np.pi / 2):
        return -np.pi / 2
    raise ValueError(f"target must be +pi/2 or -pi/2, got {target!r}")


def _roots(params: CavityParams, target: float, lo: float, hi: float, n_scan: int, tol: float):
    grid = np.linspace(lo, hi, n_scan)
    ph = _phase_array(params, grid)
    f = ph - target
    jump = np.abs(np.diff(ph)) > np.pi
    sign_change = (f[:-1] * f[1:] < 0) & ~jump
    exact = np.flatnonzero(f == 0)
    idx = np.flatnonzero(sign_change)
    a = grid[idx].copy()
    b = grid[idx + 1].copy()
    fa = f[idx].copy()
    for _ in range(200):
        if a.size == 0:
            break
        m = 0.5 * (a + b)
        fm = _phase_array(params, m) - target
        left = fa * fm <= 0
        b = np.where(left, m, b)
        a = np.where(left, a, m)
        fa = np.where(left, fa, fm)
        res = np.abs(wrap_phase(_phase_array(params, 0.5 * (a + b)) - target))
        if np.all((res < tol) | (b - a <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(a)))):
            break
    cands = np.concatenate([0.5 * (a + b), grid[exact]])
    out = []
    for w in np.sort(cands):
        res = float(np.abs(wrap_phase(_phase_array(params, w) - target)))
        # brackets across a zero of r_h (phase discontinuity) never converge
        if res < 1e-9:
            out.append((float(w), res))
    return out


def solve_phase_condition(
    params: CavityParams,
    target: float = np.pi / 2,
    window: tuple[float, float] | None = None,
    n_scan: int = DEFAULT_SCAN_POINTS,
    tol: float = PHASE_TOL,
) -> list[PhaseSolution]:
    """Frequencies in ``window`` where arg(r_h/r_0) equals ``target``.

    The window is scanned on a uniform grid; sign changes of the phase residual
    that are not wrap seams are refined by bisection. An empty list means the
    target phase is not reachable.
    """
    target = _normalize_target(target)
    lo, hi = params.default_window() if window is None else window
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"window must be a finite interval with lower < upper, got {(lo, hi)!r}")
    roots = _roots(params, target, lo, hi, n_scan, tol)
    return [PhaseSolution(w, target, i, res) for i, (w, res) in enumerate(roots)]


def solve_all_phase_conditions(
    params: CavityParams,
    window: tuple[float, float] | None = None,
    n_scan: int = DEFAULT_SCAN_POINTS,
) -> list[PhaseSolution]:
    """Both +pi/2 and -pi/2 solutions, merged and re-indexed by detuning."""
    sols = solve_phase_condition(params, np.pi / 2, window, n_scan)
    sols += solve_phase_condition(params, -np.pi / 2, window, n_scan)
    sols.sort(key=lambda s: s.omega_prime)
    return [PhaseSolution(s.omega_prime, s.target, i, s.residual) for i, s in enumerate(sols)]


class BsaFidelity(NamedTuple):
    f_psi: float
    f_phi: float
    singular: bool = False


def bsa_fidelity(pair: ReflectionPair) -> BsaFidelity:
    """Amplitude fidelities of the lossy analyzer for the Psi and Phi classes."""
    a, b = pair.abs_r0, pair.abs_rh
    if a == 0 or b == 0:
        return BsaFidelity(1.0, 0.0, True)
    return BsaFidelity(1.0, 1 / math.sqrt(1 + 0.25 * (a / b - b / a) ** 2))


def bsa_efficiency(pair: ReflectionPair) -> float:
    """Survival probability averaged over the four Bell inputs."""
    return 0.25 * (pair.abs_r0 ** 2 + pair.abs_rh ** 2) ** 2


class ClassSurvival(NamedTuple):
    psi: float
    phi: float


def survival_by_class(pair: ReflectionPair) -> ClassSurvival:
    """Per-class survival: |r0 rh|^2 for Psi inputs, (|r0|^4 + |rh|^4)/2 for Phi inputs."""
    a2, b2 = pair.abs_r0 ** 2, pair.abs_rh ** 2
    return ClassSurvival(a2 * b2, 0.5 * (a2 * a2 + b2 * b2))


@dataclass(frozen=True)
class DecoherenceModel:
    t2e: float
    delta_t: float

    def __post_init__(self) -> None:
        if not self.t2e > 0:
            raise ValueError(f"t2e must be > 0, got {self.t2e!r}")
        if not self.delta_t >= 0:
            raise ValueError(f"delta_t must be >= 0, got {self.delta_t!r}")


def decoherence_factor(model: DecoherenceModel) -> float:
    return (1 + math.exp(-model.delta_t / model.t2e)) / 2


# -- sweeps -------------------------------------------------------------------

CSV_HEADER = ("g_norm", "ks_over_k", "branch", "omega_prime", "f_psi", "f_phi", "eta")


@dataclass(frozen=True)
class Branch:
    index: int
    omega_prime: float
    target: float
    f_psi: float
    f_phi: float
    eta: float


@dataclass(frozen=True)
class SweepPoint:
    g_norm: float
    ks_over_k: float
    params: CavityParams
    branches: tuple[Branch, ...]

    @property
    def has_solution(self) -> bool:
        return bool(self.branches)

    def best(self, by: Literal["eta", "f_phi"] = "eta") -> Branch | None:
        """Headline branch: maximal efficiency (default) or maximal Phi fidelity."""
        if not self.branches:
            return None
        if by == "eta":
            return max(self.branches, key=lambda br: (br.eta, br.f_phi))
        if by == "f_phi":
            return max(self.branches, key=lambda br: (br.f_phi, br.eta))
        raise ValueError(f"unknown branch criterion {by!r}")


def branch_metrics(params: CavityParams, sol: PhaseSolution) -> Branch:
    pair = reflection_coefficients(params, sol.omega_prime)
    fid = bsa_fidelity(pair)
    return Branch(sol.branch_index, sol.omega_prime, sol.target, fid.f_psi, fid.f_phi, bsa_efficiency(pair))


def evaluate_point(
    g_norm: float,
    ks_over_k: float,
    gamma_ratio: float = 0.01,
    gamma_reference: GammaReference = "total",
    window: tuple[float, float] | None = None,
    n_scan: int = DEFAULT_SCAN_POINTS,
) -> SweepPoint:
    params = CavityParams.normalized(g_norm, ks_over_k, gamma_ratio, gamma_reference)
    sols = solve_all_phase_conditions(params, window, n_scan)
    return SweepPoint(g_norm, ks_over_k, params, tuple(branch_metrics(params, s) for s in sols))


def _evaluate_star(args) -> SweepPoint:
    return evaluate_point(*args)


@dataclass(frozen=True)
class SweepGrid:
    g_norms: tuple[float, ...]
    ks_ratios: tuple[float, ...]
    gamma_ratio: float
    gamma_reference: str
    points: tuple[SweepPoint, ...] = field(repr=False)

    def point(self, g_norm: float, ks_over_k: float) -> SweepPoint:
        for p in self.points:
            if p.g_norm == g_norm and p.ks_over_k == ks_over_k:
                return p
        raise KeyError((g_norm, ks_over_k))

    def rows(self) -> list[tuple]:
        out = []
        for p in self.points:
            if not p.branches:
                out.append((p.g_norm, p.ks_over_k, "none", "", "", "", ""))
            for br in p.branches:
                out.append((p.g_norm, p.ks_over_k, br.index, br.omega_prime, br.f_psi, br.f_phi, br.eta))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows():
            # repr() of a float is the shortest round-trip decimal
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        return buf.getvalue()


def sweep_metrics(
    g_norms: Iterable[float],
    ks_ratios: Iterable[float],
    gamma_ratio: float = 0.01,
    gamma_reference: GammaReference = "total",
    window: tuple[float, float] | None = None,
    n_scan: int = DEFAULT_SCAN_POINTS,
    workers: int = 1,
) -> SweepGrid:
    """Evaluate every (ks_over_k, g_norm) grid point; ks_over_k is the outer loop."""
    g_norms = tuple(float(g) for g in g_norms)
    ks_ratios = tuple(float(k) for k in ks_ratios)
    if not g_norms or not ks_ratios:
        raise ValueError("sweep grids must be non-empty")
    jobs = [(g, k, gamma_ratio, gamma_reference, window, n_scan) for k in ks_ratios for g in g_norms]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        points = tuple(_evaluate_star(j) for j in jobs)
    return SweepGrid(g_norms, ks_ratios, gamma_ratio, gamma_reference, points)


def gamma_sensitivity(
    operating_points: Sequence[tuple[float, float]],
    gamma_ratios: Sequence[float] = (0.001, 0.01, 0.05),
    gamma_reference: GammaReference = "total",
    by: Literal["eta", "f_phi"] = "eta",
) -> list[dict]:
    """Headline (f_phi, eta) at each operating point for several trion decay rates."""
    rows = []
    for g_norm, ks in operating_points:
        for gr in gamma_ratios:
            best = evaluate_point(g_norm, ks, gr, gamma_reference).best(by)
            rows.append({
                "g_norm": g_norm,
                "ks_over_k": ks,
                "gamma_ratio": gr,
                "f_phi": None if best is None else best.f_phi,
                "eta": None if best is None else best.eta,
            })
    return rows
