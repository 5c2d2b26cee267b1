import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincavity import cavity
from spincavity.cavity import (
    CSV_HEADER,
    CavityParams,
    DecoherenceModel,
    ReflectionPair,
    SingularPhaseError,
    bsa_efficiency,
    bsa_fidelity,
    decoherence_factor,
    evaluate_point,
    phase_difference,
    reflection_coefficients,
    solve_all_phase_conditions,
    solve_phase_condition,
    survival_by_class,
    sweep_metrics,
)


def pair(a, b):
    return ReflectionPair(complex(a), complex(b), 0.0)


def test_params_validation():
    with pytest.raises(ValueError):
        CavityParams(g=1, kappa=0, kappa_s=0, gamma=0)
    with pytest.raises(ValueError):
        CavityParams(g=1, kappa=1, kappa_s=-0.1, gamma=0)
    with pytest.raises(ValueError):
        CavityParams.normalized(0.5, -1.0)


def test_normalized_units():
    p = CavityParams.normalized(0.5, 1.0, 0.01)
    assert p.total_decay == pytest.approx(1.0)
    assert p.kappa == pytest.approx(0.5) and p.gamma == pytest.approx(0.01)
    assert CavityParams.normalized(0.5, 1.0, 0.1, "kappa").gamma == pytest.approx(0.05)


def test_cold_cavity_on_resonance_without_leakage():
    p = CavityParams(g=0.7, kappa=1.0, kappa_s=0.0, gamma=0.01)
    assert reflection_coefficients(p, 0.0).r0 == -1


def test_uncoupled_hot_equals_cold():
    p = CavityParams(g=0.0, kappa=0.6, kappa_s=0.4, gamma=1e-9)
    for w in (-1.0, 0.0, 0.3):
        c = reflection_coefficients(p, w)
        assert c.rh == pytest.approx(c.r0, abs=1e-8)


def test_far_detuned_cold_reflection_is_unity():
    p = CavityParams(g=0.5, kappa=0.6, kappa_s=0.4, gamma=0.01)
    for w in (1e3, -1e3):
        assert abs(reflection_coefficients(p, w).r0 - 1) < 1e-3


def test_phase_difference_limits():
    assert phase_difference(CavityParams(0.0, 1.0, 0.0, 1e-9), 0.3) == pytest.approx(0.0, abs=1e-9)
    strong = CavityParams(g=50.0, kappa=1.0, kappa_s=0.0, gamma=0.01)
    assert abs(abs(phase_difference(strong, 0.0)) - math.pi) < 1e-3


def test_phase_difference_singular_point():
    # lossless-free cold cavity with kappa_s = kappa has r0 = 0 on resonance
    p = CavityParams(g=0.3, kappa=0.5, kappa_s=0.5, gamma=0.01)
    with pytest.raises(SingularPhaseError):
        phase_difference(p, 0.0)


def test_phase_is_continuous_away_from_wraps():
    p = CavityParams.normalized(0.5, 0.3)
    for w in np.linspace(-2, 2, 41):
        a, b = phase_difference(p, w), phase_difference(p, w + 1e-6)
        if abs(abs(a) - math.pi) > 0.1:
            assert abs(b - a) < 1e-3


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.0, 0.2), st.floats(-5, 5))
def test_reflection_is_passive(g, ks, gamma, w):
    c = reflection_coefficients(CavityParams.normalized(g, ks, gamma), w)
    assert c.abs_r0 <= 1 + 1e-9 and c.abs_rh <= 1 + 1e-9


def test_solutions_hit_the_target():
    p = CavityParams.normalized(0.51, 0.0)
    sols = solve_phase_condition(p, math.pi / 2)
    assert sols
    for s in sols:
        assert abs(phase_difference(p, s.omega_prime) - math.pi / 2) < 1e-9


def test_solutions_pair_up_under_detuning_reflection():
    p = CavityParams.normalized(0.8, 0.3)
    plus = sorted(s.omega_prime for s in solve_phase_condition(p, math.pi / 2))
    minus = sorted(-s.omega_prime for s in solve_phase_condition(p, -math.pi / 2))
    assert plus and np.allclose(plus, minus, atol=1e-8)


def test_no_solution_above_leakage_threshold():
    for g in np.linspace(0.01, 3, 15):
        assert solve_all_phase_conditions(CavityParams.normalized(g, 1.4)) == []


def test_window_validation():
    p = CavityParams.normalized(0.5, 0.0)
    with pytest.raises(ValueError):
        solve_phase_condition(p, window=(1.0, -1.0))
    with pytest.raises(ValueError):
        solve_phase_condition(p, target=0.3)


def test_fidelity_closed_form_examples():
    assert bsa_fidelity(pair(0.7, 0.7)).f_phi == pytest.approx(1.0)
    assert bsa_fidelity(pair(1.0, 0.5)).f_phi == pytest.approx(0.8, abs=1e-12)
    singular = bsa_fidelity(pair(1.0, 0.0))
    assert singular.singular and singular.f_phi == 0.0 and singular.f_psi == 1.0


def test_efficiency_examples():
    assert bsa_efficiency(pair(1, 1)) == pytest.approx(1.0)
    assert bsa_efficiency(pair(1, 0)) == pytest.approx(0.25)
    surv = survival_by_class(pair(1.0, 0.5))
    assert (surv.psi + surv.phi) / 2 == pytest.approx(bsa_efficiency(pair(1.0, 0.5)))


def test_decoherence_factor():
    assert decoherence_factor(DecoherenceModel(2.0, 0.0)) == 1.0
    assert decoherence_factor(DecoherenceModel(2.0, 2.0)) == pytest.approx(0.6839397205857212, abs=1e-15)
    assert decoherence_factor(DecoherenceModel(1.0, 1e4)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        DecoherenceModel(0.0, 1.0)


def test_operating_point_with_calibrated_gamma():
    best = evaluate_point(0.51, 1e-6, 0.1, "kappa").best("f_phi")
    assert best.f_phi == pytest.approx(0.98, abs=0.005)
    assert best.eta == pytest.approx(0.699, abs=0.005)


def test_best_branch_selection():
    point = evaluate_point(0.086, 1.1, 0.1, "kappa")
    assert point.best("eta").eta >= point.best("f_phi").eta
    assert point.best("f_phi").f_phi >= point.best("eta").f_phi
    with pytest.raises(ValueError):
        point.best("bogus")


def test_sweep_csv_layout():
    grid = sweep_metrics([0.1, 0.51], [0.0, 1.4], n_scan=2001)
    rows = list(csv.reader(io.StringIO(grid.to_csv())))
    assert tuple(rows[0]) == CSV_HEADER
    none_rows = [r for r in rows[1:] if r[2] == "none"]
    assert len(none_rows) == 2 and all(r[1] == "1.4" for r in none_rows)
    # values survive a text round trip exactly
    for r in rows[1:]:
        if r[2] != "none":
            assert float(r[6]) == float(repr(float(r[6])))


def test_sweep_is_worker_independent():
    a = sweep_metrics([0.2, 0.6, 1.0], [0.0, 0.5], n_scan=2001, workers=1).to_csv()
    b = sweep_metrics([0.2, 0.6, 1.0], [0.0, 0.5], n_scan=2001, workers=2).to_csv()
    assert a == b


def test_gamma_sensitivity_rows():
    rows = cavity.gamma_sensitivity([(0.51, 1e-6)])
    assert [r["gamma_ratio"] for r in rows] == [0.001, 0.01, 0.05]
    etas = [r["eta"] for r in rows]
    assert etas == sorted(etas, reverse=True)
