import numpy as np
import pytest
from scipy.integrate import trapezoid

import cache
from reference_values import H3_LOW_COMPUTED, LOW
from xp2.errors import DomainError
from xp2.model import ModelParams, Parity, QuantForm
from xp2.numerics import ode_solve
from xp2.quantum import (
    OscillatorBasisConfig,
    ShootingConfig,
    build_oscillator_matrices,
    hermite_functions,
    ode_rhs,
    shifted_identity_check,
    shoot,
    spectrum_matrix,
    spectrum_shooting,
    wavefunction_matrix,
    wavefunction_shooting,
)
from xp2.quantum.oscillator import _Padded
from xp2.semiclassical import semiclassical_levels

FORMS = [1, 2, 3]


# -- forms and the unified equation ------------------------------------------------

def test_form_table():
    assert [(f.c, f.drift) for f in QuantForm] == [(1.0, 2.0), (0.0, 1.0), (0.0, 0.0)]
    assert QuantForm.parse("H2") is QuantForm.II
    assert QuantForm.parse("iii") is QuantForm.III
    with pytest.raises(DomainError):
        QuantForm.parse("4")


def test_rhs_at_origin(unit):
    e = 1.7
    y = np.array([0.8, 0.3])
    d3 = ode_rhs(QuantForm.III, unit, e).rhs(0.0, y)
    assert d3[1] == pytest.approx(-e * e * 0.8)
    d1 = ode_rhs(QuantForm.I, ModelParams(2.0), e).rhs(0.0, y)
    assert d1[1] == pytest.approx(-(e * e + 1) * 0.8 / 4.0)


def test_rhs_drift_term(unit):
    y = np.array([0.0, 1.0])
    for form in QuantForm:
        d = ode_rhs(form, unit, 0.0).rhs(1.0, y)
        assert d[1] == pytest.approx(-form.drift / 2.0)


@pytest.mark.parametrize("form", FORMS)
def test_generic_solutions_grow_like_exp_ax(form):
    params = ModelParams(0.8)
    sol = ode_solve(ode_rhs(QuantForm(form), params, 1.234), [1.0, 0.0], (0.0, 80.0), 1e-11,
                    t_eval=[70.0, 80.0])
    logs = sol.log_scale + np.log(np.abs(sol.y[:, 0]))
    slope = (logs[1] - logs[0]) / 10.0
    assert slope == pytest.approx(params.a, rel=0.02)


# -- shooting ----------------------------------------------------------------------

def test_mismatch_sign_changes_at_reference_levels(unit):
    lo, hi = shoot(1, unit, [0.80, 0.82], Parity.EVEN)
    assert lo * hi < 0
    lo, hi = shoot(2, unit, [1.98, 2.00], Parity.ODD)
    assert lo * hi < 0


def test_mismatch_finite_on_scan(unit):
    e = np.linspace(0, 25, 126)
    for parity in Parity:
        m = shoot(3, unit, e, parity)
        assert np.all(np.isfinite(m))
        assert np.all(np.abs(m) <= 1.0)


def test_shoot_rejects_negative_energy(unit):
    with pytest.raises(DomainError):
        shoot(1, unit, -0.1, Parity.EVEN)


@pytest.mark.parametrize("label", ["H1", "H2"])
def test_shooting_reproduces_reference_rows(label):
    spec = cache.shooting(int(label[1]))
    assert np.max(np.abs(np.array(spec.energies()) - LOW[label])) <= 2e-4


def test_shooting_h3_frozen_values():
    assert np.allclose(cache.shooting(3).energies(), H3_LOW_COMPUTED, atol=2e-9)


@pytest.mark.parametrize("form", FORMS)
def test_levels_alternate_in_parity_and_increase(form):
    for spec in (cache.shooting(form), cache.matrix(form)):
        assert [lv.parity for lv in spec] == [Parity.of_level(n) for n in range(1, 11)]
        e = spec.energies()
        assert all(b > a for a, b in zip(e, e[1:]))
        for lv in spec:
            assert lv.h_e == pytest.approx(lv.e ** 2 + 1.0, rel=1e-15)


def test_shooting_other_regulator_against_matrix():
    params = ModelParams(0.7)
    a = spectrum_shooting(2, params, 4)
    b = spectrum_matrix(2, params, OscillatorBasisConfig(400), 4)
    assert np.max(np.abs(np.array(a.energies()) - b.energies())) < 1e-6


def test_hbar_scaling_consistent_with_semiclassical_counting():
    # the semiclassical staircase handles hbar directly, the quantum backends by
    # rescaling; quantum minus semiclassical must shrink as hbar -> 0 at fixed E
    params = ModelParams(1.0, hbar=0.25)
    q = spectrum_matrix(2, params, OscillatorBasisConfig(400), 12)
    s = semiclassical_levels(params, n_max=12)
    assert abs(q.by_n(12).e - s.by_n(12).e) < 1e-3
    unit_q = spectrum_matrix(2, ModelParams(2.0), OscillatorBasisConfig(400), 12)
    assert q.by_n(12).e == pytest.approx(0.25 * unit_q.by_n(12).e, rel=1e-12)


def test_spectrum_shooting_validates_n():
    with pytest.raises(DomainError):
        spectrum_shooting(1, ModelParams(1.0), 0)


# -- oscillator basis --------------------------------------------------------------

def test_position_and_momentum_matrices(unit):
    x, p = build_oscillator_matrices(unit, OscillatorBasisConfig(60))
    assert np.all(np.diag(x) == 0)
    assert np.allclose(x, x.conj().T)
    assert np.allclose(p, p.conj().T)
    assert np.all(p.real == 0)
    comm = x @ p - p @ x
    half = 30
    assert np.max(np.abs(comm[:half, :half] - 1j * np.eye(half))) < 1e-13


def test_number_operator_spectrum():
    x, p = build_oscillator_matrices(ModelParams(1.0), OscillatorBasisConfig(40, 1.0))
    h = (x @ x + p @ p)[:20, :20]
    assert np.allclose(np.linalg.eigvalsh(h), 2 * np.arange(20) + 1, atol=1e-12)


@pytest.mark.parametrize("form", FORMS)
def test_matrix_agrees_with_shooting(form):
    a = np.array(cache.shooting(form).energies())
    b = np.array(cache.matrix(form).energies())
    assert np.max(np.abs(a - b)) <= 1e-6


def test_matrix_reference_values():
    assert np.max(np.abs(np.array(cache.matrix(1).energies()) - LOW["H1"])) <= 2e-4
    assert cache.matrix(3).by_n(1).e == pytest.approx(LOW["H3"][0], abs=2e-4)


def test_matrix_independent_of_length_scale(unit):
    a = spectrum_matrix(3, unit, OscillatorBasisConfig(400, 0.8), 6).energies()
    b = spectrum_matrix(3, unit, OscillatorBasisConfig(400, 1.3), 6).energies()
    assert np.max(np.abs(np.array(a) - b)) < 1e-7


def test_matrix_flags_truncation_artifacts(unit):
    spec = spectrum_matrix(1, unit, OscillatorBasisConfig(40), 10)
    for lv in spec.config["rejected"]:
        assert not lv.valid
    assert all(lv.valid and lv.h_e >= 1.0 for lv in spec)


def test_matrix_level_limit(unit):
    with pytest.raises(DomainError):
        spectrum_matrix(1, unit, OscillatorBasisConfig(40), 11)


def test_matrix_wavefunctions_orthonormal(unit):
    cfg = OscillatorBasisConfig(400)
    spec, vecs = spectrum_matrix(2, unit, cfg, 6, vectors=True)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(6), atol=1e-12)
    x = np.linspace(-30, 30, 6001)
    psi = wavefunction_matrix(vecs, unit, cfg, x)
    gram = trapezoid(psi[:, :, None] * psi[:, None, :], x, axis=0)
    assert np.max(np.abs(gram - np.eye(6))) < 1e-6


def test_hermite_functions_orthonormal():
    x = np.linspace(-15, 15, 3001)
    h = hermite_functions(12, x, 1.0)
    gram = trapezoid(h[:, None, :] * h[None, :, :], x, axis=2)
    assert np.allclose(gram, np.eye(12), atol=1e-10)


def test_shifted_identity_a_variant(unit):
    out = shifted_identity_check(unit)
    assert out["A"]["max_shift_error"] <= 1e-6
    assert out["A"]["interior_norm"] <= 1e-8
    assert np.allclose(out["A"]["shifts"], 0.75, atol=1e-6)


def test_shifted_identity_sign_corrected_b_variant(unit):
    out = shifted_identity_check(ModelParams(0.6))
    assert out["B_plus"]["max_shift_error"] <= 1e-6
    assert out["B_plus"]["interior_norm"] <= 1e-8


def test_literal_b_variant_differs_by_dilation_term(unit):
    # 0.5(BB^dag + B^dag B) - H_1 - 3/4 = -2 a^2 (xp + px) for B = D + ia(x - p) - a^2
    a = 0.9
    ops = _Padded(ModelParams(a), OscillatorBasisConfig(120))
    diff = ops.ladder_variant(-1.0, -1.0) - ops.hamiltonian(QuantForm.I) - 0.75 * np.eye(120)
    dil = ops.cut(ops.x @ ops.p + ops.p @ ops.x)
    assert np.max(np.abs((diff + 2 * a * a * dil)[:60, :60])) < 1e-10


# -- wavefunctions ---------------------------------------------------------------

@pytest.mark.parametrize("form", FORMS)
def test_wavefunctions_normalized_with_n_minus_one_nodes(form, unit):
    spec = cache.shooting(form)
    for n in (1, 2, 5, 10):
        wf = wavefunction_shooting(form, unit, spec.by_n(n))
        assert wf.norm() == pytest.approx(1.0, abs=1e-8)
        assert wf.sign_changes() == n - 1
        mirrored = wf.psi[::-1] * (1 if wf.parity is Parity.EVEN else -1)
        # psi(0) of odd states is the shooting residual, about 1e-12
        assert np.allclose(mirrored, wf.psi, atol=1e-10)


def test_normalization_independent_of_sampling(unit):
    lv = cache.shooting(3).by_n(7)
    coarse = wavefunction_shooting(3, unit, lv, samples=4001)
    fine = wavefunction_shooting(3, unit, lv, samples=32001)
    i = np.argmax(np.abs(coarse.psi))
    assert coarse.psi[i] == pytest.approx(fine.psi[8 * i], rel=1e-9)


def test_shooting_and_matrix_wavefunctions_agree(unit):
    cfg = OscillatorBasisConfig(400)
    spec, vecs = spectrum_matrix(1, unit, cfg, 3, vectors=True)
    wf = wavefunction_shooting(1, unit, cache.shooting(1).by_n(3), samples=2001,
                               x_extent=10.0)
    psi_m = wavefunction_matrix(vecs[:, 2], unit, cfg, wf.x)
    psi_m *= np.sign(psi_m[np.argmax(np.abs(psi_m) * (wf.x >= 0))])
    assert np.max(np.abs(psi_m - wf.psi)) < 1e-6


def test_wavefunction_tail_slope(unit):
    cfg = ShootingConfig(x_max=150.0)
    lv = cache.shooting(2).by_n(1)
    wf = wavefunction_shooting(2, unit, lv, cfg, samples=6001)
    x, psi = wf.x, wf.psi
    sel = (x > 135) & (x < 145)
    slope = np.polyfit(x[sel], np.log(np.abs(psi[sel])), 1)[0]
    assert slope == pytest.approx(-1.0, rel=0.01)


def test_wavefunction_with_hbar():
    params = ModelParams(1.0, hbar=0.5)
    spec = spectrum_shooting(3, params, 2)
    wf = wavefunction_shooting(3, params, spec.by_n(2))
    assert wf.norm() == pytest.approx(1.0, abs=1e-10)
    assert wf.sign_changes() == 1
