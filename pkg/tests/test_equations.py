import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ll_lab.equations import (AnisotropyParams, consistency_residual, cs_rhs, effective_field,
                              ll_rhs, ll_rhs_array, nls_eps_rhs, remainder_R_eps,
                              second_order_ll_residual)
from ll_lab.fields import Magnetization, ValidityError, WaveField, magnetization_from_wavefield
from ll_lab.solitons import (SolitonParams, ll_traveling_wave, ll_traveling_wave_dt,
                             scaled_params, upsilon_eps)
from ll_lab.spectral import grid_for_decay, make_grid, spectral_derivative

from conftest import random_admissible


def random_unit(grid, rng):
    v = np.stack([np.cos(np.arange(grid.n) * rng.uniform(0.01, 0.3) + rng.uniform(0, 6)) for _ in range(3)])
    v += 0.3 * rng.normal(size=v.shape)
    return Magnetization.from_array(grid, v / np.linalg.norm(v, axis=0))


def test_constant_solutions():
    g = make_grid(64, 20.0)
    a = AnisotropyParams(1.0, 2.0)
    for s in (1, -1):
        assert np.max(np.abs(ll_rhs(Magnetization.uniform(g, (0, s, 0)), a))) == 0.0


def test_anisotropy_must_be_nonnegative():
    with pytest.raises(ValueError):
        AnisotropyParams(-1.0, 0.0)


@given(st.integers(0, 2**32 - 1), st.floats(0, 10), st.floats(0, 10), st.floats(-10, 10))
@settings(max_examples=40, deadline=None)
def test_orthogonality_and_gauge(seed, l1, l3, gauge):
    g = make_grid(64, 20.0)
    m = random_unit(g, np.random.default_rng(seed))
    a = AnisotropyParams(l1, l3)
    rhs = ll_rhs(m, a)
    dots = np.sum(rhs * m.as_array(), axis=0)
    scale = np.max(np.abs(effective_field(g, m.as_array(), a)))
    assert np.max(np.abs(dots)) <= 1e-13 * scale
    shifted = ll_rhs(m, a, gauge=gauge)
    assert np.max(np.abs(shifted - rhs)) <= 1e-13 * max(scale, abs(gauge))


@pytest.mark.parametrize("p", [SolitonParams(1.0, 1.0, 0.0, 1), SolitonParams(2.0, 1.0, 0.5, -1),
                               SolitonParams(1.0, 0.0, -0.5, 1), SolitonParams(4.0, delta=-1, case="i")],
                         ids=str)
def test_ll_rhs_matches_traveling_wave(p):
    g = grid_for_decay(p.decay_rate, 1024, center_span=abs(p.c) * 0.3)
    m = ll_traveling_wave(p, 0.3, g)
    rhs = ll_rhs(m, AnisotropyParams.uniaxial(p.lam))
    assert np.max(np.abs(rhs - ll_traveling_wave_dt(p, 0.3, g))) < 1e-9


def test_nls_rhs_zero():
    g = make_grid(64, 20.0)
    assert np.max(np.abs(nls_eps_rhs(WaveField.zeros(g), 0.1).psi)) == 0.0
    assert np.max(np.abs(cs_rhs(WaveField.zeros(g)).psi)) == 0.0


def test_nls_rhs_validity():
    g = make_grid(64, 20.0)
    with pytest.raises(ValidityError):
        nls_eps_rhs(WaveField(g, np.full(64, 4.0 + 0j)), 0.1)


@pytest.mark.parametrize("c,omega,eps", [(0.0, 1.0, 0.01), (1.0, 1.0, 0.1), (0.5, 2.0, 0.05)])
def test_upsilon_solves_nls_eps(c, omega, eps):
    t = 0.4
    alpha = np.sqrt(omega - c * c / 4)
    g = grid_for_decay(alpha, 1024, center_span=c * t)
    ups = upsilon_eps(c, omega, eps, t, g)
    # the profile travels and rotates, so the time derivative is exact from x-derivatives
    exact = -c * spectral_derivative(g, ups.psi, 1) + 1j * omega * ups.psi
    assert np.max(np.abs(nls_eps_rhs(ups, eps).psi - exact)) < 1e-8


def test_cs_rhs_plane_wave():
    L = 2 * np.pi
    g = make_grid(32, L)
    a, k = 0.7, 3.0
    psi = a * np.exp(1j * k * g.nodes)
    expected = 1j * (a * a / 2 - k * k) * psi
    np.testing.assert_allclose(cs_rhs(WaveField(g, psi)).psi, expected, atol=1e-12)


def test_nls_rhs_tends_to_cs():
    g = make_grid(256, 60.0)
    psi = random_admissible(g, np.random.default_rng(2), 0.1, peak=0.5)
    gaps = []
    for eps in (1e-2, 1e-3, 1e-4):
        gaps.append(np.max(np.abs(nls_eps_rhs(psi, eps).psi - cs_rhs(psi).psi)))
    assert gaps[0] / gaps[1] == pytest.approx(10, rel=0.05)
    assert gaps[1] / gaps[2] == pytest.approx(10, rel=0.05)
    # the gap is eps times the remainder, up to the sign of i
    r = remainder_R_eps(psi, 1e-4).psi
    np.testing.assert_allclose(nls_eps_rhs(psi, 1e-4).psi - cs_rhs(psi).psi, -1j * 1e-4 * r, atol=1e-12)


def test_remainder_zero_and_constant():
    g = make_grid(32, 10.0)
    assert np.max(np.abs(remainder_R_eps(WaveField.zeros(g), 0.1).psi)) == 0.0
    a, eps = 1.3, 0.2
    r = remainder_R_eps(WaveField(g, np.full(32, a + 0j)), eps).psi
    expected = -a**5 / (2 * (1 + np.sqrt(1 - eps * a * a)) ** 2)
    np.testing.assert_allclose(r, expected, rtol=1e-14)


@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 0.5), st.floats(0.05, 0.9))
@settings(max_examples=30, deadline=None)
def test_consistency_identity(seed, eps, peak):
    g = make_grid(128, 40.0)
    psi = random_admissible(g, np.random.default_rng(seed), eps, peak)
    scale = max(1.0, np.max(np.abs(psi.psi))) ** 3
    assert consistency_residual(psi, eps) < 1e-10 * scale


def test_second_order_trivial_and_solutions():
    g = make_grid(64, 20.0)
    e2 = Magnetization.uniform(g)
    assert second_order_ll_residual(e2, np.zeros((3, 64)), 0.1) == 0.0
    eps = 0.1
    p = scaled_params(1.0, 1.0, eps)
    g = grid_for_decay(p.decay_rate, 1024, center_span=0.2)
    m = ll_traveling_wave(p, 0.2, g)
    dtt = ll_traveling_wave_dt(p, 0.2, g, order=2)
    assert second_order_ll_residual(m, dtt, eps) < 1e-6
    # a generic field is not a solution
    other = magnetization_from_wavefield(random_admissible(g, np.random.default_rng(0), eps), eps)
    assert second_order_ll_residual(other, np.zeros((3, g.n)), eps) > 1e-2


def test_ll_rhs_array_shape():
    g = make_grid(16, 5.0)
    out = ll_rhs_array(g, Magnetization.uniform(g).as_array(), AnisotropyParams(1, 1))
    assert out.shape == (3, 16)
