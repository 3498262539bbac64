import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ll_lab import snapshot
from ll_lab.fields import (Magnetization, SphereError, ValidityError, WaveField, check_eps,
                           check_sphere_constraint, check_validity, edge_jump,
                           magnetization_from_wavefield, renormalize,
                           scaled_energy_identity_residual, wavefield_from_magnetization)
from ll_lab.solitons import ll_traveling_wave, scaled_params, upsilon_eps
from ll_lab.spectral import grid_for_decay, make_grid

from conftest import random_admissible


@pytest.fixture
def grid():
    return make_grid(256, 60.0)


@pytest.mark.parametrize("eps,t", [(0.5, 0.0), (0.01, 3.7)])
def test_zero_field_maps_to_e2(grid, eps, t):
    m = magnetization_from_wavefield(WaveField.zeros(grid), eps, t)
    np.testing.assert_array_equal(m.m1, 0)
    np.testing.assert_array_equal(m.m2, 1)
    np.testing.assert_array_equal(m.m3, 0)


def test_e2_maps_to_zero(grid):
    psi = wavefield_from_magnetization(Magnetization.uniform(grid), 0.1, 2.0)
    assert np.max(np.abs(psi.psi)) == 0.0


def test_single_node_definition(grid):
    eps, t = 0.04, 0.3
    mc = np.zeros(grid.n, dtype=complex)
    j = 17
    mc[j] = np.sqrt(eps) * np.exp(-1j * t / eps)
    m2 = np.sqrt(1 - np.abs(mc) ** 2)
    m = Magnetization(grid, mc.real, m2, mc.imag)
    psi = wavefield_from_magnetization(m, eps, t)
    assert psi.psi[j] == pytest.approx(1.0 + 0j, abs=1e-14)


def test_validity_violation_reports_maximum(grid):
    psi = WaveField(grid, np.full(grid.n, 5.0 + 0j))
    with pytest.raises(ValidityError) as info:
        magnetization_from_wavefield(psi, 0.1)
    assert "5" in str(info.value)
    assert info.value.margin == pytest.approx(np.sqrt(0.1) * 5)


def test_nonpositive_m2_rejected(grid):
    m2 = np.ones(grid.n)
    m2[5] = -1.0
    m = Magnetization(grid, np.zeros(grid.n), m2, np.zeros(grid.n))
    with pytest.raises(SphereError):
        wavefield_from_magnetization(m, 0.1)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_eps_range(eps):
    with pytest.raises(ValueError):
        check_eps(eps)


def test_upsilon_matches_mapped_traveling_wave():
    eps = 0.01
    p = scaled_params(1.0, 1.0, eps)
    g = grid_for_decay(p.decay_rate, 2048)
    ups = upsilon_eps(1.0, 1.0, eps, 0.0, g)
    m = magnetization_from_wavefield(ups, eps, 0.0)
    tw = ll_traveling_wave(p, 0.0, g)
    for a, b in zip(m.as_array(), tw.as_array()):
        assert np.max(np.abs(a - b)) < 1e-10


def test_traveling_wave_maps_to_upsilon():
    eps, t = 0.01, 0.7
    p = scaled_params(0.5, 1.0, eps)
    g = grid_for_decay(p.decay_rate, 2048, center_span=abs(p.c) * t)
    psi = wavefield_from_magnetization(ll_traveling_wave(p, t, g), eps, t)
    assert np.max(np.abs(psi.psi - upsilon_eps(0.5, 1.0, eps, t, g).psi)) < 1e-10


def test_scaled_energy_zero_pair(grid):
    psi = WaveField.zeros(grid)
    assert scaled_energy_identity_residual(magnetization_from_wavefield(psi, 0.1), psi, 0.1) == 0.0


def test_scaled_energy_soliton_pair():
    eps = 0.01
    g = grid_for_decay(1.0, 2048)
    psi = upsilon_eps(0.0, 1.0, eps, 0.0, g)
    m = magnetization_from_wavefield(psi, eps)
    assert scaled_energy_identity_residual(m, psi, eps) < 1e-8
    wrong = WaveField(g, 2 * psi.psi)
    assert scaled_energy_identity_residual(m, wrong, eps) > 0.1


def test_scaled_energy_spectral_refinement():
    eps = 0.05
    res = []
    for n in (128, 256, 512):
        g = make_grid(n, 80.0)
        psi = upsilon_eps(0.0, 1.0, eps, 0.0, g)
        res.append(scaled_energy_identity_residual(magnetization_from_wavefield(psi, eps), psi, eps))
    assert res[1] < res[0] / 100 or res[1] < 1e-12
    assert res[2] < 1e-12


def test_sphere_constraint_cases(grid):
    assert check_sphere_constraint(Magnetization.uniform(grid)) == 0.0
    rng = np.random.default_rng(3)
    m = magnetization_from_wavefield(random_admissible(grid, rng, 0.1), 0.1, 0.4)
    assert check_sphere_constraint(m) < 1e-14
    doubled = Magnetization(grid, m.m1, 2 * Magnetization.uniform(grid).m2, m.m3)
    assert check_sphere_constraint(doubled) > 1


def test_renormalize(grid):
    rng = np.random.default_rng(5)
    m = magnetization_from_wavefield(random_admissible(grid, rng, 0.2), 0.2)
    same = renormalize(m)
    for a, b in zip(same.as_array(), m.as_array()):
        np.testing.assert_allclose(a, b, atol=1e-15)
    scaled = Magnetization.from_array(grid, 1.01 * m.as_array())
    back = renormalize(scaled)
    for a, b in zip(back.as_array(), m.as_array()):
        np.testing.assert_allclose(a, b, atol=1e-15)
    arr = m.as_array()
    arr[:, 7] = 0
    with pytest.raises(SphereError):
        renormalize(Magnetization.from_array(grid, arr))


def test_fields_are_immutable(grid):
    m = Magnetization.uniform(grid)
    with pytest.raises(ValueError):
        m.m2[0] = 0.0
    psi = WaveField.zeros(grid)
    with pytest.raises(ValueError):
        psi.psi[0] = 1.0


def test_field_length_checked(grid):
    with pytest.raises(ValueError):
        WaveField(grid, np.zeros(grid.n - 2))


def test_edge_jump():
    assert edge_jump(np.tanh(np.linspace(-20, 20, 64))) == 2.0
    assert edge_jump(-np.tanh(np.linspace(-20, 20, 64))) == -2.0
    assert edge_jump(np.ones(64)) == 0.0
    assert edge_jump(np.linspace(-0.2, 0.3, 64)) == 0.0


def test_validity_margin_default(grid):
    psi = WaveField(grid, np.full(grid.n, 2.0 + 0j))
    assert check_validity(psi, 0.2) == pytest.approx(np.sqrt(0.2) * 2)
    with pytest.raises(ValidityError):
        check_validity(psi, 0.25)  # margin 1.0 > 0.9


@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 0.9), st.floats(-5, 5), st.floats(0.05, 0.89))
@settings(max_examples=40, deadline=None)
def test_roundtrip(seed, eps, t, peak):
    g = make_grid(128, 40.0)
    psi = random_admissible(g, np.random.default_rng(seed), eps, peak)
    m = magnetization_from_wavefield(psi, eps, t)
    assert check_sphere_constraint(m) < 1e-14
    assert np.all(m.m2 > 0)
    back = wavefield_from_magnetization(m, eps, t)
    assert np.max(np.abs(back.psi - psi.psi)) <= 1e-12 * max(1.0, np.max(np.abs(psi.psi)))


@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
@settings(max_examples=30, deadline=None)
def test_phase_equivariance(seed, theta):
    eps = 0.1
    g = make_grid(64, 30.0)
    psi = random_admissible(g, np.random.default_rng(seed), eps)
    m = magnetization_from_wavefield(psi, eps)
    r = magnetization_from_wavefield(WaveField(g, np.exp(1j * theta) * psi.psi), eps)
    rot = np.exp(1j * theta) * (m.m1 + 1j * m.m3)
    np.testing.assert_allclose(r.m1, rot.real, atol=1e-15)
    np.testing.assert_allclose(r.m3, rot.imag, atol=1e-15)
    np.testing.assert_allclose(r.m2, m.m2, atol=1e-15)


@pytest.mark.parametrize("kind", ["mag", "wave", "real"])
def test_snapshot_roundtrip(tmp_path, grid, kind):
    rng = np.random.default_rng(1)
    psi = random_admissible(grid, rng, 0.1)
    if kind == "mag":
        field = magnetization_from_wavefield(psi, 0.1, 0.2)
    elif kind == "wave":
        field = psi
    else:
        field = (grid, psi.psi.real)
    path = snapshot.save(tmp_path / "f.field", field)
    back = snapshot.load(path)
    if kind == "mag":
        np.testing.assert_array_equal(back.as_array(), field.as_array())
        assert back.grid == grid
    elif kind == "wave":
        np.testing.assert_array_equal(back.psi, field.psi)
    else:
        np.testing.assert_array_equal(back[1], field[1])


def test_snapshot_header_layout(grid):
    data = snapshot.encode(WaveField.zeros(grid))
    assert data[:4] == b"LLFS"
    assert data[6:10] == b"CPLX"
    assert len(data) == snapshot.HEADER.size + 16 * grid.n


@pytest.mark.parametrize("mutate", ["magic", "version", "kind", "truncate"])
def test_snapshot_corruption(grid, mutate):
    data = bytearray(snapshot.encode(WaveField.zeros(grid)))
    if mutate == "magic":
        data[0:4] = b"XXXX"
    elif mutate == "version":
        data[4] = 9
    elif mutate == "kind":
        data[6:10] = b"NOPE"
    else:
        data = data[:-8]
    with pytest.raises(snapshot.SnapshotError):
        snapshot.decode(bytes(data))
