import numpy as np
import pytest
from hypothesis import given, strategies as st

from bigridlab.grid import (Grid, PhysicalField, SpectralField, isdft, make_grid, read_field_csv,
                            sdft, sdft_direct, synthesize, write_field_csv)
from conftest import random_complex
from oracles import isdft_loops, sdft_loops


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_small_centered_grid_nodes_and_wavenumbers():
    g = make_grid(1.0, 4, centered=True)
    assert list(g.indices) == [-2, -1, 0, 1]
    np.testing.assert_allclose(g.x, [-2, -1, 0, 1])
    np.testing.assert_allclose(g.xi, [-np.pi, -np.pi / 2, 0, np.pi / 2], atol=1e-15)


def test_uncentered_grid_starts_at_zero():
    g = make_grid(0.5, 8, centered=False)
    assert g.origin_index == 0 and g.x[0] == 0.0 and g.x[-1] == 3.5


@pytest.mark.parametrize("h, M", [(0.0, 8), (-1.0, 8), (1.0, 6), (1.0, 1), (1.0, 0)])
def test_invalid_grids_rejected(h, M):
    with pytest.raises(ValueError):
        make_grid(h, M)


def test_desk_grid_length_and_spacing():
    g = make_grid(2 * np.pi / 256, 2048)
    assert g.L == pytest.approx(16 * np.pi, rel=1e-15)
    assert g.dxi == pytest.approx(1 / 8, rel=1e-14)
    assert g.xi.min() == pytest.approx(-np.pi / g.h) and g.xi.max() < np.pi / g.h


def test_field_shape_and_finiteness_checked():
    g = make_grid(1.0, 8)
    with pytest.raises(ValueError):
        PhysicalField(g, np.zeros(7))
    with pytest.raises(ValueError):
        SpectralField(g, np.full(8, np.nan))


def test_fields_are_immutable():
    g = make_grid(1.0, 8)
    f = PhysicalField(g, np.zeros(8))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_delta_transforms_to_constant_one():
    g = make_grid(1.0, 16)
    f = PhysicalField(g, (g.indices == 0).astype(complex))
    np.testing.assert_allclose(sdft(f).coeffs, np.ones(16), atol=1e-15)


def test_plane_wave_lands_in_one_bin():
    g = make_grid(1.0, 32)
    m0 = 21
    eta0 = g.xi[m0] * g.h
    f = PhysicalField(g, np.exp(1j * eta0 * g.indices))
    F = sdft(f).coeffs
    assert abs(F[m0] - g.h * g.M) < 1e-12
    assert np.max(np.abs(np.delete(F, m0))) < 1e-12


def test_constant_spectrum_synthesizes_delta():
    g = make_grid(1.0, 16)
    u = isdft(SpectralField(g, np.ones(16)))
    np.testing.assert_allclose(u.values, (g.indices == 0).astype(float), atol=1e-15)


def test_single_bin_synthesizes_unit_modulus_wave():
    g = make_grid(0.25, 64)
    coeffs = np.zeros(64, complex)
    coeffs[10] = g.L
    u = isdft(SpectralField(g, coeffs))
    np.testing.assert_allclose(np.abs(u.values), 1.0, atol=1e-13)


@pytest.mark.parametrize("origin", [-32, 0, 5])
def test_sdft_matches_double_loop_oracle(rng, origin):
    g = Grid(0.3, 64, origin)
    f = PhysicalField(g, random_complex(rng, 64))
    oracle = sdft_loops(f.values, g.h, origin)
    assert np.max(np.abs(sdft(f).coeffs - oracle)) <= 1e-12 * np.max(np.abs(oracle))
    np.testing.assert_allclose(sdft_direct(f).coeffs, oracle, rtol=0, atol=1e-12 * np.max(np.abs(oracle)))


def test_isdft_matches_double_loop_oracle(rng):
    g = Grid(0.7, 32, -16)
    F = SpectralField(g, random_complex(rng, 32))
    np.testing.assert_allclose(isdft(F).values, isdft_loops(F.coeffs, g.h, -16), atol=1e-13)


@pytest.mark.parametrize("M", [16, 64, 128, 256, 2048])
def test_round_trips(rng, M):
    g = make_grid(2 * np.pi / 256, M)
    f = PhysicalField(g, random_complex(rng, M))
    F = SpectralField(g, random_complex(rng, M))
    assert rel(isdft(sdft(f)).values, f.values) <= 1e-12
    assert rel(sdft(isdft(F)).coeffs, F.coeffs) <= 1e-12


@given(st.integers(4, 9), st.floats(1e-3, 10.0), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_parseval(log2m, h, seed, centered):
    M = 2 ** log2m
    g = make_grid(h, M, centered)
    f = PhysicalField(g, random_complex(np.random.default_rng(seed), M))
    lhs = h * np.sum(np.abs(f.values) ** 2)
    rhs = (g.dxi / (2 * np.pi)) * np.sum(np.abs(sdft(f).coeffs) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * lhs
    assert abs(sdft(f).norm() - f.norm()) <= 1e-12 * f.norm()


@given(st.integers(0, 2 ** 32 - 1), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    g = make_grid(0.1, 64)
    f = PhysicalField(g, random_complex(rng, 64))
    q = PhysicalField(g, random_complex(rng, 64))
    lhs = sdft(f * a + q * b).coeffs
    rhs = a * sdft(f).coeffs + b * sdft(q).coeffs
    scale = max(np.max(np.abs(rhs)), 1.0)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * 10


def test_batched_synthesis_matches_rowwise(rng):
    g = make_grid(0.5, 32)
    stack = random_complex(rng, 3 * 32).reshape(3, 32)
    rows = synthesize(g, stack)
    for r, c in zip(rows, stack):
        np.testing.assert_allclose(r, isdft(SpectralField(g, c)).values, atol=1e-14)


def test_mixed_grids_cannot_be_combined():
    a = PhysicalField(make_grid(1.0, 8), np.zeros(8))
    b = PhysicalField(make_grid(0.5, 8), np.zeros(8))
    with pytest.raises(ValueError):
        a + b


def test_lp_norms():
    g = make_grid(0.5, 8)
    f = PhysicalField(g, np.array([0, 0, 0, 3, 4, 0, 0, 0], complex))
    assert f.norm() == pytest.approx(np.sqrt(0.5 * 25))
    assert f.norm(np.inf) == 4.0
    assert f.norm(1) == pytest.approx(3.5)


@pytest.mark.parametrize("spectral", [False, True])
def test_csv_round_trip_is_exact(tmp_path, rng, spectral):
    g = make_grid(2 * np.pi / 256, 64)
    f = PhysicalField(g, random_complex(rng, 64))
    field = sdft(f) if spectral else f
    path = tmp_path / "f.csv"
    write_field_csv(field, path, {"scenario_id": "x", "k": 1})
    back, meta = read_field_csv(path)
    data = back.coeffs if spectral else back.values
    orig = field.coeffs if spectral else field.values
    assert np.array_equal(data, orig)
    assert back.grid == g
    assert meta["scenario_id"] == "x" and meta["k"] == "1"
    header = [l for l in path.read_text().splitlines() if not l.startswith("#")][0]
    assert header == ("m,xi,re,im" if spectral else "index,x,re,im")
