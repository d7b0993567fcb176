import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpfield.rng import seeded_random_field
from gpfield.spectral import (AdmissiblePair, Field, Grid, MultiplierSpec, admissible_pair_for,
                              apply_multiplier, fft, gradient, grad_sq_integral, h1_norm, ifft,
                              is_admissible, laplacian, lp_norm, mixed_norm, spatial_norm, w1q_norm)


def mode(grid, m):
    """Plane wave with integer mode numbers ``m`` (one per axis) and its wavevector."""
    k = np.array(m, dtype=float) * math.pi / grid.L
    phase = sum(kj * xj for kj, xj in zip(k, grid.coords))
    return Field(grid, np.exp(1j * phase) * np.ones(grid.shape)), k


# -- grid ---------------------------------------------------------------------

@pytest.mark.parametrize("dim,N,L", [(1, 16, 1.0), (2, 32, 5.0), (3, 8, 2.5)])
def test_grid_volume_and_wavenumbers(dim, N, L):
    g = Grid(dim, N, L)
    assert g.cell_volume * N**dim == pytest.approx((2 * L) ** dim, rel=1e-15)
    m = g.mode_numbers
    assert np.count_nonzero(m == 0) == 1
    assert m.min() == -N // 2 and m.max() == N // 2 - 1
    # symmetric apart from the Nyquist mode
    rest = np.sort(m[m != -N // 2])
    assert np.array_equal(rest, -rest[::-1])
    assert np.allclose(g.wavenumbers, math.pi * m / L)


@pytest.mark.parametrize("dim,N", [(4, 8), (0, 8), (2, 7), (1, 0)])
def test_grid_rejects_bad_shapes(dim, N):
    with pytest.raises(ValueError):
        Grid(dim, N, 1.0)


def test_grid_rejects_nonpositive_length():
    with pytest.raises(ValueError):
        Grid(1, 8, 0.0)


def test_derivative_symbols_zero_nyquist():
    g = Grid(1, 16, 3.0)
    nyq = g.mode_numbers == -8
    assert g.xi_deriv[0][nyq] == 0
    assert g.ksq_deriv[nyq] == 0
    assert g.ksq[nyq] > 0


# -- field --------------------------------------------------------------------

def test_field_grid_mismatch():
    a = Field.zeros(Grid(1, 8, 1.0))
    b = Field.zeros(Grid(1, 8, 2.0))
    with pytest.raises(ValueError):
        a + b


def test_field_shape_checked():
    with pytest.raises(ValueError):
        Field(Grid(2, 8, 1.0), np.zeros(64))


@pytest.mark.parametrize("dim,N", [(1, 64), (2, 32), (3, 16)])
def test_fft_round_trip(dim, N):
    f = seeded_random_field(Grid(dim, N, 3.0), 7)
    back = ifft(fft(f.values))
    assert np.max(np.abs(back - f.values)) <= 1e-13 * np.max(np.abs(f.values))


# -- multipliers --------------------------------------------------------------

def test_identity_multiplier():
    f = seeded_random_field(Grid(2, 16, 2.0), 3)
    out = apply_multiplier(f, MultiplierSpec(lambda xi: np.ones_like(xi[0]), "one"))
    assert np.max(np.abs(out.values - f.values)) <= 1e-13


def test_derivative_multiplier_on_mode():
    g = Grid(2, 32, 4.0)
    f, k = mode(g, (3, -2))
    out = apply_multiplier(f, MultiplierSpec(lambda xi: 1j * xi[0], "dx"))
    assert np.max(np.abs(out.values - 1j * k[0] * f.values)) <= 1e-12


def test_laplacian_symbol_on_mode():
    g = Grid(2, 32, 4.0)
    f, k = mode(g, (3, -2))
    m = MultiplierSpec(lambda xi: -(xi[0] ** 2 + xi[1] ** 2), "lap")
    assert np.max(np.abs(apply_multiplier(f, m).values + k @ k * f.values)) <= 1e-11


def test_non_finite_symbol_names_wavenumber():
    g = Grid(1, 8, 1.0)
    with pytest.raises(FloatingPointError, match="xi"), np.errstate(divide="ignore"):
        apply_multiplier(Field.zeros(g), MultiplierSpec(lambda xi: 1.0 / xi[0], "inv"))


def test_multiplier_linearity_and_composition():
    g = Grid(2, 32, 5.0)
    f, h = seeded_random_field(g, 1), seeded_random_field(g, 2)
    m1 = MultiplierSpec(lambda xi: np.exp(-(xi[0] ** 2 + xi[1] ** 2)), "gauss")
    m2 = MultiplierSpec(lambda xi: 1j * xi[1], "dy")
    a, b = 0.7, -1.3
    lhs = apply_multiplier(f * a + h * b, m1)
    rhs = apply_multiplier(f, m1) * a + apply_multiplier(h, m1) * b
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12
    both = MultiplierSpec(lambda xi: m1.symbol(xi) * m2.symbol(xi), "both")
    seq = apply_multiplier(apply_multiplier(f, m1), m2)
    assert np.max(np.abs(seq.values - apply_multiplier(f, both).values)) <= 1e-12


# -- derivatives --------------------------------------------------------------

def test_gradient_of_constant_is_zero():
    g = Grid(3, 8, 1.0)
    for c in gradient(Field(g, np.full(g.shape, 2.5 + 1j))):
        assert np.max(np.abs(c.values)) <= 1e-15


def test_gradient_of_sine():
    g = Grid(1, 64, 3.0)
    x = g.x1d
    f = Field(g, np.sin(math.pi * x / g.L))
    (d,) = gradient(f)
    assert np.max(np.abs(d.values - (math.pi / g.L) * np.cos(math.pi * x / g.L))) <= 1e-12


@pytest.mark.parametrize("m", [(1, 0), (4, -5), (-7, 2)])
def test_laplacian_of_mode(m):
    g = Grid(2, 32, 6.0)
    f, k = mode(g, m)
    assert np.max(np.abs(laplacian(f).values + (k @ k) * f.values)) <= 1e-11


def test_plancherel_gradient():
    g = Grid(2, 64, 5.0)
    f = seeded_random_field(g, 11, "sobolev-decay")
    phys = sum(np.sum(np.abs(c.values) ** 2) for c in gradient(f)) * g.cell_volume
    assert grad_sq_integral(f.values, g) == pytest.approx(phys, rel=1e-10)


# -- norms --------------------------------------------------------------------

def test_lp_norm_of_one():
    g = Grid(1, 32, 3.0)
    assert lp_norm(Field(g, np.ones(32)), 2) == pytest.approx(math.sqrt(6.0), rel=1e-14)


def test_parseval():
    g = Grid(2, 32, 4.0)
    f = seeded_random_field(g, 4)
    coeffs = fft(f.values)
    spectral = math.sqrt(np.sum(np.abs(coeffs) ** 2) * g.cell_volume / g.N**g.dim)
    assert lp_norm(f, 2) == pytest.approx(spectral, rel=1e-12)


@pytest.mark.parametrize("m", [(0, 0), (2, 3), (-5, 1)])
def test_h1_norm_of_mode(m):
    g = Grid(2, 32, 4.0)
    f, k = mode(g, m)
    assert h1_norm(f) == pytest.approx(math.sqrt((1 + k @ k) * g.volume), rel=1e-12)


def test_linf_norm_is_max():
    g = Grid(1, 8, 1.0)
    v = np.array([0, 1, -3, 2j, 0, 0, 0, 0.5])
    assert lp_norm(Field(g, v), math.inf) == 3.0


def test_lp_norm_rejects_p_below_one():
    with pytest.raises(ValueError):
        lp_norm(Field.zeros(Grid(1, 8, 1.0)), 0.5)


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(1e-3, 1e3), seed=st.integers(0, 2**32))
def test_norm_homogeneity(lam, seed):
    f = seeded_random_field(Grid(2, 16, 3.0), seed)
    for norm in (lambda v: lp_norm(v, 2), lambda v: lp_norm(v, 6), lambda v: lp_norm(v, math.inf),
                 h1_norm, lambda v: w1q_norm(v, 6)):
        assert norm(f * lam) == pytest.approx(lam * norm(f), rel=1e-12)


def test_spatial_norm_tags():
    f = seeded_random_field(Grid(2, 16, 3.0), 0)
    assert spatial_norm(f, "l2") == lp_norm(f, 2)
    assert spatial_norm(f, "linf") == lp_norm(f, math.inf)
    assert spatial_norm(f, "h1") == h1_norm(f)
    assert spatial_norm(f, "w1,6") == w1q_norm(f, 6)
    with pytest.raises(ValueError):
        spatial_norm(f, "bv")


# -- mixed norms --------------------------------------------------------------

def test_mixed_norm_constant_in_time():
    f = seeded_random_field(Grid(1, 32, 2.0), 5)
    T, steps, p = 0.8, 40, 3.0
    series = [f] * steps
    assert mixed_norm(series, math.inf, "h1", T / steps) == h1_norm(f)
    assert mixed_norm(series, p, "l6", T / steps) == pytest.approx(T ** (1 / p) * lp_norm(f, 6), rel=1e-13)


def test_mixed_norm_single_step():
    f = seeded_random_field(Grid(1, 32, 2.0), 5)
    dt, p = 0.01, 3.0
    assert mixed_norm([f], p, "l2", dt) == pytest.approx(dt ** (1 / p) * lp_norm(f, 2), rel=1e-14)


def test_mixed_norm_rejects_empty():
    with pytest.raises(ValueError):
        mixed_norm([], 2.0, "l2", 0.1)


# -- admissible pairs ---------------------------------------------------------

@pytest.mark.parametrize("n,expected", [(2, (3, 6)), (3, (2, 6)), (4, (2, 4)), (1, (math.inf, 2))])
def test_admissible_pair_for(n, expected):
    pair = admissible_pair_for(n)
    assert (pair.p, pair.q) == expected
    assert is_admissible(pair.p, pair.q, n)


@pytest.mark.parametrize("p,q,n,ok", [
    (2, math.inf, 2, False),
    (4, 4, 2, True),
    (3, 6, 2, True),
    (math.inf, 2, 3, True),
    (2, 6, 3, True),
    (1.5, 6, 2, False),
    (3, 5, 2, False),
    (8, 4, 1, True),
])
def test_is_admissible(p, q, n, ok):
    assert is_admissible(p, q, n) is ok


def test_admissible_pair_validates():
    with pytest.raises(ValueError):
        AdmissiblePair(2, math.inf, 2)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 4), p=st.integers(2, 40))
def test_admissible_q_from_p(n, p):
    # 2/p + n/q = n/2 solved for q; admissible whenever q is finite and >= 1
    denom = n / 2 - 2 / p
    if denom <= 0:
        return
    q = n / denom
    assert is_admissible(p, q, n) == (not (p == 2 and math.isinf(q)))
