import numpy as np
import pytest

from conftest import load_fixture
from gpfield.rng import _uniforms, complex_gaussian_coefficients, seeded_random_field
from gpfield.spectral import Grid, fft, h1_norm


@pytest.mark.parametrize("spectrum", ["flat", "sobolev-decay"])
@pytest.mark.parametrize("dim,N", [(1, 64), (2, 16), (3, 8)])
def test_bitwise_deterministic(spectrum, dim, N):
    g = Grid(dim, N, 3.0)
    a = seeded_random_field(g, 42, spectrum)
    b = seeded_random_field(g, 42, spectrum)
    assert a.values.tobytes() == b.values.tobytes()


def test_streams_are_positional():
    assert np.array_equal(_uniforms(7, 10), _uniforms(7, 50)[:10])


def test_uniforms_in_open_unit_interval():
    u = _uniforms(3, 100000)
    assert u.min() > 0 and u.max() <= 1


@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_seeds_differ(seed):
    g = Grid(2, 32, 3.0)
    a = seeded_random_field(g, seed).values
    b = seeded_random_field(g, seed + 1).values
    assert np.mean(a != b) >= 0.99


def test_coefficient_statistics():
    z = complex_gaussian_coefficients(Grid(2, 128, 1.0), 5)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(z)) <= 0.02
    assert abs(np.mean(z.real**2) - np.mean(z.imag**2)) <= 0.02


def test_field_coefficients_are_the_draw():
    g = Grid(2, 16, 3.0)
    f = seeded_random_field(g, 9, "sobolev-decay")
    z = complex_gaussian_coefficients(g, 9)
    assert np.allclose(fft(f.values), z / (1 + g.ksq), rtol=1e-12, atol=1e-13)


def test_h1_envelope_fixture():
    fx = load_fixture("rng.json")
    g = Grid(fx["grid"]["dim"], fx["grid"]["N"], fx["grid"]["L"])
    norms = [h1_norm(seeded_random_field(g, s, fx["spectrum"])) for s in range(fx["seeds"])]
    assert min(norms) == pytest.approx(fx["h1_min"], rel=1e-12)
    assert max(norms) == pytest.approx(fx["h1_max"], rel=1e-12)


def test_unknown_spectrum():
    with pytest.raises(ValueError, match="spectrum"):
        seeded_random_field(Grid(1, 16, 1.0), 0, "pink")
