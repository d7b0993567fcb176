import math

import numpy as np
import pytest

from gpfield.background import (Background, bump_modulated_background, check_Hphi, constant_background,
                                kink_pair_background, kink_pair_periodicity_residual)
from gpfield.conservation import energy
from gpfield.decomposition import forcing
from gpfield.nonlinearity import make_gross_pitaevskii
from gpfield.rng import seeded_random_field
from gpfield.spectral import Field, Grid, laplacian, lp_norm

KINK_GRID = Grid(1, 1024, 40.0)


@pytest.mark.parametrize("rho0,value", [(1.0, 1.0), (4.0, 2.0)])
def test_constant_background(rho0, value):
    bg = constant_background(Grid(2, 16, 3.0), rho0)
    assert np.all(bg.phi.values == value)
    assert np.all(bg.laplacian_phi.values == 0)
    assert bg.density_deviation() == 0


def test_constant_background_energy_and_forcing_vanish():
    g = Grid(2, 16, 3.0)
    nl = make_gross_pitaevskii(1.0)
    bg = constant_background(g, 1.0)
    assert energy(Field.zeros(g), bg, nl) == 0
    assert np.all(forcing(Field.zeros(g), bg, nl).values == 0)


def test_kink_periodicity():
    assert kink_pair_periodicity_residual(KINK_GRID, 1.0, 40.0) <= 1e-10


def test_kink_stationarity():
    bg = kink_pair_background(KINK_GRID, 1.0, 40.0)
    nl = make_gross_pitaevskii(1.0)
    phi = bg.phi.values
    residual = laplacian(bg.phi).values + nl.eval_f(np.abs(phi) ** 2) * phi
    assert np.max(np.abs(residual)) <= 1e-8


def test_kink_profile_shape():
    bg = kink_pair_background(KINK_GRID, 1.0, 40.0)
    x = KINK_GRID.x1d
    # kinks sit at +-separation/2; near each one the profile is a single tanh
    for centre, sign in ((20.0, -1.0), (-20.0, 1.0)):
        near = np.abs(x - centre) < 10
        exact = sign * np.tanh((x[near] - centre) / math.sqrt(2))
        assert np.max(np.abs(bg.phi.values[near] - exact)) <= 1e-12


@pytest.mark.parametrize("sep", [0.0, -1.0, 50.0])
def test_kink_rejects_bad_separation(sep):
    with pytest.raises(ValueError):
        kink_pair_background(KINK_GRID, 1.0, sep)


def test_kink_rejects_short_box():
    with pytest.raises(ValueError, match="L"):
        kink_pair_background(Grid(1, 256, 8.0), 1.0, 8.0)


def test_kink_needs_1d():
    with pytest.raises(ValueError):
        kink_pair_background(Grid(2, 16, 40.0), 1.0, 40.0)


def test_bump_zero_amplitude_is_constant():
    g = Grid(2, 32, 8.0)
    bg = bump_modulated_background(g, 1.0, 0.0, 1.5)
    assert np.array_equal(bg.phi.values, constant_background(g, 1.0).phi.values)


def test_bump_density_deviation_positive():
    bg = bump_modulated_background(Grid(2, 64, 8.0), 1.0, 0.3, 1.5)
    assert bg.density_deviation() > 0


@pytest.mark.parametrize("amp,width", [(0.3, 1.5), (-0.5, 1.9), (0.9, 1.9)])
def test_bump_passes_regularity_check(amp, width):
    rep = check_Hphi(bump_modulated_background(Grid(2, 128, 8.0), 1.0, amp, width))
    assert rep["passed"]
    assert math.isfinite(rep["grad_phi_H2"])


@pytest.mark.parametrize("amp,width", [(1.0, 1.0), (0.3, 2.0)])
def test_bump_rejects_bad_parameters(amp, width):
    with pytest.raises(ValueError):
        bump_modulated_background(Grid(2, 32, 8.0), 1.0, amp, width)


def test_bump_is_constant_near_seams():
    g = Grid(1, 256, 8.0)
    bg = bump_modulated_background(g, 1.0, 0.4, 1.5)
    far = np.abs(g.x1d) >= 1.5
    assert np.all(bg.phi.values[far] == 1.0)


def test_check_Hphi_constant():
    rep = check_Hphi(constant_background(Grid(1, 64, 5.0), 2.0))
    assert rep["passed"]
    assert rep["grad_phi_H2"] == 0
    assert rep["density_deviation_L2"] <= 1e-14


def test_check_Hphi_kink():
    assert check_Hphi(kink_pair_background(KINK_GRID, 1.0, 40.0))["passed"]


def test_check_Hphi_white_noise_fails():
    g = Grid(2, 64, 5.0)
    noise = seeded_random_field(g, 3, "flat")
    rep = check_Hphi(Background.from_field(noise, 1.0, "noise"))
    assert not rep["passed"]
    # flat spectrum: modes with some |m_j| >= N/4 hold about 1 - (1/2)^2 of the energy
    assert rep["tail_fraction"] == pytest.approx(0.75, abs=0.05)


@pytest.mark.parametrize("make", [
    lambda: constant_background(Grid(2, 32, 4.0), 1.3),
    lambda: kink_pair_background(KINK_GRID, 1.0, 40.0),
    lambda: kink_pair_background(Grid(1, 1024, 60.0), 0.8, 50.0),
    lambda: bump_modulated_background(Grid(2, 64, 8.0), 1.0, 0.4, 1.5),
])
def test_stored_laplacian_matches_recomputed(make):
    bg = make()
    assert lp_norm(laplacian(bg.phi) - bg.laplacian_phi, math.inf) <= 1e-12
