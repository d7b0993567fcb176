"""Background profiles phi with |phi|^2 -> rho0 and their regularity check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Field, Grid, fft, gradient, laplacian, lp_norm

# tail-energy threshold used as the discrete smoothness proxy
TAIL_THRESHOLD = 1e-6
# max deviation of |phi| from sqrt(rho0) allowed at the seam / between kinks
SATURATION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Background:
    phi: Field
    rho0: float
    descriptor: str
    laplacian_phi: Field

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    @classmethod
    def from_field(cls, phi: Field, rho0: float, descriptor: str = "custom") -> "Background":
        return cls(phi, rho0, descriptor, laplacian(phi))

    def density_deviation(self) -> float:
        """Lattice value of ``|| |phi|^2 - rho0 ||_2``."""
        return lp_norm(Field(self.grid, np.abs(self.phi.values) ** 2 - self.rho0), 2)


def constant_background(grid: Grid, rho0: float) -> Background:
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    phi = Field(grid, np.full(grid.shape, math.sqrt(rho0), dtype=np.complex128))
    return Background(phi, rho0, "constant", Field.zeros(grid))


def _kink_pair_profile(x, rho0, separation):
    k = math.sqrt(rho0 / 2)
    return math.sqrt(rho0) * np.tanh(k * (x + separation / 2)) * -np.tanh(k * (x - separation / 2))


def kink_pair_background(grid: Grid, rho0: float, separation: float) -> Background:
    """Periodic dark-soliton pair: kinks at ``x = +-separation/2``.

    Each kink is the stationary Gross-Pitaevskii profile
    ``sqrt(rho0) tanh(sqrt(rho0/2) x)``; the product form makes the profile
    even in x, hence exactly periodic on ``[-L, L)``.
    """
    if grid.dim != 1:
        raise ValueError("kink-pair background is one-dimensional")
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    if not 0 < separation <= grid.L:
        raise ValueError(f"separation must lie in (0, L={grid.L}], got {separation}")
    amp = math.sqrt(rho0)
    # saturation at the seam and at the centre, where the two tanh factors meet
    probes = np.array([-grid.L, grid.L, 0.0])
    deviation = np.max(np.abs(np.abs(_kink_pair_profile(probes, rho0, separation)) / amp - 1))
    if deviation > SATURATION_TOL:
        raise ValueError(
            f"kink pair not saturated (|phi|/sqrt(rho0) off by {deviation:.2e}); "
            "increase L or adjust the separation")
    phi = Field(grid, _kink_pair_profile(grid.x1d, rho0, separation))
    return Background(phi, rho0, "kink-pair", laplacian(phi))


def kink_pair_periodicity_residual(grid: Grid, rho0: float, separation: float, h: float = 1e-6) -> float:
    """Mismatch of value and slope of the analytic profile across the seam."""
    f = lambda x: _kink_pair_profile(np.asarray(x, dtype=float), rho0, separation)  # noqa: E731
    L = grid.L
    value = abs(f(-L) - f(L))
    slope = abs((f(-L + h) - f(-L - h)) - (f(L + h) - f(L - h))) / (2 * h)
    return float(max(value, slope))


def bump_modulated_background(grid: Grid, rho0: float, amplitude: float, width: float) -> Background:
    """``sqrt(rho0)`` plus a C-infinity bump of radius ``width`` centred at the origin."""
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    if not 0 < width < grid.L / 4:
        raise ValueError(f"width must lie in (0, L/4), got {width}")
    if not abs(amplitude) < math.sqrt(rho0):
        raise ValueError(f"|amplitude| must be below sqrt(rho0)={math.sqrt(rho0)}")
    s = grid.radius / width
    bump = np.zeros(grid.shape)
    inside = s < 1
    bump[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    phi = Field(grid, math.sqrt(rho0) + amplitude * bump)
    return Background(phi, rho0, "bump-modulated", laplacian(phi))


def top_octave_fraction(field: Field) -> float:
    """Share of spectral energy in modes with some ``|m_j| >= N/4``."""
    g = field.grid
    power = np.abs(fft(field.values)) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    m = np.abs(g.mode_numbers) >= g.N // 4
    masks = np.meshgrid(*([m] * g.dim), indexing="ij", sparse=True)
    top = np.zeros(g.shape, dtype=bool)
    for mk in masks:
        top = top | mk
    return float(power[top].sum() / total)


def check_Hphi(bg: Background) -> dict:
    """Lattice version of the regularity hypothesis on phi.

    Reports ``||grad phi||_{H^2}`` (spectral, derivatives up to third order),
    ``|| |phi|^2 - rho0 ||_2`` and the top-octave energy fraction of phi.
    """
    g = bg.grid
    weight = (1.0 + g.ksq_deriv) ** 2
    grad_h2_sq = 0.0
    for comp in gradient(bg.phi):
        c_hat = fft(comp.values)
        grad_h2_sq += float(np.sum(weight * np.abs(c_hat) ** 2)) * g.cell_volume / g.N**g.dim
    grad_h2 = math.sqrt(grad_h2_sq)
    dens = bg.density_deviation()
    tail = top_octave_fraction(bg.phi)
    passed = math.isfinite(grad_h2) and math.isfinite(dens) and tail < TAIL_THRESHOLD
    return {
        "hypothesis": "Hphi",
        "passed": bool(passed),
        "grad_phi_H2": grad_h2,
        "density_deviation_L2": dens,
        "tail_fraction": tail,
        "tail_threshold": TAIL_THRESHOLD,
        "descriptor": bg.descriptor,
    }
