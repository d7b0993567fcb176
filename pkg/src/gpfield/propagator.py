"""Free Schroedinger group, Duhamel quadrature and Strichartz probes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectral import AdmissiblePair, Field, Grid, fft, ifft, is_admissible, lp_norm, mixed_norm


def free_phase(grid: Grid, t: float) -> np.ndarray:
    """Symbol of ``e^{it Delta}``: ``exp(-i |xi|^2 t)``."""
    return np.exp(-1j * grid.ksq * t)


def free_evolve(field: Field, t: float) -> Field:
    if t == 0:
        return field.copy()
    return Field(field.grid, ifft(free_phase(field.grid, t) * fft(field.values)))


def _uniform_step(times: Sequence[float]) -> float:
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("need at least 2 source samples")
    steps = np.diff(times)
    dt = float(steps.mean())
    if not dt > 0 or np.max(np.abs(steps - dt)) > 1e-9 * max(1.0, abs(dt)):
        raise ValueError("source samples must be uniformly spaced and increasing")
    return dt


def duhamel_integral(sources: Sequence[Field], t: float, times: Sequence[float] | None = None) -> Field:
    """``-i int_0^t e^{i(t-s)Delta} F(s) ds`` by the trapezoid rule.

    ``sources[j]`` is ``F(times[j])``; ``times`` defaults to an even grid from
    0 to ``t`` with ``len(sources)`` samples.
    """
    if times is None:
        times = np.linspace(0.0, t, len(sources))
    times = np.asarray(times, dtype=float)
    dt = _uniform_step(times)
    if len(sources) != times.size:
        raise ValueError("sources and times differ in length")
    grid = sources[0].grid
    w = np.full(times.size, dt)
    w[0] = w[-1] = dt / 2
    acc = np.zeros(grid.shape, dtype=np.complex128)
    for wj, s, F in zip(w, times, sources):
        acc += wj * np.exp(-1j * grid.ksq * (t - s)) * fft(F.values)
    return Field(grid, ifft(-1j * acc))


def duhamel_cumulative(source_hats: np.ndarray, grid: Grid, dt: float) -> np.ndarray:
    """Fourier coefficients of the Duhamel term at every grid time ``j*dt``.

    ``source_hats[j]`` holds ``fft(F(j*dt))``. In the interaction picture the
    integrand is ``e^{i|xi|^2 s} F^(s)``, so a running trapezoid sum yields all
    time levels with one pass.
    """
    M = source_hats.shape[0]
    out = np.empty_like(source_hats)
    out[0] = 0.0
    running = np.zeros(grid.shape, dtype=np.complex128)
    prev = source_hats[0]  # e^{0} F^(0)
    for j in range(1, M):
        cur = np.exp(1j * grid.ksq * (j * dt)) * source_hats[j]
        running += 0.5 * dt * (prev + cur)
        out[j] = -1j * np.exp(-1j * grid.ksq * (j * dt)) * running
        prev = cur
    return out


@dataclass
class StrichartzReport:
    pair: AdmissiblePair
    T: float
    ratio: float
    num_fields: int
    max_ratio: float
    grid_desc: dict
    ratios: list

    def to_dict(self) -> dict:
        return {
            "pair": self.pair.to_dict(),
            "T": self.T,
            "ratio": self.ratio,
            "num_fields": self.num_fields,
            "max_ratio": self.max_ratio,
            "grid": self.grid_desc,
            "ratios": list(self.ratios),
        }


def strichartz_trajectory_ratio(f: Field, pair: AdmissiblePair, T: float, steps: int) -> float:
    """``||e^{it Delta} f||_{L^p_T L^q} / ||f||_2`` with left-rectangle time quadrature."""
    dt = T / steps
    f_hat = fft(f.values)
    g = f.grid
    series = [Field(g, ifft(np.exp(-1j * g.ksq * (j * dt)) * f_hat)) for j in range(steps)]
    q = "inf" if math.isinf(pair.q) else repr(float(pair.q))
    return mixed_norm(series, pair.p, f"l{q}", dt) / lp_norm(f, 2)


def strichartz_ratio(grid: Grid, seed: int, pair: AdmissiblePair, T: float, steps: int,
                     num_fields: int, spectrum: str = "flat", scale: complex = 1.0) -> StrichartzReport:
    """Largest empirical Strichartz ratio over ``num_fields`` seeded random fields.

    Field ``i`` uses seed ``seed + i``.  ``scale`` multiplies every field and
    exists for homogeneity checks.
    """
    from .rng import seeded_random_field

    if not is_admissible(pair.p, pair.q, pair.n):
        raise ValueError(f"pair {pair} is not admissible")
    if pair.n != grid.dim:
        raise ValueError(f"pair dimension {pair.n} differs from grid dimension {grid.dim}")
    if steps < 1 or num_fields < 1:
        raise ValueError("steps and num_fields must be positive")
    ratios = [strichartz_trajectory_ratio(scale * seeded_random_field(grid, seed + i, spectrum),
                                          pair, T, steps)
              for i in range(num_fields)]
    return StrichartzReport(pair, T, ratios[0], num_fields, max(ratios), grid.describe(), ratios)
