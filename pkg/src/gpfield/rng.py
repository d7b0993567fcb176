"""Deterministic random fields from a counter-based generator.

Raw word ``k`` of a Philox stream depends only on ``(key, k)``, so lattice
point ``j`` always draws words ``2j`` and ``2j+1`` regardless of fill order.
"""
from __future__ import annotations

import numpy as np

from .spectral import Field, Grid, ifft

SPECTRA = ("flat", "sobolev-decay")

_TWO53 = float(2**53)


def _uniforms(seed: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=np.uint64(seed % 2**64))
    raw = bitgen.random_raw(count)
    # 53-bit mantissa, shifted into (0, 1] so log() below is finite
    return ((raw >> np.uint64(11)).astype(np.float64) + 1.0) / _TWO53


def complex_gaussian_coefficients(grid: Grid, seed: int) -> np.ndarray:
    """I.i.d. standard complex Gaussians (``E|z|^2 = 1``), one per lattice index."""
    size = grid.N**grid.dim
    u = _uniforms(seed, 2 * size)
    r = np.sqrt(-np.log(u[0::2]))
    theta = 2.0 * np.pi * u[1::2]
    return (r * np.exp(1j * theta)).reshape(grid.shape)


def seeded_random_field(grid: Grid, seed: int, spectrum: str = "flat") -> Field:
    """Field whose Fourier coefficients are seeded complex Gaussians.

    ``sobolev-decay`` damps coefficients by ``(1 + |xi|^2)^-1``.
    """
    coeffs = complex_gaussian_coefficients(grid, seed)
    if spectrum == "sobolev-decay":
        coeffs = coeffs / (1.0 + grid.ksq)
    elif spectrum != "flat":
        raise ValueError(f"unknown spectrum {spectrum!r}; expected one of {SPECTRA}")
    return Field(grid, ifft(coeffs))
