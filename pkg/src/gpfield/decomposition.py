"""Nonlinear forcing F(w) and its algebraic and frequency decompositions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .background import Background
from .nonlinearity import Nonlinearity
from .spectral import Field, Grid, fft, gradient, h1_norm, ifft, lp_norm


def _same_grid(w: Field, bg: Background):
    if w.grid != bg.grid:
        raise ValueError(f"grid mismatch: w on {w.grid}, background on {bg.grid}")


def nonlinear_term(w: Field, bg: Background, nl: Nonlinearity) -> Field:
    """``-f(|phi+w|^2)(phi+w)``."""
    _same_grid(w, bg)
    u = bg.phi.values + w.values
    return Field(w.grid, -nl.eval_f(np.abs(u) ** 2) * u)


def forcing(w: Field, bg: Background, nl: Nonlinearity) -> Field:
    """``F(w) = -Delta phi - f(|phi+w|^2)(phi+w)``."""
    whole = nonlinear_term(w, bg, nl)
    return Field(w.grid, whole.values - bg.laplacian_phi.values)


@dataclass
class ForcingSplit:
    f1: Field
    f2: Field
    whole: Field


def forcing_part1(w: Field, bg: Background, nl: Nonlinearity) -> Field:
    """Part affine in w: ``-f(|phi|^2)(phi+w) - 2 Re[conj(phi) w] f'(|phi|^2) phi``."""
    _same_grid(w, bg)
    phi = bg.phi.values
    rho = np.abs(phi) ** 2
    lin = 2.0 * np.real(np.conj(phi) * w.values)
    return Field(w.grid, -nl.eval_f(rho) * (phi + w.values) - lin * nl.eval_fprime(rho) * phi)


def forcing_part2_explicit(w: Field, bg: Background, nl: Nonlinearity) -> Field:
    """Quadratic remainder written out term by term (validation path)."""
    _same_grid(w, bg)
    phi = bg.phi.values
    u = phi + w.values
    rho = np.abs(phi) ** 2
    lin = 2.0 * np.real(np.conj(phi) * w.values)
    diff = (nl.eval_f(np.abs(u) ** 2) - nl.eval_f(rho)) * u
    return Field(w.grid, -diff + lin * nl.eval_fprime(rho) * phi)


def split_forcing(w: Field, bg: Background, nl: Nonlinearity) -> ForcingSplit:
    whole = nonlinear_term(w, bg, nl)
    f1 = forcing_part1(w, bg, nl)
    return ForcingSplit(f1, whole - f1, whole)


def split_forcing_gradient(w: Field, bg: Background, nl: Nonlinearity):
    """Spectral gradients of the two split parts: ``(g1, g2)``, lists of n fields."""
    split = split_forcing(w, bg, nl)
    return gradient(split.f1), gradient(split.f2)


def smoothstep(s):
    """``35s^4 - 84s^5 + 70s^6 - 20s^7`` on [0, 1], clamped outside."""
    s = np.clip(s, 0.0, 1.0)
    return s**4 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)))


def cutoff(xi_abs, cutoff_scale: float = 1.0):
    """chi: 1 for ``|xi| <= c``, 0 for ``|xi| >= 2c``, smoothstep in between."""
    return 1.0 - smoothstep(np.asarray(xi_abs) / cutoff_scale - 1.0)


@dataclass
class FrequencySplit:
    low: Field
    high: Field
    cutoff_scale: float


def _split_symbols(grid: Grid, cutoff_scale: float):
    chi = cutoff(np.sqrt(grid.ksq), cutoff_scale)
    ksq = grid.ksq.copy()
    ksq.flat[0] = 1.0  # xi=0 is carried by the low part (chi(0) = 1)
    # (1 - chi) P_j(xi) (i xi_j) with P_j = -i xi_j / |xi|^2
    high_parts = [(1.0 - chi) * (-1j * k / ksq) * (1j * k) for k in grid.xi]
    return chi, high_parts


def frequency_split(eta: Field, cutoff_scale: float = 1.0) -> FrequencySplit:
    """``eta = chi(D) eta + sum_j (1 - chi(D)) P_j(D) d_j eta``.

    Full (un-zeroed) wavenumbers are used for ``d_j`` so that
    ``sum_j P_j(xi)(i xi_j) = 1`` also holds on Nyquist modes.
    """
    if not cutoff_scale > 0:
        raise ValueError("cutoff_scale must be positive")
    chi, high_parts = _split_symbols(eta.grid, cutoff_scale)
    e_hat = fft(eta.values)
    low = ifft(chi * e_hat)
    high = np.zeros_like(low)
    for m in high_parts:
        high += ifft(m * e_hat)
    return FrequencySplit(Field(eta.grid, low), Field(eta.grid, high), cutoff_scale)


def q_smoothing_ratio(eta: Field, cutoff_scale: float = 1.0) -> float:
    """``||chi(D) eta||_{H^1} / ||eta||_2``."""
    denom = lp_norm(eta, 2)
    if denom == 0:
        raise ValueError("eta is the zero field")
    chi = cutoff(np.sqrt(eta.grid.ksq), cutoff_scale)
    low = Field(eta.grid, ifft(chi * fft(eta.values)))
    return h1_norm(low) / denom


def q_smoothing_bound(cutoff_scale: float = 1.0) -> float:
    """Sup of ``sqrt(1+|xi|^2) chi(xi)``: an exact bound for :func:`q_smoothing_ratio`."""
    return math.sqrt(1.0 + (2.0 * cutoff_scale) ** 2)


def part1_lipschitz_constant(bg: Background, nl: Nonlinearity) -> float:
    """Pointwise Lipschitz constant of the affine part:
    ``sup |f(|phi|^2)| + 2 |phi|^2 |f'(|phi|^2)|``.
    """
    rho = np.abs(bg.phi.values) ** 2
    return float(np.max(np.abs(nl.eval_f(rho)) + 2.0 * rho * np.abs(nl.eval_fprime(rho))))
