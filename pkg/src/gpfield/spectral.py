"""Periodic lattice, FFT conventions, spectral operators and norms.

Transform convention: the forward transform is unnormalised and the inverse
carries ``1/N**dim`` (numpy/scipy default), so a multiplier ``m(xi)`` acts as
``ifftn(m * fftn(v))`` with no extra factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on ``[-L, L)**dim`` with ``N`` points per axis."""

    dim: int
    N: int
    L: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.N < 2 or self.N % 2:
            raise ValueError(f"N must be a positive even integer, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.dim

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def volume(self) -> float:
        return (2.0 * self.L) ** self.dim

    @cached_property
    def x1d(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        """Integer mode numbers m in FFT order; the Nyquist mode is ``-N/2``."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Per-axis table ``xi = pi m / L`` in FFT order."""
        return np.pi * self.mode_numbers / self.L

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.x1d] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def xi(self) -> tuple[np.ndarray, ...]:
        """Broadcastable wavenumber arrays, one per axis."""
        return tuple(np.meshgrid(*([self.wavenumbers] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def xi_deriv(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers for derivative multipliers, Nyquist mode zeroed."""
        k = self.wavenumbers.copy()
        k[self.N // 2] = 0.0
        return tuple(np.meshgrid(*([k] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def ksq(self) -> np.ndarray:
        """|xi|^2 on the full lattice (Nyquist kept)."""
        return sum(k**2 for k in self.xi)

    @cached_property
    def ksq_deriv(self) -> np.ndarray:
        return sum(k**2 for k in self.xi_deriv)

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.coords))

    def describe(self) -> dict:
        return {"dim": self.dim, "N": self.N, "L": self.L}


class Field:
    """Complex lattice function bound to a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid.shape:
            values = np.broadcast_to(values, grid.shape).copy()
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[..., np.ndarray]) -> "Field":
        """Sample ``func(*coords)`` on the lattice."""
        return cls(grid, func(*grid.coords))

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, Field):
            self._check(scalar)
            return Field(self.grid, self.values * scalar.values)
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Field(grid={self.grid}, max|v|={np.abs(self.values).max():.3g})"


def fft(values: np.ndarray) -> np.ndarray:
    return sfft.fftn(values)


def ifft(coeffs: np.ndarray) -> np.ndarray:
    return sfft.ifftn(coeffs)


@dataclass(frozen=True)
class MultiplierSpec:
    """A Fourier multiplier ``m(D)`` given by its symbol on the wavenumber grid.

    ``symbol`` receives the tuple of broadcastable per-axis wavenumber arrays
    and returns the symbol values.
    """

    symbol: Callable[[tuple[np.ndarray, ...]], np.ndarray]
    name: str = "multiplier"

    def evaluate(self, grid: Grid) -> np.ndarray:
        m = np.broadcast_to(np.asarray(self.symbol(grid.xi)), grid.shape)
        bad = ~np.isfinite(m)
        if bad.any():
            idx = tuple(int(i[0]) for i in np.nonzero(bad))
            xi = tuple(float(grid.wavenumbers[i]) for i in idx)
            raise FloatingPointError(f"symbol {self.name!r} is not finite at xi={xi}")
        return m


def apply_multiplier(field: Field, m: MultiplierSpec | np.ndarray) -> Field:
    """Return ``m(D) field``. ``m`` may be a MultiplierSpec or a precomputed symbol array."""
    symbol = m.evaluate(field.grid) if isinstance(m, MultiplierSpec) else m
    return Field(field.grid, ifft(symbol * fft(field.values)))


def gradient(field: Field) -> list[Field]:
    v_hat = fft(field.values)
    return [Field(field.grid, ifft(1j * k * v_hat)) for k in field.grid.xi_deriv]


def laplacian(field: Field) -> Field:
    return Field(field.grid, ifft(-field.grid.ksq_deriv * fft(field.values)))


def grad_sq_integral(values: np.ndarray, grid: Grid) -> float:
    """``sum |grad v|^2 dV`` computed on the Fourier side (Plancherel)."""
    v_hat = fft(values)
    return float(np.sum(grid.ksq_deriv * np.abs(v_hat) ** 2) * grid.cell_volume / grid.N**grid.dim)


def _lp(values: np.ndarray, p: float, cell_volume: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max())
    if p == 2:
        return float(math.sqrt(np.vdot(a, a).real * cell_volume))
    return float((np.sum(a**p) * cell_volume) ** (1.0 / p))


def lp_norm(field: Field, p: float) -> float:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _lp(field.values, p, field.grid.cell_volume)


def _grad_magnitude(field: Field) -> np.ndarray:
    return np.sqrt(sum(np.abs(g.values) ** 2 for g in gradient(field)))


def h1_norm(field: Field) -> float:
    l2 = lp_norm(field, 2)
    g2 = grad_sq_integral(field.values, field.grid)
    return math.sqrt(l2**2 + g2)


def w1q_norm(field: Field, q: float) -> float:
    """``||f||_q + || |grad f| ||_q``."""
    return lp_norm(field, q) + _lp(_grad_magnitude(field), q, field.grid.cell_volume)


def spatial_norm(field: Field, spatial: str) -> float:
    """Evaluate a spatial norm by tag: ``l<q>``, ``h1`` or ``w1,<q>``.

    ``q`` may be a number or ``inf``; e.g. ``"l2"``, ``"linf"``, ``"w1,6"``.
    """
    tag = spatial.lower().replace(" ", "")
    if tag == "h1":
        return h1_norm(field)
    if tag.startswith("w1,"):
        return w1q_norm(field, float(tag[3:]))
    if tag.startswith("l"):
        return lp_norm(field, float(tag[1:]))
    raise ValueError(f"unknown spatial norm tag {spatial!r}")


def mixed_norm(series: Sequence[Field], p_t: float, spatial: str, dt: float) -> float:
    """Temporal l^p (rectangle weight ``dt`` per sample) of spatial norms."""
    if len(series) == 0:
        raise ValueError("empty series")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s = np.array([spatial_norm(f, spatial) for f in series])
    if math.isinf(p_t):
        return float(s.max())
    return float((dt * np.sum(s**p_t)) ** (1.0 / p_t))


def _as_fraction(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**9)


def is_admissible(p: float, q: float, n: int) -> bool:
    """Exact check of ``2/p + n/q = n/2, p >= 2, (p, q) != (2, inf)``."""
    if p < 2 or q < 1:
        return False
    if p == 2 and math.isinf(q):
        return False
    inv_p = Fraction(0) if math.isinf(p) else 1 / _as_fraction(p)
    inv_q = Fraction(0) if math.isinf(q) else 1 / _as_fraction(q)
    return 2 * inv_p + n * inv_q == Fraction(n, 2)


@dataclass(frozen=True)
class AdmissiblePair:
    p: float
    q: float
    n: int

    def __post_init__(self):
        if not is_admissible(self.p, self.q, self.n):
            raise ValueError(f"({self.p}, {self.q}) is not admissible in dimension {self.n}")

    @property
    def spatial_tag(self) -> str:
        return f"w1,{self.q}"

    def to_dict(self) -> dict:
        enc = lambda v: "inf" if math.isinf(v) else v  # noqa: E731
        return {"p": enc(self.p), "q": enc(self.q), "n": self.n}


def admissible_pair_for(n: int) -> AdmissiblePair:
    """The contraction-space pair: ``(6/n, 6)`` for n=2,3 and ``(2, 4)`` for n=4.

    n=1 is not covered by the local theory used here; ``(inf, 2)`` is returned
    so that 1D runs still get an ``L^inf_T H^1``-type norm.
    """
    if n == 1:
        return AdmissiblePair(math.inf, 2.0, 1)
    if n in (2, 3):
        return AdmissiblePair(6.0 / n, 6.0, n)
    if n == 4:
        return AdmissiblePair(2.0, 4.0, 4)
    raise ValueError(f"no admissible pair defined for n={n}")
